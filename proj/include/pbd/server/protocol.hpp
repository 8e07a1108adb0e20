#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "pbd/error.hpp"

namespace pbd::server {

enum class MessageType {
  StartRecording,
  PoseSample,
  StopRecording,
  StepCursor,
  Play,
  Pause,
  RedrawFrom,
  Save,
  Discard,
  AddToTrainingSet,
  ListTrainingSet,
  DeleteTrajectory,
  TrainModel,
  PlaceMarker,
  ConditionAndSample,
  Execute,
  Ack,
  ErrorReply,
  RobotState,
  CollisionWarning,
  ExecutionDone,
  Busy,
};

inline constexpr std::array kAllMessageTypes{
    MessageType::StartRecording,   MessageType::PoseSample,       MessageType::StopRecording,
    MessageType::StepCursor,       MessageType::Play,             MessageType::Pause,
    MessageType::RedrawFrom,       MessageType::Save,             MessageType::Discard,
    MessageType::AddToTrainingSet, MessageType::ListTrainingSet,  MessageType::DeleteTrajectory,
    MessageType::TrainModel,       MessageType::PlaceMarker,      MessageType::ConditionAndSample,
    MessageType::Execute,          MessageType::Ack,              MessageType::ErrorReply,
    MessageType::RobotState,       MessageType::CollisionWarning, MessageType::ExecutionDone,
    MessageType::Busy,
};

std::string_view to_string(MessageType type);
std::optional<MessageType> message_type_from_string(std::string_view name);

/// Types a client may send. The rest are replies, or internal (ExecutionDone).
bool is_client_request(MessageType type);

/// Wire unit: one JSON object per line, {"type", "seq", "payload"}. The type
/// stays a string so unknown names can be answered instead of dropped.
struct Envelope {
  std::string type;
  std::uint64_t seq = 0;
  nlohmann::json payload = nlohmann::json::object();

  Envelope() = default;
  Envelope(std::string type, std::uint64_t seq, nlohmann::json payload = nlohmann::json::object())
      : type(std::move(type)), seq(seq), payload(std::move(payload)) {}
  Envelope(MessageType type, std::uint64_t seq, nlohmann::json payload = nlohmann::json::object())
      : type(to_string(type)), seq(seq), payload(std::move(payload)) {}

  std::optional<MessageType> kind() const { return message_type_from_string(type); }
  bool is(MessageType t) const { return type == to_string(t); }
  bool operator==(const Envelope&) const = default;
};

/// Compact single-line JSON without the trailing newline.
std::string encode(const Envelope& env);

/// Throws Error(PayloadValidation) for malformed JSON or a missing/ill-typed
/// type, seq or payload field.
Envelope decode(std::string_view line);

Envelope make_ack(std::uint64_t seq, nlohmann::json payload = nlohmann::json::object());

/// ErrorReply payload: {code, mode, type, message}.
Envelope make_error(std::uint64_t seq, Errc code, std::string_view mode, std::string_view offending_type,
                    std::string_view message);

}  // namespace pbd::server
