#include "pbd/server/protocol.hpp"

namespace pbd::server {

using nlohmann::json;

std::string_view to_string(MessageType type) {
  switch (type) {
    case MessageType::StartRecording: return "StartRecording";
    case MessageType::PoseSample: return "PoseSample";
    case MessageType::StopRecording: return "StopRecording";
    case MessageType::StepCursor: return "StepCursor";
    case MessageType::Play: return "Play";
    case MessageType::Pause: return "Pause";
    case MessageType::RedrawFrom: return "RedrawFrom";
    case MessageType::Save: return "Save";
    case MessageType::Discard: return "Discard";
    case MessageType::AddToTrainingSet: return "AddToTrainingSet";
    case MessageType::ListTrainingSet: return "ListTrainingSet";
    case MessageType::DeleteTrajectory: return "DeleteTrajectory";
    case MessageType::TrainModel: return "TrainModel";
    case MessageType::PlaceMarker: return "PlaceMarker";
    case MessageType::ConditionAndSample: return "ConditionAndSample";
    case MessageType::Execute: return "Execute";
    case MessageType::Ack: return "Ack";
    case MessageType::ErrorReply: return "ErrorReply";
    case MessageType::RobotState: return "RobotState";
    case MessageType::CollisionWarning: return "CollisionWarning";
    case MessageType::ExecutionDone: return "ExecutionDone";
    case MessageType::Busy: return "Busy";
  }
  return "";
}

std::optional<MessageType> message_type_from_string(std::string_view name) {
  for (MessageType t : kAllMessageTypes) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

bool is_client_request(MessageType type) {
  return static_cast<int>(type) <= static_cast<int>(MessageType::Execute);
}

std::string encode(const Envelope& env) {
  json doc{{"type", env.type}, {"seq", env.seq}, {"payload", env.payload}};
  return doc.dump();
}

Envelope decode(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(Errc::PayloadValidation, std::string("malformed envelope: ") + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::PayloadValidation, "envelope must be a JSON object");
  auto type = doc.find("type");
  if (type == doc.end() || !type->is_string()) throw Error(Errc::PayloadValidation, "envelope.type: expected string");
  auto seq = doc.find("seq");
  if (seq == doc.end() || !seq->is_number_unsigned()) {
    throw Error(Errc::PayloadValidation, "envelope.seq: expected non-negative integer");
  }
  Envelope env;
  env.type = type->get<std::string>();
  env.seq = seq->get<std::uint64_t>();
  auto payload = doc.find("payload");
  if (payload != doc.end()) {
    if (!payload->is_object()) throw Error(Errc::PayloadValidation, "envelope.payload: expected object");
    env.payload = *payload;
  }
  return env;
}

Envelope make_ack(std::uint64_t seq, json payload) { return Envelope(MessageType::Ack, seq, std::move(payload)); }

Envelope make_error(std::uint64_t seq, Errc code, std::string_view mode, std::string_view offending_type,
                    std::string_view message) {
  return Envelope(MessageType::ErrorReply, seq,
                  json{{"code", std::string(to_string(code))},
                       {"mode", std::string(mode)},
                       {"type", std::string(offending_type)},
                       {"message", std::string(message)}});
}

}  // namespace pbd::server
