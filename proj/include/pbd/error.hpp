#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pbd {

enum class Errc {
  NotConverged,
  Unreachable,
  RecorderInactive,
  IndexOutOfRange,
  TooShort,
  NonUniform,
  NotFound,
  StorageFailure,
  ParseError,
  SingularSystem,
  TooFewDemos,
  DegenerateContexts,
  Empty,
  NoModel,
  InvalidTransition,
  UnknownMessageType,
  PayloadValidation,
  SequenceError,
  TrainingTooSlow,
  PreflightIKFailure,
  EndpointUnreachable,
  EndpointTimeout,
  BindFailure,
  Busy,
  IKFailure,
};

std::string_view to_string(Errc code);

// Single exception type for the library. `index` carries the failing element
// (IK substep, waypoint) when one is meaningful.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(what), code_(code), index_(index) {}

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  Errc code_;
  std::optional<std::size_t> index_;
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::NotConverged: return "NotConverged";
    case Errc::Unreachable: return "Unreachable";
    case Errc::RecorderInactive: return "RecorderInactive";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::TooShort: return "TooShort";
    case Errc::NonUniform: return "NonUniform";
    case Errc::NotFound: return "NotFound";
    case Errc::StorageFailure: return "StorageFailure";
    case Errc::ParseError: return "ParseError";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::TooFewDemos: return "TooFewDemos";
    case Errc::DegenerateContexts: return "DegenerateContexts";
    case Errc::Empty: return "Empty";
    case Errc::NoModel: return "NoModel";
    case Errc::InvalidTransition: return "InvalidTransition";
    case Errc::UnknownMessageType: return "UnknownMessageType";
    case Errc::PayloadValidation: return "PayloadValidation";
    case Errc::SequenceError: return "SequenceError";
    case Errc::TrainingTooSlow: return "TrainingTooSlow";
    case Errc::PreflightIKFailure: return "PreflightIKFailure";
    case Errc::EndpointUnreachable: return "EndpointUnreachable";
    case Errc::EndpointTimeout: return "EndpointTimeout";
    case Errc::BindFailure: return "BindFailure";
    case Errc::Busy: return "Busy";
    case Errc::IKFailure: return "IKFailure";
  }
  return "Unknown";
}

}  // namespace pbd
