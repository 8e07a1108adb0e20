#pragma once

#include <chrono>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "pbd/kinematics.hpp"
#include "pbd/server/net.hpp"
#include "pbd/server/protocol.hpp"
#include "pbd/trajectory.hpp"

namespace pbd::server {

/// Joint configuration for every waypoint, each solve seeded with the previous
/// one. Throws Error(PreflightIKFailure) whose index() is the first failing waypoint.
std::vector<JointConfig> preflight(const ArmModel& arm, const Trajectory& traj, const JointConfig& seed,
                                   const IKParams& params = {});

nlohmann::json joints_to_json(const JointConfig& q);
JointConfig joints_from_json(const nlohmann::json& j, const std::string& field);

/// RobotState payload for one streamed waypoint: {index, t, joints}.
nlohmann::json robot_state_payload(std::size_t index, double t, const JointConfig& q);

struct StreamOptions {
  /// Wait for one echo per state after the last send. Raises EndpointTimeout
  /// when they do not all arrive within `echo_timeout`.
  bool await_echo = true;
  std::chrono::milliseconds echo_timeout{2000};
};

struct ExecutionReport {
  /// Send time of each waypoint, seconds after the stream started.
  std::vector<double> send_times;
  /// Echoes returned by the endpoint, in arrival order.
  std::vector<Envelope> echoes;

  nlohmann::json to_json() const;
};

/// Streams one RobotState per waypoint at its timestamp. A null stream runs
/// the same schedule without sending (simulated execution).
ExecutionReport stream_states(const Trajectory& traj, const std::vector<JointConfig>& joints, TcpStream* stream,
                              const StreamOptions& options = {});

/// Preflight, connect, stream. Nothing is sent unless preflight succeeds.
ExecutionReport execute_on_robot(const ArmModel& arm, const Trajectory& traj, const Endpoint& endpoint,
                                 const JointConfig& seed, const IKParams& params = {},
                                 const StreamOptions& options = {});

}  // namespace pbd::server
