#include "pbd/server/executor.hpp"

#include <thread>

#include "pbd/json_io.hpp"

namespace pbd::server {

using nlohmann::json;

std::vector<JointConfig> preflight(const ArmModel& arm, const Trajectory& traj, const JointConfig& seed,
                                   const IKParams& params) {
  if (traj.empty()) throw Error(Errc::PayloadValidation, "trajectory has no waypoints");
  std::vector<JointConfig> joints;
  joints.reserve(traj.size());
  JointConfig q = seed;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    try {
      q = solve_ik(arm, traj.waypoints[i].pose, q, params);
    } catch (const Error& e) {
      throw Error(Errc::PreflightIKFailure, "waypoint " + std::to_string(i) + ": " + e.what(), i);
    }
    joints.push_back(q);
  }
  return joints;
}

json joints_to_json(const JointConfig& q) {
  json out = json::array();
  for (int i = 0; i < kArmDof; ++i) out.push_back(q(i));
  return out;
}

JointConfig joints_from_json(const json& j, const std::string& field) {
  const json& arr = json_io::array(j, field, kArmDof);
  JointConfig q;
  for (int i = 0; i < kArmDof; ++i) q(i) = json_io::number(arr[i], field + "[" + std::to_string(i) + "]");
  return q;
}

json robot_state_payload(std::size_t index, double t, const JointConfig& q) {
  return json{{"index", index}, {"t", t}, {"joints", joints_to_json(q)}};
}

json ExecutionReport::to_json() const {
  json echoed = json::array();
  for (const auto& e : echoes) echoed.push_back(e.seq);
  return json{{"sent", send_times.size()}, {"send_times", send_times}, {"echoed", echoed}};
}

ExecutionReport stream_states(const Trajectory& traj, const std::vector<JointConfig>& joints, TcpStream* stream,
                              const StreamOptions& options) {
  if (joints.size() != traj.size()) {
    throw Error(Errc::PayloadValidation, "joint list does not match the trajectory length");
  }
  using clock = std::chrono::steady_clock;
  ExecutionReport report;
  report.send_times.reserve(traj.size());
  const double t0 = traj.empty() ? 0.0 : traj.waypoints.front().t;
  const auto start = clock::now();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double offset = traj.waypoints[i].t - t0;
    std::this_thread::sleep_until(start + std::chrono::duration_cast<clock::duration>(
                                              std::chrono::duration<double>(offset)));
    if (stream != nullptr) {
      const Envelope env(MessageType::RobotState, i, robot_state_payload(i, traj.waypoints[i].t, joints[i]));
      stream->write_all(encode(env) + "\n");
    }
    report.send_times.push_back(std::chrono::duration<double>(clock::now() - start).count());
  }
  if (stream != nullptr && options.await_echo) {
    const auto deadline = clock::now() + options.echo_timeout;
    while (report.echoes.size() < traj.size()) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
      auto line = left.count() > 0 ? stream->read_line(left) : std::nullopt;
      if (!line) {
        throw Error(Errc::EndpointTimeout, "endpoint echoed " + std::to_string(report.echoes.size()) + " of " +
                                               std::to_string(traj.size()) + " states");
      }
      if (line->empty()) continue;
      report.echoes.push_back(decode(*line));
    }
  }
  return report;
}

ExecutionReport execute_on_robot(const ArmModel& arm, const Trajectory& traj, const Endpoint& endpoint,
                                 const JointConfig& seed, const IKParams& params, const StreamOptions& options) {
  const auto joints = preflight(arm, traj, seed, params);
  TcpStream stream = TcpStream::connect(endpoint);
  return stream_states(traj, joints, &stream, options);
}

}  // namespace pbd::server
