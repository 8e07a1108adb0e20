#include "pbd/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace pbd {

namespace {
// Accept a sample whose wall-clock gap is within this of the period, so
// streams arriving at exact fractions of the period are not dropped by rounding.
constexpr double kGateSlack = 1e-9;
constexpr double kGridTolerance = 1e-6;
}  // namespace

std::string_view to_string(OrientationMode mode) {
  return mode == OrientationMode::Fixed ? "Fixed" : "Captured";
}

std::optional<OrientationMode> orientation_mode_from_string(std::string_view name) {
  if (name == "Fixed") return OrientationMode::Fixed;
  if (name == "Captured") return OrientationMode::Captured;
  return std::nullopt;
}

void validate(const Trajectory& traj) {
  if (!(traj.sample_period > 0.0) || !std::isfinite(traj.sample_period)) {
    throw Error(Errc::PayloadValidation, "sample_period must be positive");
  }
  for (std::size_t i = 0; i < traj.waypoints.size(); ++i) {
    const auto& w = traj.waypoints[i];
    if (!(w.t >= 0.0) || !std::isfinite(w.t)) {
      throw Error(Errc::PayloadValidation, "waypoint " + std::to_string(i) + ": negative time", i);
    }
    if (!w.pose.position.allFinite() || !is_unit(w.pose.orientation)) {
      throw Error(Errc::PayloadValidation, "waypoint " + std::to_string(i) + ": invalid pose", i);
    }
    if (i > 0) {
      const double gap = w.t - traj.waypoints[i - 1].t;
      if (!(gap > 0.0) || std::abs(gap - traj.sample_period) > kGridTolerance) {
        throw Error(Errc::NonUniform, "waypoint " + std::to_string(i) + ": gap off the sample grid", i);
      }
    }
  }
}

bool operator==(const Waypoint& a, const Waypoint& b) {
  return a.t == b.t && a.pose.position == b.pose.position &&
         a.pose.orientation.coeffs() == b.pose.orientation.coeffs();
}

bool operator==(const Trajectory& a, const Trajectory& b) {
  return a.id == b.id && a.sample_period == b.sample_period &&
         a.orientation_mode == b.orientation_mode && a.waypoints == b.waypoints;
}

Recorder::Recorder(RecorderConfig config) : config_(config) {
  if (!(config_.sample_period > 0.0)) {
    throw Error(Errc::PayloadValidation, "sample_period must be positive");
  }
  traj_.sample_period = config_.sample_period;
  traj_.orientation_mode = config_.orientation_mode;
}

void Recorder::start(std::optional<Trajectory> prefix) {
  if (prefix) {
    traj_ = std::move(*prefix);
    traj_.sample_period = config_.sample_period;
  } else {
    traj_ = Trajectory{};
    traj_.sample_period = config_.sample_period;
    traj_.orientation_mode = config_.orientation_mode;
  }
  last_accepted_wall_.reset();
  active_ = true;
}

Trajectory Recorder::stop() {
  active_ = false;
  last_accepted_wall_.reset();
  return traj_;
}

bool Recorder::record_sample(const Pose& pose, double t_wall) {
  if (!active_) throw Error(Errc::RecorderInactive, "recorder is not active");
  if (last_accepted_wall_ && t_wall - *last_accepted_wall_ < config_.sample_period - kGateSlack) {
    return false;
  }
  last_accepted_wall_ = t_wall;
  Waypoint w;
  w.t = static_cast<double>(traj_.waypoints.size()) * config_.sample_period;
  w.pose = pose;
  traj_.waypoints.push_back(w);
  return true;
}

Eigen::Quaterniond tool_down_orientation() {
  // Half turn about world X: tool z maps to -Z, tool x stays +X.
  return Eigen::Quaterniond(0.0, 1.0, 0.0, 0.0);
}

Eigen::Quaterniond palm_down_reference() { return Eigen::Quaterniond::Identity(); }

Eigen::Quaterniond map_hand_orientation(const Eigen::Quaterniond& raw, OrientationMode mode) {
  if (mode == OrientationMode::Fixed) return tool_down_orientation();
  const Eigen::Quaterniond calibration = palm_down_reference().conjugate() * tool_down_orientation();
  return (raw * calibration).normalized();
}

PlaybackCursor step_cursor(const PlaybackCursor& cursor, long delta, std::size_t length) {
  PlaybackCursor out = cursor;
  if (length == 0) {
    out.index = 0;
    return out;
  }
  const long last = static_cast<long>(length) - 1;
  out.index = static_cast<std::size_t>(std::clamp(static_cast<long>(cursor.index) + delta, 0L, last));
  return out;
}

Trajectory redraw_from(const Trajectory& traj, std::size_t cursor_index,
                       const std::vector<Pose>& new_samples) {
  if (cursor_index >= traj.waypoints.size()) {
    throw Error(Errc::IndexOutOfRange, "cursor index " + std::to_string(cursor_index) +
                                           " outside trajectory of length " +
                                           std::to_string(traj.waypoints.size()),
                cursor_index);
  }
  Trajectory out;
  out.id = traj.id;
  out.sample_period = traj.sample_period;
  out.orientation_mode = traj.orientation_mode;
  out.waypoints.assign(traj.waypoints.begin(),
                       traj.waypoints.begin() + static_cast<std::ptrdiff_t>(cursor_index + 1));
  for (std::size_t k = 0; k < new_samples.size(); ++k) {
    Waypoint w;
    w.t = static_cast<double>(cursor_index + 1 + k) * traj.sample_period;
    w.pose = new_samples[k];
    out.waypoints.push_back(w);
  }
  return out;
}

Pose interpolate_at_phase(const Trajectory& traj, double phase) {
  const auto& wps = traj.waypoints;
  if (wps.size() < 2) throw Error(Errc::TooShort, "trajectory needs at least 2 waypoints");
  const double t0 = wps.front().t;
  const double span = wps.back().t - t0;
  if (phase <= 0.0) return wps.front().pose;
  if (phase >= 1.0) return wps.back().pose;

  const double t = t0 + phase * span;
  auto upper = std::upper_bound(wps.begin(), wps.end(), t,
                                [](double value, const Waypoint& w) { return value < w.t; });
  if (upper == wps.end()) return wps.back().pose;
  if (upper == wps.begin()) return wps.front().pose;
  const Waypoint& b = *upper;
  const Waypoint& a = *(upper - 1);
  const double s = (t - a.t) / (b.t - a.t);
  Pose out;
  out.position = a.pose.position + s * (b.pose.position - a.pose.position);
  out.orientation = a.pose.orientation.slerp(s, b.pose.orientation).normalized();
  return out;
}

std::vector<PhasePose> resample_phase(const Trajectory& traj, std::size_t n) {
  if (traj.waypoints.size() < 2) throw Error(Errc::TooShort, "trajectory needs at least 2 waypoints");
  if (n < 2) throw Error(Errc::TooShort, "resample count must be at least 2");
  std::vector<PhasePose> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double phase = static_cast<double>(k) / static_cast<double>(n - 1);
    out[k] = PhasePose{phase, interpolate_at_phase(traj, phase)};
  }
  return out;
}

}  // namespace pbd
