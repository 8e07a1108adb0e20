#include "pbd/metrics.hpp"

#include <cmath>

namespace pbd::metrics {

namespace {

void require_length(const Trajectory& traj, std::size_t n) {
  if (traj.size() < n) {
    throw Error(Errc::TooShort, "metric needs at least " + std::to_string(n) + " waypoints, got " +
                                    std::to_string(traj.size()));
  }
}

double uniform_step(const Trajectory& traj) {
  const auto& w = traj.waypoints;
  const double dt = w[1].t - w[0].t;
  if (!(dt > 0.0)) throw Error(Errc::NonUniform, "timestamps are not increasing");
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (std::abs((w[i].t - w[i - 1].t) - dt) > 1e-6) {
      throw Error(Errc::NonUniform, "timestamp gap at waypoint " + std::to_string(i) + " differs", i);
    }
  }
  return dt;
}

}  // namespace

double mean_jerk(const Trajectory& traj) {
  require_length(traj, 4);
  const double dt = uniform_step(traj);
  const auto& w = traj.waypoints;
  // Four-point stencil, centered between samples i+1 and i+2; exact on cubics.
  const double scale = 1.0 / (dt * dt * dt);
  double total = 0.0;
  const std::size_t count = w.size() - 3;
  for (std::size_t i = 0; i < count; ++i) {
    const Eigen::Vector3d jerk = (w[i + 3].pose.position - 3.0 * w[i + 2].pose.position +
                                  3.0 * w[i + 1].pose.position - w[i].pose.position) *
                                 scale;
    total += jerk.norm();
  }
  return total / static_cast<double>(count);
}

double deviation(const Trajectory& traj) {
  require_length(traj, 2);
  const auto& w = traj.waypoints;
  const Eigen::Vector3d start = w.front().pose.position;
  const Eigen::Vector3d chord = w.back().pose.position - start;
  const double length = chord.norm();
  double total = 0.0;
  for (const auto& wp : w) {
    const Eigen::Vector3d rel = wp.pose.position - start;
    total += length > 0.0 ? rel.cross(chord).norm() / length : rel.norm();
  }
  return total / static_cast<double>(w.size());
}

double variation(const Trajectory& traj) {
  require_length(traj, 2);
  const auto& w = traj.waypoints;
  double total = 0.0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    total += (w[i].pose.position - w[i - 1].pose.position).squaredNorm();
  }
  return total;
}

double mse(const Trajectory& a, const Trajectory& b, std::size_t n) {
  require_length(a, 2);
  require_length(b, 2);
  const auto ra = resample_phase(a, n);
  const auto rb = resample_phase(b, n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += (ra[i].pose.position - rb[i].pose.position).squaredNorm();
  return total / static_cast<double>(n);
}

SmoothnessReport smoothness(const Trajectory& traj) {
  return SmoothnessReport{mean_jerk(traj), deviation(traj), variation(traj)};
}

}  // namespace pbd::metrics
