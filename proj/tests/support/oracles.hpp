#pragma once

// Reference computations used only by tests. They deliberately avoid the
// library's code paths (no dh_transform, no closed-form distance).

#include <array>
#include <cmath>
#include <random>

#include "pbd/kinematics.hpp"
#include "pbd/scene.hpp"
#include "pbd/trajectory.hpp"

namespace pbd::oracle {

inline Eigen::Matrix4d rot_z(double t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 0) = std::cos(t); m(0, 1) = -std::sin(t);
  m(1, 0) = std::sin(t); m(1, 1) = std::cos(t);
  return m;
}

inline Eigen::Matrix4d rot_x(double t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(1, 1) = std::cos(t); m(1, 2) = -std::sin(t);
  m(2, 1) = std::sin(t); m(2, 2) = std::cos(t);
  return m;
}

inline Eigen::Matrix4d trans(double x, double y, double z) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 3) = x; m(1, 3) = y; m(2, 3) = z;
  return m;
}

/// Product of elementary DH factors Rz Tz Tx Rx per joint, prefixed by the base.
inline Eigen::Matrix4d dh_chain(const ArmModel& arm, const JointConfig& q) {
  Eigen::Matrix4d m = trans(arm.base.translation.x(), arm.base.translation.y(), arm.base.translation.z());
  Eigen::Matrix4d r = Eigen::Matrix4d::Identity();
  r.topLeftCorner<3, 3>() = arm.base.rotation.toRotationMatrix();
  m = m * r;
  for (int i = 0; i < kArmDof; ++i) {
    const auto& row = arm.rows[i];
    m = m * rot_z(q[i] + row.theta_offset) * trans(0, 0, row.d) * trans(row.a, 0, 0) * rot_x(row.alpha);
  }
  return m;
}

/// Vee of the skew part of a small relative rotation.
inline Eigen::Vector3d log_so3(const Eigen::Matrix3d& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.angle() * aa.axis();
}

/// Central finite-difference Jacobian from the matrix-chain oracle.
inline Matrix6d finite_difference_jacobian(const ArmModel& arm, const JointConfig& q, double step = 1e-6) {
  Matrix6d jac;
  for (int i = 0; i < kArmDof; ++i) {
    JointConfig plus = q, minus = q;
    plus[i] += step;
    minus[i] -= step;
    const Eigen::Matrix4d tp = dh_chain(arm, plus);
    const Eigen::Matrix4d tm = dh_chain(arm, minus);
    jac.block<3, 1>(0, i) = (tp.topRightCorner<3, 1>() - tm.topRightCorner<3, 1>()) / (2.0 * step);
    const Eigen::Matrix3d rel = tp.topLeftCorner<3, 3>() * tm.topLeftCorner<3, 3>().transpose();
    jac.block<3, 1>(3, i) = log_so3(rel) / (2.0 * step);
  }
  return jac;
}

inline JointConfig random_config(const ArmModel& arm, std::mt19937_64& rng, double shrink = 0.0) {
  JointConfig q;
  for (int i = 0; i < kArmDof; ++i) {
    const auto& l = arm.joint_limits[i];
    std::uniform_real_distribution<double> dist(l.min + shrink, l.max - shrink);
    q[i] = dist(rng);
  }
  return q;
}

/// Brute-force segment/box distance: dense scan then golden-section refinement
/// of the convex distance along the segment.
inline double segment_box_distance_scan(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const SceneBox& box) {
  auto dist = [&](double s) {
    const Eigen::Vector3d p = a + s * (b - a);
    double sq = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double lo = box.center[k] - box.half_extents[k];
      const double hi = box.center[k] + box.half_extents[k];
      const double e = p[k] < lo ? lo - p[k] : (p[k] > hi ? p[k] - hi : 0.0);
      sq += e * e;
    }
    return std::sqrt(sq);
  };
  const int samples = 2000;
  int best_i = 0;
  for (int i = 1; i <= samples; ++i) {
    if (dist(double(i) / samples) < dist(double(best_i) / samples)) best_i = i;
  }
  double lo = std::max(0.0, double(best_i - 1) / samples);
  double hi = std::min(1.0, double(best_i + 1) / samples);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    if (dist(c) < dist(d)) hi = d; else lo = c;
  }
  return std::min({dist(0.0), dist(1.0), dist(0.5 * (lo + hi))});
}

/// Uniform-grid trajectory from a position function of time.
template <typename F>
Trajectory grid_trajectory(F&& position, std::size_t n, double period) {
  Trajectory traj;
  traj.sample_period = period;
  for (std::size_t i = 0; i < n; ++i) {
    Waypoint w;
    w.t = static_cast<double>(i) * period;
    w.pose.position = position(w.t);
    w.pose.orientation = tool_down_orientation();
    traj.waypoints.push_back(w);
  }
  return traj;
}

/// Minimum-jerk blend 10s^3 - 15s^4 + 6s^5 between two points.
inline Eigen::Vector3d minimum_jerk(const Eigen::Vector3d& from, const Eigen::Vector3d& to, double s) {
  const double b = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
  return from + b * (to - from);
}

}  // namespace pbd::oracle
