#include "pbd/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace pbd {

double ArmModel::reach() const {
  double total = 0.0;
  for (const auto& row : rows) total += std::abs(row.a) + std::abs(row.d);
  return total;
}

bool ArmModel::within_limits(const JointConfig& q) const {
  for (int i = 0; i < kArmDof; ++i) {
    if (q[i] < joint_limits[i].min || q[i] > joint_limits[i].max) return false;
  }
  return true;
}

JointConfig ArmModel::clamp_to_limits(const JointConfig& q) const {
  JointConfig out;
  for (int i = 0; i < kArmDof; ++i) out[i] = std::clamp(q[i], joint_limits[i].min, joint_limits[i].max);
  return out;
}

void validate(const ArmModel& arm) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(Errc::ParseError, field + ": " + why);
  };
  for (int i = 0; i < kArmDof; ++i) {
    const auto& r = arm.rows[i];
    const std::string f = "dh[" + std::to_string(i) + "]";
    if (!std::isfinite(r.theta_offset) || !std::isfinite(r.d) || !std::isfinite(r.a) ||
        !std::isfinite(r.alpha)) {
      fail(f, "non-finite parameter");
    }
    const auto& l = arm.joint_limits[i];
    if (!(l.min < l.max)) fail("limits[" + std::to_string(i) + "]", "min must be below max");
  }
  for (std::size_t c = 0; c < arm.link_capsules.size(); ++c) {
    const auto& cap = arm.link_capsules[c];
    const std::string f = "capsules[" + std::to_string(c) + "]";
    if (!(cap.radius > 0.0)) fail(f + ".radius", "must be positive");
    if (cap.link < 0 || cap.link > kArmDof) fail(f + ".link", "must be in [0, 6]");
  }
  if (!is_unit(arm.base.rotation)) fail("base.rotation", "quaternion is not unit norm");
}

Pose forward_kinematics(const ArmModel& arm, const JointConfig& q) {
  Matrix4<double> m = arm.base.matrix();
  for (int i = 0; i < kArmDof; ++i) m = m * dh_transform(arm.rows[i], q[i]);
  Pose pose;
  pose.position = m.topRightCorner<3, 1>();
  pose.orientation = Eigen::Quaterniond(Eigen::Matrix3d(m.topLeftCorner<3, 3>())).normalized();
  return pose;
}

Jacobian jacobian(const ArmModel& arm, const JointConfig& q) {
  const auto frames = link_frames<double>(arm, q);
  const Eigen::Vector3d tip = frames[kArmDof].topRightCorner<3, 1>();
  Jacobian jac;
  for (int i = 0; i < kArmDof; ++i) {
    // Joint i+1 rotates about the z axis of frame i.
    const Eigen::Vector3d axis = frames[i].block<3, 1>(0, 2);
    const Eigen::Vector3d origin = frames[i].topRightCorner<3, 1>();
    jac.block<3, 1>(0, i) = axis.cross(tip - origin);
    jac.block<3, 1>(3, i) = axis;
  }
  return jac;
}

namespace {

bool converged(const Pose& current, const Pose& target, const IKParams& params) {
  return (target.position - current.position).norm() <= params.position_tol &&
         orientation_distance(current.orientation, target.orientation) <= params.orientation_tol;
}

}  // namespace

JointConfig solve_ik(const ArmModel& arm, const Pose& target, const JointConfig& seed,
                     const IKParams& params) {
  if ((target.position - arm.base.translation).norm() > arm.reach()) {
    throw Error(Errc::Unreachable, "target is outside the arm's reach");
  }
  JointConfig q = arm.clamp_to_limits(seed);
  const double lambda_sq = params.damping * params.damping;
  for (int iter = 0; iter < params.max_iterations; ++iter) {
    const Pose current = forward_kinematics(arm, q);
    if (converged(current, target, params)) return q;

    Vector6d err;
    err.head<3>() = target.position - current.position;
    err.tail<3>() = rotation_error(current.orientation, target.orientation);

    const Jacobian jac = jacobian(arm, q);
    const Matrix6d jjt = jac * jac.transpose() + lambda_sq * Matrix6d::Identity();
    Vector6d step = jac.transpose() * jjt.ldlt().solve(err);

    const double largest = step.cwiseAbs().maxCoeff();
    if (largest > params.step_clamp) step *= params.step_clamp / largest;
    q = arm.clamp_to_limits(q + step);
  }
  if (converged(forward_kinematics(arm, q), target, params)) return q;
  throw Error(Errc::NotConverged, "IK did not converge within " +
                                      std::to_string(params.max_iterations) + " iterations");
}

std::vector<JointConfig> solve_ik_segment(const ArmModel& arm, const JointConfig& from_q,
                                          const Pose& to_pose, int substeps,
                                          const IKParams& params) {
  if (substeps < 1) throw Error(Errc::IndexOutOfRange, "substeps must be >= 1");
  const Pose start = forward_kinematics(arm, from_q);
  std::vector<JointConfig> out;
  out.reserve(static_cast<std::size_t>(substeps));
  JointConfig seed = from_q;
  for (int k = 1; k <= substeps; ++k) {
    const double s = static_cast<double>(k) / substeps;
    Pose waypoint;
    waypoint.position = (1.0 - s) * start.position + s * to_pose.position;
    waypoint.orientation = start.orientation.slerp(s, to_pose.orientation).normalized();
    try {
      seed = solve_ik(arm, waypoint, seed, params);
    } catch (const Error& e) {
      throw Error(Errc::NotConverged,
                  "segment substep " + std::to_string(k - 1) + ": " + e.what(),
                  static_cast<std::size_t>(k - 1));
    }
    out.push_back(seed);
  }
  return out;
}

}  // namespace pbd
