#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pbd/error.hpp"
#include "pbd/geometry.hpp"

namespace pbd {

inline constexpr int kArmDof = 6;

using JointConfig = Vector6d;
using Jacobian = Matrix6d;

/// Standard Denavit-Hartenberg row: Rz(theta_offset + q) Tz(d) Tx(a) Rx(alpha).
struct DHRow {
  double theta_offset = 0.0;
  double d = 0.0;
  double a = 0.0;
  double alpha = 0.0;
};

struct JointLimit {
  double min = -M_PI;
  double max = M_PI;
};

/// Collision capsule attached to a link frame. `link` indexes the frame after
/// joint `link` (0 is the base frame); endpoints are in that frame.
struct LinkCapsule {
  int link = 0;
  double radius = 0.0;
  Eigen::Vector3d from = Eigen::Vector3d::Zero();
  Eigen::Vector3d to = Eigen::Vector3d::Zero();
};

struct ArmModel {
  std::string name;
  std::array<DHRow, kArmDof> rows{};
  std::array<JointLimit, kArmDof> joint_limits{};
  RigidTransform base;
  std::vector<LinkCapsule> link_capsules;
  JointConfig home = JointConfig::Zero();

  /// Radius of the ball around the base that contains every reachable point.
  double reach() const;
  bool within_limits(const JointConfig& q) const;
  JointConfig clamp_to_limits(const JointConfig& q) const;
};

/// Throws Error(ParseError) naming the offending field on malformed input.
void validate(const ArmModel& arm);

struct IKParams {
  int max_iterations = 200;
  double position_tol = 1e-4;
  double orientation_tol = 1e-3;
  double damping = 0.05;
  double step_clamp = 0.2;
};

template <typename Scalar>
Matrix4<Scalar> dh_transform(const DHRow& row, Scalar q) {
  using std::cos;
  using std::sin;
  const Scalar theta = q + Scalar(row.theta_offset);
  const Scalar ct = cos(theta), st = sin(theta);
  const Scalar ca = Scalar(std::cos(row.alpha)), sa = Scalar(std::sin(row.alpha));
  Matrix4<Scalar> m;
  m << ct, -st * ca, st * sa, Scalar(row.a) * ct,
       st, ct * ca, -ct * sa, Scalar(row.a) * st,
       Scalar(0), sa, ca, Scalar(row.d),
       Scalar(0), Scalar(0), Scalar(0), Scalar(1);
  return m;
}

/// Frame chain: element 0 is the base frame, element i the frame after joint i.
template <typename Scalar>
std::array<Matrix4<Scalar>, kArmDof + 1> link_frames(const ArmModel& arm,
                                                     const Eigen::Matrix<Scalar, 6, 1>& q) {
  std::array<Matrix4<Scalar>, kArmDof + 1> frames;
  frames[0] = arm.base.matrix().template cast<Scalar>();
  for (int i = 0; i < kArmDof; ++i) {
    frames[i + 1] = frames[i] * dh_transform(arm.rows[i], q[i]);
  }
  return frames;
}

Pose forward_kinematics(const ArmModel& arm, const JointConfig& q);

/// Geometric Jacobian; rows 0-2 linear velocity, rows 3-5 angular velocity.
Jacobian jacobian(const ArmModel& arm, const JointConfig& q);

/// Damped least-squares IK with joint-limit projection.
/// Throws Error(Unreachable) when the target lies outside the reach ball and
/// Error(NotConverged) when the iteration budget runs out.
JointConfig solve_ik(const ArmModel& arm, const Pose& target, const JointConfig& seed,
                     const IKParams& params = {});

/// Solves IK along a straight-line (slerp for orientation) segment from
/// FK(from_q) to `to_pose`. Failures throw Error(NotConverged) whose index()
/// is the failing substep.
std::vector<JointConfig> solve_ik_segment(const ArmModel& arm, const JointConfig& from_q,
                                          const Pose& to_pose, int substeps,
                                          const IKParams& params = {});

ArmModel arm_from_json(const nlohmann::json& doc);
nlohmann::json arm_to_json(const ArmModel& arm);
ArmModel load_arm_file(const std::filesystem::path& path);

}  // namespace pbd
