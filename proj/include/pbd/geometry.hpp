#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>

namespace pbd {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;
template <typename Scalar>
using Quaternion = Eigen::Quaternion<Scalar>;

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Rigid placement: translation followed by rotation, p_world = R p + t.
template <typename Scalar>
struct BasicRigidTransform {
  Vector3<Scalar> translation = Vector3<Scalar>::Zero();
  Quaternion<Scalar> rotation = Quaternion<Scalar>::Identity();

  static BasicRigidTransform Identity() { return {}; }

  Matrix4<Scalar> matrix() const {
    Matrix4<Scalar> m = Matrix4<Scalar>::Identity();
    m.template topLeftCorner<3, 3>() = rotation.toRotationMatrix();
    m.template topRightCorner<3, 1>() = translation;
    return m;
  }

  Vector3<Scalar> apply(const Vector3<Scalar>& p) const { return rotation * p + translation; }

  static BasicRigidTransform FromMatrix(const Matrix4<Scalar>& m) {
    BasicRigidTransform out;
    out.translation = m.template topRightCorner<3, 1>();
    out.rotation = Quaternion<Scalar>(Matrix3<Scalar>(m.template topLeftCorner<3, 3>()));
    out.rotation.normalize();
    return out;
  }
};

/// End-effector placement. Same layout as a rigid transform; kept as a
/// distinct type since it names a tool pose rather than a frame change.
template <typename Scalar>
struct BasicPose {
  Vector3<Scalar> position = Vector3<Scalar>::Zero();
  Quaternion<Scalar> orientation = Quaternion<Scalar>::Identity();
};

using RigidTransform = BasicRigidTransform<double>;
using Pose = BasicPose<double>;

template <typename Scalar>
BasicRigidTransform<Scalar> compose(const BasicRigidTransform<Scalar>& a,
                                    const BasicRigidTransform<Scalar>& b) {
  BasicRigidTransform<Scalar> out;
  out.translation = a.translation + a.rotation * b.translation;
  out.rotation = (a.rotation * b.rotation).normalized();
  return out;
}

template <typename Scalar>
BasicRigidTransform<Scalar> invert(const BasicRigidTransform<Scalar>& a) {
  BasicRigidTransform<Scalar> out;
  out.rotation = a.rotation.conjugate().normalized();
  out.translation = -(out.rotation * a.translation);
  return out;
}

/// Shortest-arc angle between two orientations (double cover resolved).
template <typename Scalar>
Scalar orientation_distance(const Quaternion<Scalar>& a, const Quaternion<Scalar>& b) {
  Quaternion<Scalar> rel = a.conjugate() * b;
  if (rel.w() < Scalar(0)) rel.coeffs() = -rel.coeffs();
  using std::atan2;
  return Scalar(2) * atan2(rel.vec().norm(), rel.w());
}

/// Rotation vector (axis * angle) taking `from` to `to`, expressed in the world frame.
template <typename Scalar>
Vector3<Scalar> rotation_error(const Quaternion<Scalar>& from, const Quaternion<Scalar>& to) {
  Quaternion<Scalar> rel = to * from.conjugate();
  if (rel.w() < Scalar(0)) rel.coeffs() = -rel.coeffs();
  using std::atan2;
  const Scalar s = rel.vec().norm();
  if (s < Scalar(1e-15)) return Scalar(2) * rel.vec();
  return (Scalar(2) * atan2(s, rel.w()) / s) * rel.vec();
}

inline bool is_unit(const Eigen::Quaterniond& q, double tol = 1e-9) {
  return std::abs(q.norm() - 1.0) <= tol;
}

}  // namespace pbd
