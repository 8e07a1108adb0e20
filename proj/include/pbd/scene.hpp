#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pbd/geometry.hpp"
#include "pbd/kinematics.hpp"

namespace pbd {

/// Axis-aligned obstacle box in the world frame.
struct SceneBox {
  std::string id;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_extents = Eigen::Vector3d::Constant(0.5);
  std::string label;

  Eigen::Vector3d min() const { return center - half_extents; }
  Eigen::Vector3d max() const { return center + half_extents; }
};

struct Marker {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double timestamp = 0.0;
};

struct Scene {
  std::vector<SceneBox> boxes;
  /// Controller-mount to robot-base offset used by auto-calibration.
  RigidTransform calibration_offset;
  /// Tracked controller pose; when present the arm base is calibrated from it.
  std::optional<RigidTransform> controller;
};

/// base = controller * offset.
RigidTransform auto_calibrate(const RigidTransform& controller, const RigidTransform& offset);

double point_box_distance(const Eigen::Vector3d& p, const SceneBox& box);

/// Exact minimum distance between segment [a, b] and a box (0 when they touch).
double segment_box_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const SceneBox& box);

struct CollisionPair {
  int link = 0;
  std::string box_id;

  bool operator==(const CollisionPair&) const = default;
};

/// Capsule segment endpoints in world coordinates for configuration q.
std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> capsule_segments(const ArmModel& arm,
                                                                          const JointConfig& q);

/// Every (link, box) pair whose capsule axis is strictly closer to the box than
/// the capsule radius. Reports only; callers decide what a hit means.
std::vector<CollisionPair> collision_check(const ArmModel& arm, const JointConfig& q,
                                           std::span<const SceneBox> scene);

struct CalibrationError {
  double mean = 0.0;
  double sd = 0.0;  // population standard deviation
};

/// Throws Error(Empty) with no measurements.
CalibrationError calibration_error(std::span<const Eigen::Vector3d> measured, const Eigen::Vector3d& reference);

nlohmann::json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& doc);
Scene load_scene_file(const std::filesystem::path& path);

}  // namespace pbd
