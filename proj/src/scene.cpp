#include "pbd/scene.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "pbd/json_io.hpp"

namespace pbd {

using nlohmann::json;
namespace jio = json_io;

RigidTransform auto_calibrate(const RigidTransform& controller, const RigidTransform& offset) {
  return compose(controller, offset);
}

double point_box_distance(const Eigen::Vector3d& p, const SceneBox& box) {
  const Eigen::Vector3d outside =
      (box.min() - p).cwiseMax(p - box.max()).cwiseMax(Eigen::Vector3d::Zero());
  return outside.norm();
}

double segment_box_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const SceneBox& box) {
  const Eigen::Vector3d lo = box.min();
  const Eigen::Vector3d hi = box.max();
  const Eigen::Vector3d dir = b - a;

  // The squared distance is convex and piecewise quadratic in s; pieces change
  // where the segment crosses a slab boundary.
  std::vector<double> breaks{0.0, 1.0};
  for (int k = 0; k < 3; ++k) {
    if (dir[k] == 0.0) continue;
    for (double bound : {lo[k], hi[k]}) {
      const double s = (bound - a[k]) / dir[k];
      if (s > 0.0 && s < 1.0) breaks.push_back(s);
    }
  }
  std::sort(breaks.begin(), breaks.end());

  double best = std::min(point_box_distance(a, box), point_box_distance(b, box));
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double s0 = breaks[i], s1 = breaks[i + 1];
    if (!(s1 > s0)) continue;
    const Eigen::Vector3d mid = a + 0.5 * (s0 + s1) * dir;
    double quad = 0.0, lin = 0.0;
    for (int k = 0; k < 3; ++k) {
      double bound;
      if (mid[k] < lo[k]) {
        bound = lo[k];
      } else if (mid[k] > hi[k]) {
        bound = hi[k];
      } else {
        continue;
      }
      quad += dir[k] * dir[k];
      lin += 2.0 * dir[k] * (a[k] - bound);
    }
    double s = quad > 0.0 ? -lin / (2.0 * quad) : s0;
    s = std::clamp(s, s0, s1);
    best = std::min(best, point_box_distance(a + s * dir, box));
  }
  return best;
}

std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> capsule_segments(const ArmModel& arm,
                                                                          const JointConfig& q) {
  const auto frames = link_frames<double>(arm, q);
  std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> out;
  out.reserve(arm.link_capsules.size());
  for (const auto& cap : arm.link_capsules) {
    const auto& f = frames[static_cast<std::size_t>(cap.link)];
    const Eigen::Matrix3d r = f.topLeftCorner<3, 3>();
    const Eigen::Vector3d t = f.topRightCorner<3, 1>();
    out.emplace_back(r * cap.from + t, r * cap.to + t);
  }
  return out;
}

std::vector<CollisionPair> collision_check(const ArmModel& arm, const JointConfig& q,
                                           std::span<const SceneBox> scene) {
  const auto segments = capsule_segments(arm, q);
  std::vector<CollisionPair> hits;
  for (std::size_t c = 0; c < segments.size(); ++c) {
    const auto& cap = arm.link_capsules[c];
    for (const auto& box : scene) {
      if (segment_box_distance(segments[c].first, segments[c].second, box) < cap.radius) {
        CollisionPair pair{cap.link, box.id};
        if (std::find(hits.begin(), hits.end(), pair) == hits.end()) hits.push_back(std::move(pair));
      }
    }
  }
  return hits;
}

CalibrationError calibration_error(std::span<const Eigen::Vector3d> measured, const Eigen::Vector3d& reference) {
  if (measured.empty()) throw Error(Errc::Empty, "no calibration measurements");
  const double n = static_cast<double>(measured.size());
  double sum = 0.0;
  for (const auto& m : measured) sum += (m - reference).norm();
  const double mean = sum / n;
  double sq = 0.0;
  for (const auto& m : measured) {
    const double d = (m - reference).norm() - mean;
    sq += d * d;
  }
  return CalibrationError{mean, std::sqrt(sq / n)};
}

json scene_to_json(const Scene& scene) {
  json boxes = json::array();
  for (const auto& b : scene.boxes) {
    boxes.push_back({{"id", b.id},
                     {"center", jio::to_json(b.center)},
                     {"half_extents", jio::to_json(b.half_extents)},
                     {"label", b.label}});
  }
  json doc{{"boxes", boxes}, {"calibration_offset", jio::to_json(scene.calibration_offset)}};
  if (scene.controller) doc["controller"] = jio::to_json(*scene.controller);
  return doc;
}

Scene scene_from_json(const json& doc) {
  Scene scene;
  const json& boxes = jio::array(jio::require(doc, "boxes", ""), "boxes");
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const std::string ctx = "boxes[" + std::to_string(i) + "]";
    SceneBox box;
    const json& id = jio::require(boxes[i], "id", ctx);
    if (!id.is_string()) jio::fail(ctx + ".id", "expected string");
    box.id = id.get<std::string>();
    box.center = jio::vec3(jio::require(boxes[i], "center", ctx), ctx + ".center");
    box.half_extents = jio::vec3(jio::require(boxes[i], "half_extents", ctx), ctx + ".half_extents");
    if (!(box.half_extents.array() > 0.0).all()) jio::fail(ctx + ".half_extents", "must be positive");
    if (boxes[i].contains("label") && boxes[i]["label"].is_string()) box.label = boxes[i]["label"].get<std::string>();
    scene.boxes.push_back(std::move(box));
  }
  if (doc.contains("calibration_offset")) {
    scene.calibration_offset = jio::transform(doc["calibration_offset"], "calibration_offset");
  }
  if (doc.contains("controller")) scene.controller = jio::transform(doc["controller"], "controller");
  return scene;
}

Scene load_scene_file(const std::filesystem::path& path) {
  return scene_from_json(jio::read_file(path));
}

}  // namespace pbd
