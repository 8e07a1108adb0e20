#include <doctest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "pbd/scene.hpp"
#include "support/arms.hpp"
#include "support/oracles.hpp"

using namespace pbd;

namespace {

RigidTransform random_transform(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  RigidTransform t;
  t.translation = Eigen::Vector3d(g(rng), g(rng), g(rng));
  t.rotation = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized();
  return t;
}

bool near(const RigidTransform& a, const RigidTransform& b, double tol) {
  return (a.translation - b.translation).norm() <= tol && orientation_distance(a.rotation, b.rotation) <= tol;
}

/// Planar two-link arm: link 1 along x of length 1 at q = 0, capsule on frame 1.
ArmModel capsule_arm(double radius) {
  ArmModel arm = test::planar_one_link();
  arm.link_capsules.push_back(LinkCapsule{1, radius, Eigen::Vector3d(-1, 0, 0), Eigen::Vector3d(0, 0, 0)});
  return arm;
}

}  // namespace

TEST_CASE("rigid transform algebra") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    const RigidTransform x = random_transform(rng);
    CHECK(near(compose(RigidTransform::Identity(), x), x, 1e-15));
    CHECK(near(invert(invert(x)), x, 1e-12));
    CHECK(near(compose(x, invert(x)), RigidTransform::Identity(), 1e-12));
    const RigidTransform y = compose(x, random_transform(rng));
    CHECK(is_unit(y.rotation));
    CHECK(is_unit(invert(y).rotation));
  }
}

TEST_CASE("translation followed by yaw matches the matrix product") {
  RigidTransform shift;
  shift.translation = Eigen::Vector3d(1, 0, 0);
  RigidTransform yaw;
  yaw.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitZ()));
  const Eigen::Matrix4d expected = oracle::trans(1, 0, 0) * oracle::rot_z(M_PI / 2);
  CHECK((compose(shift, yaw).matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
  const Eigen::Matrix4d other = oracle::rot_z(M_PI / 2) * oracle::trans(1, 0, 0);
  CHECK((compose(yaw, shift).matrix() - other).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("auto calibration") {
  std::mt19937_64 rng(13);
  const RigidTransform controller = random_transform(rng);
  CHECK(near(auto_calibrate(controller, RigidTransform::Identity()), controller, 1e-15));

  RigidTransform offset;
  offset.translation = Eigen::Vector3d(0.1, -0.05, 0.2);
  const RigidTransform base = auto_calibrate(controller, offset);
  CHECK((base.translation - (controller.translation + controller.rotation * offset.translation)).norm() < 1e-15);
  CHECK(orientation_distance(base.rotation, controller.rotation) < 1e-12);

  const RigidTransform again = auto_calibrate(controller, offset);
  CHECK(base.translation == again.translation);
  CHECK(base.rotation.coeffs() == again.rotation.coeffs());

  for (int i = 0; i < 20; ++i) {
    RigidTransform pre;
    pre.rotation = random_transform(rng).rotation;
    const RigidTransform off = random_transform(rng);
    CHECK(near(auto_calibrate(compose(pre, controller), off), compose(pre, auto_calibrate(controller, off)), 1e-12));
  }
}

TEST_CASE("segment box distance agrees with a scan") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2.0, 2.0), e(0.05, 0.8);
  for (int i = 0; i < 200; ++i) {
    SceneBox box{"b", Eigen::Vector3d(u(rng), u(rng), u(rng)), Eigen::Vector3d(e(rng), e(rng), e(rng)), ""};
    const Eigen::Vector3d a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng));
    CHECK(segment_box_distance(a, b, box) == doctest::Approx(oracle::segment_box_distance_scan(a, b, box)).epsilon(1e-9).scale(1.0));
  }
  // Degenerate segment is a point.
  SceneBox unit{"u", Eigen::Vector3d::Zero(), Eigen::Vector3d::Constant(0.5), ""};
  CHECK(segment_box_distance(Eigen::Vector3d(1.5, 0, 0), Eigen::Vector3d(1.5, 0, 0), unit) == 1.0);
}

TEST_CASE("collision check") {
  const ArmModel arm = capsule_arm(0.25);
  const JointConfig q = JointConfig::Zero();
  SUBCASE("far box") {
    const std::vector<SceneBox> scene{{"far", Eigen::Vector3d(10, 0, 0), Eigen::Vector3d::Constant(0.5), ""}};
    CHECK(collision_check(arm, q, scene).empty());
  }
  SUBCASE("box on the link midpoint") {
    const std::vector<SceneBox> scene{{"mid", Eigen::Vector3d(0.5, 0, 0), Eigen::Vector3d::Constant(0.05), ""}};
    const auto hits = collision_check(arm, q, scene);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0] == CollisionPair{1, "mid"});
  }
  SUBCASE("tangent box is not reported") {
    // Link runs along y = 0; box face at y = -0.25 is exactly one radius away.
    const SceneBox box{"tangent", Eigen::Vector3d(0.5, -0.5, 0), Eigen::Vector3d(0.25, 0.25, 0.25), ""};
    const auto seg = capsule_segments(arm, q)[0];
    CHECK(oracle::segment_box_distance_scan(seg.first, seg.second, box) == 0.25);
    CHECK(segment_box_distance(seg.first, seg.second, box) == 0.25);
    const std::vector<SceneBox> scene{box};
    CHECK(collision_check(arm, q, scene).empty());
    CHECK(collision_check(capsule_arm(0.25 + 1e-9), q, scene).size() == 1);
  }
  SUBCASE("monotone in radius") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(-1.5, 1.5), e(0.05, 0.3), r(0.01, 0.3);
    ArmModel ur = test::ur10();
    for (int s = 0; s < 50; ++s) {
      std::vector<SceneBox> scene;
      for (int b = 0; b < 6; ++b) {
        scene.push_back({"b" + std::to_string(b), Eigen::Vector3d(u(rng), u(rng), u(rng)), Eigen::Vector3d(e(rng), e(rng), e(rng)), ""});
      }
      const JointConfig qs = oracle::random_config(ur, rng);
      ArmModel grown = ur;
      for (auto& c : grown.link_capsules) c.radius += r(rng);
      const auto small = collision_check(ur, qs, scene);
      const auto large = collision_check(grown, qs, scene);
      for (const auto& hit : small) CHECK(std::find(large.begin(), large.end(), hit) != large.end());
    }
  }
}

TEST_CASE("calibration error") {
  const Eigen::Vector3d ref(0.1, 0.2, 0.3);
  SUBCASE("exact") {
    const std::vector<Eigen::Vector3d> m(4, ref);
    const auto err = calibration_error(m, ref);
    CHECK(err.mean == 0.0);
    CHECK(err.sd == 0.0);
  }
  SUBCASE("single point") {
    const std::vector<Eigen::Vector3d> m{ref + Eigen::Vector3d(0, 0.02, 0)};
    const auto err = calibration_error(m, ref);
    CHECK(err.mean == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(err.sd == 0.0);
  }
  SUBCASE("known radii") {
    const std::vector<double> radii{0.01, 0.02, 0.015, 0.03};
    std::vector<Eigen::Vector3d> m;
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    for (double r : radii) m.push_back(ref + r * Eigen::Vector3d(g(rng), g(rng), g(rng)).normalized());
    const double mean = (0.01 + 0.02 + 0.015 + 0.03) / 4.0;
    double var = 0.0;
    for (double r : radii) var += (r - mean) * (r - mean);
    const auto err = calibration_error(m, ref);
    CHECK(std::abs(err.mean - mean) <= 1e-12);
    CHECK(std::abs(err.sd - std::sqrt(var / 4.0)) <= 1e-12);
  }
  SUBCASE("empty") {
    try {
      calibration_error({}, ref);
      FAIL("expected Empty");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::Empty);
    }
  }
}

TEST_CASE("scene file") {
  const Scene scene = load_scene_file(test::config_dir() / "scene_desk.json");
  CHECK(scene.boxes.size() == 2);
  const Scene back = scene_from_json(scene_to_json(scene));
  CHECK(back.boxes[1].id == scene.boxes[1].id);
  CHECK(back.boxes[1].half_extents == scene.boxes[1].half_extents);

  nlohmann::json bad = scene_to_json(scene);
  bad["boxes"][0]["half_extents"] = {0.1, -0.1, 0.1};
  try {
    scene_from_json(bad);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("boxes[0].half_extents") != std::string::npos);
  }
  // The bundled arm at home is clear of the bundled desk.
  CHECK(collision_check(test::ur10(), test::ur10().home, scene.boxes).empty());
}
