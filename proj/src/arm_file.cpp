#include <nlohmann/json.hpp>

#include "pbd/json_io.hpp"
#include "pbd/kinematics.hpp"

namespace pbd {

using nlohmann::json;
namespace jio = json_io;

ArmModel arm_from_json(const json& doc) {
  ArmModel arm;
  if (doc.contains("name") && doc["name"].is_string()) arm.name = doc["name"].get<std::string>();

  const json& dh = jio::array(jio::require(doc, "dh", ""), "dh", kArmDof);
  for (int i = 0; i < kArmDof; ++i) {
    const std::string ctx = "dh[" + std::to_string(i) + "]";
    arm.rows[i].theta_offset = jio::number(dh[i], "theta_offset", ctx);
    arm.rows[i].d = jio::number(dh[i], "d", ctx);
    arm.rows[i].a = jio::number(dh[i], "a", ctx);
    arm.rows[i].alpha = jio::number(dh[i], "alpha", ctx);
  }

  const json& limits = jio::array(jio::require(doc, "limits", ""), "limits", kArmDof);
  for (int i = 0; i < kArmDof; ++i) {
    const std::string ctx = "limits[" + std::to_string(i) + "]";
    jio::array(limits[i], ctx, 2);
    arm.joint_limits[i].min = jio::number(limits[i][0], ctx + "[0]");
    arm.joint_limits[i].max = jio::number(limits[i][1], ctx + "[1]");
  }

  if (doc.contains("capsules")) {
    const json& caps = jio::array(doc["capsules"], "capsules");
    for (std::size_t c = 0; c < caps.size(); ++c) {
      const std::string ctx = "capsules[" + std::to_string(c) + "]";
      LinkCapsule cap;
      const json& link = jio::require(caps[c], "link", ctx);
      if (!link.is_number_integer()) jio::fail(ctx + ".link", "expected integer");
      cap.link = link.get<int>();
      cap.radius = jio::number(caps[c], "radius", ctx);
      cap.from = jio::vec3(jio::require(caps[c], "from", ctx), ctx + ".from");
      cap.to = jio::vec3(jio::require(caps[c], "to", ctx), ctx + ".to");
      arm.link_capsules.push_back(cap);
    }
  }

  arm.base = jio::transform(jio::require(doc, "base", ""), "base");

  if (doc.contains("home")) {
    const json& home = jio::array(doc["home"], "home", kArmDof);
    for (int i = 0; i < kArmDof; ++i) arm.home[i] = jio::number(home[i], "home[" + std::to_string(i) + "]");
  }

  validate(arm);
  if (!arm.within_limits(arm.home)) jio::fail("home", "outside joint limits");
  return arm;
}

json arm_to_json(const ArmModel& arm) {
  json dh = json::array();
  for (const auto& r : arm.rows) {
    dh.push_back({{"theta_offset", r.theta_offset}, {"d", r.d}, {"a", r.a}, {"alpha", r.alpha}});
  }
  json limits = json::array();
  for (const auto& l : arm.joint_limits) limits.push_back({l.min, l.max});
  json caps = json::array();
  for (const auto& c : arm.link_capsules) {
    caps.push_back({{"link", c.link}, {"radius", c.radius}, {"from", jio::to_json(c.from)},
                    {"to", jio::to_json(c.to)}});
  }
  json home = json::array();
  for (int i = 0; i < kArmDof; ++i) home.push_back(arm.home[i]);
  return json{{"name", arm.name}, {"dh", dh},          {"limits", limits},
              {"capsules", caps}, {"base", jio::to_json(arm.base)}, {"home", home}};
}

ArmModel load_arm_file(const std::filesystem::path& path) {
  return arm_from_json(jio::read_file(path));
}

}  // namespace pbd
