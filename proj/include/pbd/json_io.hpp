#pragma once

// Field accessors shared by the on-disk formats. Every failure throws
// Error(ParseError) with the dotted path of the offending field.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "pbd/error.hpp"
#include "pbd/geometry.hpp"

namespace pbd::json_io {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& field, const std::string& why) {
  throw Error(Errc::ParseError, field + ": " + why);
}

inline const json& require(const json& obj, const std::string& key, const std::string& ctx) {
  const std::string field = ctx.empty() ? key : ctx + "." + key;
  if (!obj.is_object()) fail(ctx.empty() ? "<root>" : ctx, "expected object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(field, "missing");
  return *it;
}

inline double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(field, "not finite");
  return v;
}

inline double number(const json& obj, const std::string& key, const std::string& ctx) {
  return number(require(obj, key, ctx), ctx.empty() ? key : ctx + "." + key);
}

inline const json& array(const json& j, const std::string& field, std::size_t expected = 0) {
  if (!j.is_array()) fail(field, "expected array");
  if (expected != 0 && j.size() != expected) {
    fail(field, "expected " + std::to_string(expected) + " elements, got " + std::to_string(j.size()));
  }
  return j;
}

inline Eigen::Vector3d vec3(const json& j, const std::string& field) {
  array(j, field, 3);
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v[i] = number(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

/// Quaternion stored as [w, x, y, z]; must be unit within 1e-9.
inline Eigen::Quaterniond quat(const json& j, const std::string& field) {
  array(j, field, 4);
  double c[4];
  for (int i = 0; i < 4; ++i) c[i] = number(j[i], field + "[" + std::to_string(i) + "]");
  Eigen::Quaterniond q(c[0], c[1], c[2], c[3]);
  if (!is_unit(q)) fail(field, "quaternion is not unit norm");
  return q;
}

inline json to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }
inline json to_json(const Eigen::Quaterniond& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

inline RigidTransform transform(const json& j, const std::string& field) {
  RigidTransform t;
  t.translation = vec3(require(j, "translation", field), field + ".translation");
  t.rotation = quat(require(j, "rotation", field), field + ".rotation");
  return t;
}

inline json to_json(const RigidTransform& t) {
  return json{{"translation", to_json(t.translation)}, {"rotation", to_json(t.rotation)}};
}

json read_file(const std::filesystem::path& path);
/// Writes to a sibling temp file then renames, so readers never see a partial document.
void write_file(const std::filesystem::path& path, const json& doc);

}  // namespace pbd::json_io
