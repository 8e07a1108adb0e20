#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "pbd/json_io.hpp"
#include "pbd/trajectory.hpp"

namespace pbd {

using nlohmann::json;
namespace jio = json_io;
namespace fs = std::filesystem;

json trajectory_to_json(const Trajectory& traj) {
  json wps = json::array();
  for (const auto& w : traj.waypoints) {
    wps.push_back({{"t", w.t},
                   {"position", jio::to_json(w.pose.position)},
                   {"orientation", jio::to_json(w.pose.orientation)}});
  }
  return json{{"id", traj.id},
              {"sample_period", traj.sample_period},
              {"orientation_mode", std::string(to_string(traj.orientation_mode))},
              {"waypoints", wps}};
}

Trajectory trajectory_from_json(const json& doc) {
  Trajectory traj;
  const json& id = jio::require(doc, "id", "");
  if (!id.is_string()) jio::fail("id", "expected string");
  traj.id = id.get<std::string>();
  traj.sample_period = jio::number(doc, "sample_period", "");
  if (!(traj.sample_period > 0.0)) jio::fail("sample_period", "must be positive");

  const json& mode = jio::require(doc, "orientation_mode", "");
  if (!mode.is_string()) jio::fail("orientation_mode", "expected string");
  auto parsed = orientation_mode_from_string(mode.get<std::string>());
  if (!parsed) jio::fail("orientation_mode", "expected Fixed or Captured");
  traj.orientation_mode = *parsed;

  const json& wps = jio::array(jio::require(doc, "waypoints", ""), "waypoints");
  traj.waypoints.reserve(wps.size());
  for (std::size_t i = 0; i < wps.size(); ++i) {
    const std::string ctx = "waypoints[" + std::to_string(i) + "]";
    Waypoint w;
    w.t = jio::number(wps[i], "t", ctx);
    w.pose.position = jio::vec3(jio::require(wps[i], "position", ctx), ctx + ".position");
    w.pose.orientation = jio::quat(jio::require(wps[i], "orientation", ctx), ctx + ".orientation");
    traj.waypoints.push_back(w);
  }
  try {
    validate(traj);
  } catch (const Error& e) {
    throw Error(Errc::ParseError, std::string("waypoints: ") + e.what(), e.index());
  }
  return traj;
}

Trajectory load_trajectory_file(const fs::path& path) {
  return trajectory_from_json(jio::read_file(path));
}

void save_trajectory_file(const fs::path& path, const Trajectory& traj) {
  jio::write_file(path, trajectory_to_json(traj));
}

namespace {

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 128 || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_' || c == '.';
  });
}

constexpr std::string_view kIdPrefix = "traj-";

}  // namespace

TrajectoryStore::TrajectoryStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(Errc::StorageFailure, "cannot create " + dir_.string() + ": " + ec.message());
}

fs::path TrajectoryStore::path_for(const std::string& id) const {
  if (!valid_id(id)) throw Error(Errc::PayloadValidation, "invalid trajectory id '" + id + "'");
  return dir_ / (id + ".json");
}

std::vector<std::string> TrajectoryStore::list() const {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir_, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      ids.push_back(entry.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string TrajectoryStore::next_id() const {
  unsigned long highest = 0;
  for (const auto& id : list()) {
    if (id.rfind(kIdPrefix, 0) != 0) continue;
    try {
      highest = std::max(highest, std::stoul(id.substr(kIdPrefix.size())));
    } catch (const std::exception&) {
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%06lu", kIdPrefix.data(), highest + 1);
  return buf;
}

std::string TrajectoryStore::save(Trajectory traj) {
  std::lock_guard lock(mutex_);
  if (traj.id.empty()) traj.id = next_id();
  save_trajectory_file(path_for(traj.id), traj);
  return traj.id;
}

Trajectory TrajectoryStore::load(const std::string& id) const {
  const fs::path path = path_for(id);
  std::lock_guard lock(mutex_);
  if (!fs::exists(path)) throw Error(Errc::NotFound, "trajectory '" + id + "' not found");
  return load_trajectory_file(path);
}

bool TrajectoryStore::contains(const std::string& id) const {
  return valid_id(id) && fs::exists(dir_ / (id + ".json"));
}

void TrajectoryStore::remove(const std::string& id) {
  const fs::path path = path_for(id);
  std::lock_guard lock(mutex_);
  std::error_code ec;
  if (!fs::remove(path, ec)) {
    if (ec) throw Error(Errc::StorageFailure, "cannot delete " + path.string() + ": " + ec.message());
    throw Error(Errc::NotFound, "trajectory '" + id + "' not found");
  }
}

}  // namespace pbd
