#pragma once

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pbd/error.hpp"
#include "pbd/geometry.hpp"

namespace pbd {

inline constexpr double kDefaultSamplePeriod = 0.2;  // seconds

enum class OrientationMode { Fixed, Captured };

std::string_view to_string(OrientationMode mode);
std::optional<OrientationMode> orientation_mode_from_string(std::string_view name);

struct Waypoint {
  double t = 0.0;
  Pose pose;
};

struct Trajectory {
  std::string id;
  double sample_period = kDefaultSamplePeriod;
  OrientationMode orientation_mode = OrientationMode::Fixed;
  std::vector<Waypoint> waypoints;

  std::size_t size() const { return waypoints.size(); }
  bool empty() const { return waypoints.empty(); }
  double duration() const { return waypoints.empty() ? 0.0 : waypoints.back().t - waypoints.front().t; }
};

/// Strictly increasing stamps, gaps equal to sample_period within 1e-6 s,
/// unit quaternions. Throws Error(NonUniform) or Error(PayloadValidation).
void validate(const Trajectory& traj);

bool operator==(const Waypoint& a, const Waypoint& b);
bool operator==(const Trajectory& a, const Trajectory& b);

struct RecorderConfig {
  double sample_period = kDefaultSamplePeriod;
  OrientationMode orientation_mode = OrientationMode::Fixed;
};

/// Gates a wall-clock pose stream down to one sample per period and
/// re-stamps accepted samples onto the exact grid index * period.
class Recorder {
 public:
  explicit Recorder(RecorderConfig config = {});

  /// Starts a fresh recording, or continues `prefix` when given (redraw).
  void start(std::optional<Trajectory> prefix = std::nullopt);
  Trajectory stop();
  bool active() const { return active_; }

  /// Throws Error(RecorderInactive) when not started.
  bool record_sample(const Pose& pose, double t_wall);

  const Trajectory& trajectory() const { return traj_; }
  const RecorderConfig& config() const { return config_; }

 private:
  RecorderConfig config_;
  Trajectory traj_;
  std::optional<double> last_accepted_wall_;
  bool active_ = false;
};

/// End-effector orientation with the tool axis along world -Z.
Eigen::Quaterniond tool_down_orientation();
/// Hand orientation treated as "palm facing down".
Eigen::Quaterniond palm_down_reference();

Eigen::Quaterniond map_hand_orientation(const Eigen::Quaterniond& raw, OrientationMode mode);

enum class PlaybackState { Playing, Paused };

struct PlaybackCursor {
  std::string trajectory_id;
  std::size_t index = 0;
  PlaybackState state = PlaybackState::Paused;
};

/// Moves the cursor by `delta`, clamped to [0, length - 1]. State is untouched.
PlaybackCursor step_cursor(const PlaybackCursor& cursor, long delta, std::size_t length);

/// Keeps waypoints [0, cursor_index] and appends `new_samples` on the grid.
Trajectory redraw_from(const Trajectory& traj, std::size_t cursor_index,
                       const std::vector<Pose>& new_samples);

struct PhasePose {
  double phase = 0.0;
  Pose pose;
};

/// Resamples at phases k/(n-1) against normalized time; position is linearly
/// and orientation spherically interpolated. Throws Error(TooShort).
std::vector<PhasePose> resample_phase(const Trajectory& traj, std::size_t n);

/// Pose at one normalized-time phase in [0, 1].
Pose interpolate_at_phase(const Trajectory& traj, double phase);

nlohmann::json trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const nlohmann::json& doc);
Trajectory load_trajectory_file(const std::filesystem::path& path);
void save_trajectory_file(const std::filesystem::path& path, const Trajectory& traj);

/// One document per trajectory under a directory. Writes are serialized.
class TrajectoryStore {
 public:
  explicit TrajectoryStore(std::filesystem::path dir);

  /// Persists `traj`; assigns a fresh id when `traj.id` is empty. Returns the id.
  std::string save(Trajectory traj);
  Trajectory load(const std::string& id) const;
  void remove(const std::string& id);
  bool contains(const std::string& id) const;
  std::vector<std::string> list() const;
  std::filesystem::path path_for(const std::string& id) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::string next_id() const;

  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

}  // namespace pbd
