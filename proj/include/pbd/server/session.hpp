#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pbd/kinematics.hpp"
#include "pbd/promp.hpp"
#include "pbd/scene.hpp"
#include "pbd/server/net.hpp"
#include "pbd/server/protocol.hpp"
#include "pbd/trajectory.hpp"

namespace pbd::server {

enum class Mode { Idle, Recording, Reviewing, Training, Executing };

inline constexpr std::array kAllModes{Mode::Idle, Mode::Recording, Mode::Reviewing, Mode::Training,
                                      Mode::Executing};

std::string_view to_string(Mode mode);

/// Files under a session data directory.
struct DataLayout {
  std::filesystem::path root;

  std::filesystem::path trajectories() const { return root / "trajectories"; }
  std::filesystem::path manifest() const { return root / "manifest"; }
  std::filesystem::path model() const { return root / "model"; }
  std::filesystem::path scene() const { return root / "scene"; }
  std::filesystem::path arm() const { return root / "arm"; }
};

struct ManifestEntry {
  std::string id;
  std::string path;  // relative to the data directory
  double added_at = 0.0;

  bool operator==(const ManifestEntry&) const = default;
};

struct TrainingSetManifest {
  std::vector<ManifestEntry> entries;

  bool contains(const std::string& id) const;
  bool operator==(const TrainingSetManifest&) const = default;
};

nlohmann::json manifest_to_json(const TrainingSetManifest& manifest);
TrainingSetManifest manifest_from_json(const nlohmann::json& doc);
/// A missing file reads as an empty manifest. Every entry path must resolve.
TrainingSetManifest load_manifest(const DataLayout& layout);
void save_manifest(const DataLayout& layout, const TrainingSetManifest& manifest);

struct TrainOutcome {
  ProMPModel model;
  std::size_t demos = 0;
  double seconds = 0.0;
};

/// Trains over every manifest trajectory and writes the model file.
/// Throws Error(TooFewDemos) or Error(TrainingTooSlow) beyond `budget_s`.
TrainOutcome train_and_store(const DataLayout& layout, std::size_t n_resample, const BasisConfig& basis,
                             double budget_s = 1.0);

/// Markers to via points: phase = timestamp / reference_duration.
std::vector<ViaPoint> markers_to_via(const ProMPModel& model, const std::vector<Marker>& markers, double noise);

/// Conditioned mean on the sample-period grid spanning the reference duration.
Trajectory condition_and_sample(const ProMPModel& model, const std::vector<Marker>& markers, double noise,
                                double sample_period = kDefaultSamplePeriod);

/// Handed to the runtime when a session enters Executing.
struct ExecutionJob {
  std::uint64_t seq = 0;
  Trajectory trajectory;
  std::vector<JointConfig> joints;
  std::optional<Endpoint> endpoint;
};

struct SessionConfig {
  std::filesystem::path data_dir;
  ArmModel arm;
  Scene scene;
  IKParams ik;
  int follow_substeps = 5;
  std::size_t n_resample = kDefaultResample;
  BasisConfig basis;
  double training_budget_s = 1.0;
  double follow_deadline_s = kDefaultSamplePeriod;
  /// Source of manifest timestamps and reported training durations.
  std::function<double()> clock;
};

struct SessionState {
  Mode mode = Mode::Idle;
  std::optional<Trajectory> active;
  std::optional<PlaybackCursor> cursor;
  Recorder recorder;
  bool redraw_armed = false;
  bool hand_follow = false;
  JointConfig follow_joints = JointConfig::Zero();
  JointConfig display_joints = JointConfig::Zero();
  TrainingSetManifest manifest;
  std::optional<ProMPModel> model;
  std::vector<Marker> markers;
  std::optional<Trajectory> last_sample;
  std::optional<ExecutionJob> execution;
};

/// Canonical JSON rendering of a state; equal states render identically.
nlohmann::json describe(const SessionState& state);

/// One interactive session. handle() applies a message to a copy of the state
/// and commits it only when the handler succeeds, so errors never leave a
/// partial transition behind.
class Session {
 public:
  explicit Session(SessionConfig config);

  std::vector<Envelope> handle(const Envelope& msg);

  const SessionState& state() const { return state_; }
  /// Replaces the in-memory state, e.g. to replay a captured one. Files under
  /// the data directory are left alone.
  void restore(SessionState state) { state_ = std::move(state); }
  Mode mode() const { return state_.mode; }
  const SessionConfig& config() const { return config_; }
  const DataLayout& layout() const { return layout_; }

  /// Wall time of the most recent hand-follow solve.
  double last_follow_seconds() const { return last_follow_seconds_; }

 private:
  struct Context;

  void on_start_recording(Context& ctx);
  void on_pose_sample(Context& ctx);
  void on_stop_recording(Context& ctx);
  void on_step_cursor(Context& ctx);
  void on_play(Context& ctx);
  void on_pause(Context& ctx);
  void on_redraw_from(Context& ctx);
  void on_save(Context& ctx);
  void on_discard(Context& ctx);
  void on_add_to_training_set(Context& ctx);
  void on_list_training_set(Context& ctx);
  void on_delete_trajectory(Context& ctx);
  void on_train_model(Context& ctx);
  void on_place_marker(Context& ctx);
  void on_condition_and_sample(Context& ctx);
  void on_execute(Context& ctx);
  void on_execution_done(Context& ctx);

  std::optional<nlohmann::json> robot_state_at(SessionState& s, std::size_t index) const;

  SessionConfig config_;
  DataLayout layout_;
  TrajectoryStore store_;
  SessionState state_;
  double last_follow_seconds_ = 0.0;
};

/// Whether `type` is accepted in `mode` by the state table (ignoring
/// payload-dependent conditions such as an armed redraw).
bool transition_allowed(Mode mode, MessageType type);

}  // namespace pbd::server
