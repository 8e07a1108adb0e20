#include "pbd/server/session.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "pbd/json_io.hpp"
#include "pbd/server/executor.hpp"

namespace pbd::server {

using nlohmann::json;

namespace {

double steady_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

double wall_seconds() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

// Payload accessors. Parse errors surface as PayloadValidation.
const json* optional_field(const json& payload, const char* key) {
  auto it = payload.find(key);
  if (it == payload.end() || it->is_null()) return nullptr;
  return &*it;
}

double payload_number(const json& payload, const char* key) {
  return json_io::number(json_io::require(payload, key, "payload"), std::string("payload.") + key);
}

long payload_integer(const json& payload, const char* key) {
  const json& v = json_io::require(payload, key, "payload");
  if (!v.is_number_integer()) json_io::fail(std::string("payload.") + key, "expected integer");
  return v.get<long>();
}

std::size_t payload_index(const json& payload, const char* key) {
  const long v = payload_integer(payload, key);
  if (v < 0) json_io::fail(std::string("payload.") + key, "expected non-negative integer");
  return static_cast<std::size_t>(v);
}

std::string payload_string(const json& payload, const char* key) {
  const json& v = json_io::require(payload, key, "payload");
  if (!v.is_string()) json_io::fail(std::string("payload.") + key, "expected string");
  return v.get<std::string>();
}

bool payload_flag(const json& payload, const char* key, bool fallback) {
  const json* v = optional_field(payload, key);
  if (v == nullptr) return fallback;
  if (!v->is_boolean()) json_io::fail(std::string("payload.") + key, "expected boolean");
  return v->get<bool>();
}

json collision_json(const std::vector<CollisionPair>& hits) {
  json out = json::array();
  for (const auto& h : hits) out.push_back(json{{"link", h.link}, {"box", h.box_id}});
  return out;
}

json cursor_json(const PlaybackCursor& c) {
  return json{{"trajectory_id", c.trajectory_id},
              {"index", c.index},
              {"state", c.state == PlaybackState::Playing ? "Playing" : "Paused"}};
}

json marker_json(const Marker& m) {
  return json{{"position", json_io::to_json(m.position)}, {"timestamp", m.timestamp}};
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Idle: return "Idle";
    case Mode::Recording: return "Recording";
    case Mode::Reviewing: return "Reviewing";
    case Mode::Training: return "Training";
    case Mode::Executing: return "Executing";
  }
  return "";
}

bool transition_allowed(Mode mode, MessageType type) {
  using M = MessageType;
  if (type == M::ListTrainingSet) return true;
  switch (mode) {
    case Mode::Idle:
      return type == M::StartRecording || type == M::DeleteTrajectory || type == M::TrainModel ||
             type == M::PlaceMarker || type == M::ConditionAndSample || type == M::Execute;
    case Mode::Recording:
      return type == M::PoseSample || type == M::StopRecording;
    case Mode::Reviewing:
      return type == M::StepCursor || type == M::Play || type == M::Pause || type == M::RedrawFrom ||
             type == M::Save || type == M::Discard || type == M::AddToTrainingSet || type == M::Execute;
    case Mode::Training:
      return false;
    case Mode::Executing:
      return type == M::ExecutionDone;
  }
  return false;
}

// ---- manifest ---------------------------------------------------------------

bool TrainingSetManifest::contains(const std::string& id) const {
  return std::any_of(entries.begin(), entries.end(), [&](const ManifestEntry& e) { return e.id == id; });
}

json manifest_to_json(const TrainingSetManifest& manifest) {
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back(json{{"id", e.id}, {"path", e.path}, {"added_at", e.added_at}});
  }
  return json{{"entries", entries}};
}

TrainingSetManifest manifest_from_json(const json& doc) {
  TrainingSetManifest out;
  const json& entries = json_io::require(doc, "entries", "");
  if (!entries.is_array()) json_io::fail("entries", "expected array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string ctx = "entries[" + std::to_string(i) + "]";
    ManifestEntry e;
    const json& id = json_io::require(entries[i], "id", ctx);
    const json& path = json_io::require(entries[i], "path", ctx);
    if (!id.is_string()) json_io::fail(ctx + ".id", "expected string");
    if (!path.is_string()) json_io::fail(ctx + ".path", "expected string");
    e.id = id.get<std::string>();
    e.path = path.get<std::string>();
    e.added_at = json_io::number(entries[i], "added_at", ctx);
    if (out.contains(e.id)) json_io::fail(ctx + ".id", "duplicate id '" + e.id + "'");
    out.entries.push_back(std::move(e));
  }
  return out;
}

TrainingSetManifest load_manifest(const DataLayout& layout) {
  if (!std::filesystem::exists(layout.manifest())) return {};
  TrainingSetManifest m = manifest_from_json(json_io::read_file(layout.manifest()));
  for (const auto& e : m.entries) {
    if (!std::filesystem::exists(layout.root / e.path)) {
      throw Error(Errc::NotFound, "manifest entry '" + e.id + "' points at missing file " + e.path);
    }
  }
  return m;
}

void save_manifest(const DataLayout& layout, const TrainingSetManifest& manifest) {
  json_io::write_file(layout.manifest(), manifest_to_json(manifest));
}

// ---- training and conditioning -----------------------------------------------

TrainOutcome train_and_store(const DataLayout& layout, std::size_t n_resample, const BasisConfig& basis,
                             double budget_s) {
  const TrainingSetManifest manifest = load_manifest(layout);
  if (manifest.entries.size() < 2) {
    throw Error(Errc::TooFewDemos,
                "training set has " + std::to_string(manifest.entries.size()) + " trajectories, need at least 2");
  }
  const double t0 = steady_seconds();
  std::vector<Trajectory> demos;
  demos.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) demos.push_back(load_trajectory_file(layout.root / e.path));
  TrainOutcome out;
  out.model = train_promp(demos, n_resample, basis);
  out.demos = demos.size();
  out.seconds = steady_seconds() - t0;
  if (out.seconds > budget_s) {
    throw Error(Errc::TrainingTooSlow, "training took " + std::to_string(out.seconds) + " s");
  }
  save_model_file(layout.model(), out.model);
  return out;
}

std::vector<ViaPoint> markers_to_via(const ProMPModel& model, const std::vector<Marker>& markers, double noise) {
  std::vector<ViaPoint> via;
  via.reserve(markers.size());
  for (const auto& m : markers) {
    ViaPoint v;
    v.phase = std::clamp(m.timestamp / model.reference_duration, 0.0, 1.0);
    v.value = m.position;
    v.noise = noise;
    via.push_back(v);
  }
  return via;
}

Trajectory condition_and_sample(const ProMPModel& model, const std::vector<Marker>& markers, double noise,
                                double sample_period) {
  const ProMPModel conditioned = condition(model, markers_to_via(model, markers, noise));
  const auto steps = static_cast<std::size_t>(std::llround(model.reference_duration / sample_period));
  const std::size_t n = std::max<std::size_t>(steps + 1, 2);
  return mean_trajectory(conditioned, n, static_cast<double>(n - 1) * sample_period);
}

// ---- state rendering ----------------------------------------------------------

json describe(const SessionState& s) {
  json out;
  out["mode"] = std::string(to_string(s.mode));
  out["active"] = s.active ? trajectory_to_json(*s.active) : json(nullptr);
  out["cursor"] = s.cursor ? cursor_json(*s.cursor) : json(nullptr);
  out["recorder"] = json{{"active", s.recorder.active()},
                         {"trajectory", trajectory_to_json(s.recorder.trajectory())}};
  out["redraw_armed"] = s.redraw_armed;
  out["hand_follow"] = s.hand_follow;
  out["follow_joints"] = joints_to_json(s.follow_joints);
  out["display_joints"] = joints_to_json(s.display_joints);
  out["manifest"] = manifest_to_json(s.manifest);
  out["model"] = s.model ? model_to_json(*s.model) : json(nullptr);
  json markers = json::array();
  for (const auto& m : s.markers) markers.push_back(marker_json(m));
  out["markers"] = markers;
  out["last_sample"] = s.last_sample ? trajectory_to_json(*s.last_sample) : json(nullptr);
  if (s.execution) {
    out["execution"] = json{{"seq", s.execution->seq},
                            {"trajectory", trajectory_to_json(s.execution->trajectory)},
                            {"endpoint", s.execution->endpoint ? json(s.execution->endpoint->str()) : json(nullptr)}};
  } else {
    out["execution"] = nullptr;
  }
  return out;
}

// ---- session --------------------------------------------------------------------

struct Session::Context {
  const Envelope& msg;
  MessageType type;
  SessionState s;
  std::vector<Envelope> replies;

  void ack(json payload = json::object()) { replies.push_back(make_ack(msg.seq, std::move(payload))); }
  void send(MessageType t, json payload) { replies.emplace_back(t, msg.seq, std::move(payload)); }
  void error(Errc code, const std::string& message) {
    replies.push_back(make_error(msg.seq, code, to_string(s.mode), msg.type, message));
  }
};

Session::Session(SessionConfig config)
    : config_(std::move(config)), layout_{config_.data_dir}, store_(layout_.trajectories()) {
  if (!config_.clock) config_.clock = wall_seconds;
  validate(config_.arm);
  validate(config_.basis);
  std::filesystem::create_directories(layout_.root);
  json_io::write_file(layout_.arm(), arm_to_json(config_.arm));
  json_io::write_file(layout_.scene(), scene_to_json(config_.scene));
  state_.manifest = load_manifest(layout_);
  if (std::filesystem::exists(layout_.model())) state_.model = load_model_file(layout_.model());
  state_.follow_joints = config_.arm.home;
  state_.display_joints = config_.arm.home;
}

std::vector<Envelope> Session::handle(const Envelope& msg) {
  const SessionState& cur = state_;
  const auto kind = msg.kind();
  if (!kind) {
    return {make_error(msg.seq, Errc::UnknownMessageType, to_string(cur.mode), msg.type,
                       "unknown message type '" + msg.type + "'")};
  }
  const bool redraw_sample = *kind == MessageType::PoseSample && cur.mode == Mode::Reviewing && cur.redraw_armed;
  if (!transition_allowed(cur.mode, *kind) && !redraw_sample) {
    return {make_error(msg.seq, Errc::InvalidTransition, to_string(cur.mode), msg.type,
                       msg.type + " is not valid in mode " + std::string(to_string(cur.mode)))};
  }

  Context ctx{msg, *kind, state_, {}};
  // Any review action other than another stroke sample closes an armed redraw.
  if (ctx.s.redraw_armed && *kind != MessageType::PoseSample && *kind != MessageType::ListTrainingSet) {
    ctx.s.active = ctx.s.recorder.stop();
    ctx.s.redraw_armed = false;
  }
  try {
    switch (*kind) {
      case MessageType::StartRecording: on_start_recording(ctx); break;
      case MessageType::PoseSample: on_pose_sample(ctx); break;
      case MessageType::StopRecording: on_stop_recording(ctx); break;
      case MessageType::StepCursor: on_step_cursor(ctx); break;
      case MessageType::Play: on_play(ctx); break;
      case MessageType::Pause: on_pause(ctx); break;
      case MessageType::RedrawFrom: on_redraw_from(ctx); break;
      case MessageType::Save: on_save(ctx); break;
      case MessageType::Discard: on_discard(ctx); break;
      case MessageType::AddToTrainingSet: on_add_to_training_set(ctx); break;
      case MessageType::ListTrainingSet: on_list_training_set(ctx); break;
      case MessageType::DeleteTrajectory: on_delete_trajectory(ctx); break;
      case MessageType::TrainModel: on_train_model(ctx); break;
      case MessageType::PlaceMarker: on_place_marker(ctx); break;
      case MessageType::ConditionAndSample: on_condition_and_sample(ctx); break;
      case MessageType::Execute: on_execute(ctx); break;
      case MessageType::ExecutionDone: on_execution_done(ctx); break;
      default: break;  // reply-only types never pass transition_allowed
    }
  } catch (const Error& e) {
    const Errc code = e.code() == Errc::ParseError ? Errc::PayloadValidation : e.code();
    return {make_error(msg.seq, code, to_string(cur.mode), msg.type, e.what())};
  } catch (const std::exception& e) {
    return {make_error(msg.seq, Errc::PayloadValidation, to_string(cur.mode), msg.type, e.what())};
  }
  state_ = std::move(ctx.s);
  return std::move(ctx.replies);
}

void Session::on_start_recording(Context& ctx) {
  const json& p = ctx.msg.payload;
  OrientationMode mode = OrientationMode::Fixed;
  if (const json* v = optional_field(p, "orientation_mode")) {
    if (!v->is_string()) json_io::fail("payload.orientation_mode", "expected string");
    auto parsed = orientation_mode_from_string(v->get<std::string>());
    if (!parsed) json_io::fail("payload.orientation_mode", "expected Fixed or Captured");
    mode = *parsed;
  }
  ctx.s.hand_follow = payload_flag(p, "hand_follow", false);
  ctx.s.recorder = Recorder(RecorderConfig{kDefaultSamplePeriod, mode});
  ctx.s.recorder.start();
  ctx.s.active.reset();
  ctx.s.cursor.reset();
  ctx.s.follow_joints = ctx.s.display_joints;
  ctx.s.mode = Mode::Recording;
  ctx.ack(json{{"mode", "Recording"}, {"orientation_mode", std::string(to_string(mode))},
               {"hand_follow", ctx.s.hand_follow}});
}

void Session::on_pose_sample(Context& ctx) {
  const json& p = ctx.msg.payload;
  Pose pose;
  pose.position = json_io::vec3(json_io::require(p, "position", "payload"), "payload.position");
  Eigen::Quaterniond raw = palm_down_reference();
  if (const json* v = optional_field(p, "orientation")) raw = json_io::quat(*v, "payload.orientation");
  pose.orientation = map_hand_orientation(raw, ctx.s.recorder.config().orientation_mode);
  const double t = payload_number(p, "t");

  const bool accepted = ctx.s.recorder.record_sample(pose, t);
  const Trajectory& recorded = ctx.s.recorder.trajectory();
  if (ctx.s.redraw_armed) {
    ctx.s.active = recorded;
    if (ctx.s.cursor) ctx.s.cursor->index = recorded.size() - 1;
  }
  ctx.ack(json{{"accepted", accepted}, {"index", recorded.size() - 1}, {"length", recorded.size()}});

  if (!ctx.s.hand_follow) return;
  const double t0 = steady_seconds();
  try {
    const auto segment = solve_ik_segment(config_.arm, ctx.s.follow_joints, pose, config_.follow_substeps, config_.ik);
    last_follow_seconds_ = steady_seconds() - t0;
    const JointConfig& q = segment.back();
    json seg = json::array();
    for (const auto& s : segment) seg.push_back(joints_to_json(s));
    ctx.s.follow_joints = q;
    ctx.s.display_joints = q;
    ctx.send(MessageType::RobotState, json{{"joints", joints_to_json(q)}, {"segment", seg}});
    const auto hits = collision_check(config_.arm, q, config_.scene.boxes);
    if (!hits.empty()) ctx.send(MessageType::CollisionWarning, json{{"pairs", collision_json(hits)}});
  } catch (const Error& e) {
    last_follow_seconds_ = steady_seconds() - t0;
    ctx.error(Errc::IKFailure, std::string("hand follow: ") + e.what());
  }
}

void Session::on_stop_recording(Context& ctx) {
  if (ctx.s.recorder.trajectory().empty()) {
    throw Error(Errc::PayloadValidation, "recording holds no samples");
  }
  Trajectory traj = ctx.s.recorder.stop();
  PlaybackCursor cursor;
  cursor.trajectory_id = traj.id;
  cursor.index = traj.size() - 1;
  ctx.s.cursor = cursor;
  ctx.s.active = std::move(traj);
  ctx.s.mode = Mode::Reviewing;
  ctx.ack(json{{"mode", "Reviewing"}, {"trajectory", trajectory_to_json(*ctx.s.active)}, {"cursor", cursor.index}});
}

std::optional<json> Session::robot_state_at(SessionState& s, std::size_t index) const {
  const Waypoint& w = s.active->waypoints[index];
  try {
    const JointConfig q = solve_ik(config_.arm, w.pose, s.display_joints, config_.ik);
    s.display_joints = q;
    return robot_state_payload(index, w.t, q);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void Session::on_step_cursor(Context& ctx) {
  const long delta = payload_integer(ctx.msg.payload, "delta");
  ctx.s.cursor = step_cursor(*ctx.s.cursor, delta, ctx.s.active->size());
  const std::size_t index = ctx.s.cursor->index;
  ctx.ack(json{{"index", index}});
  if (auto state = robot_state_at(ctx.s, index)) {
    ctx.send(MessageType::RobotState, std::move(*state));
  } else {
    ctx.error(Errc::IKFailure, "no joint solution at waypoint " + std::to_string(index));
  }
}

void Session::on_play(Context& ctx) {
  PlaybackCursor& cursor = *ctx.s.cursor;
  const std::size_t from = cursor.index;
  cursor.state = PlaybackState::Playing;
  ctx.ack(json{{"from", from}, {"to", ctx.s.active->size() - 1}});
  for (std::size_t i = from; i < ctx.s.active->size(); ++i) {
    auto state = robot_state_at(ctx.s, i);
    if (!state) {
      ctx.error(Errc::IKFailure, "no joint solution at waypoint " + std::to_string(i));
      break;
    }
    cursor.index = i;
    ctx.send(MessageType::RobotState, std::move(*state));
  }
}

void Session::on_pause(Context& ctx) {
  PlaybackCursor& cursor = *ctx.s.cursor;
  if (optional_field(ctx.msg.payload, "index") != nullptr) {
    const std::size_t index = payload_index(ctx.msg.payload, "index");
    if (index >= ctx.s.active->size()) {
      throw Error(Errc::IndexOutOfRange, "pause index " + std::to_string(index) + " outside trajectory", index);
    }
    cursor.index = index;
  }
  cursor.state = PlaybackState::Paused;
  ctx.ack(json{{"index", cursor.index}});
}

void Session::on_redraw_from(Context& ctx) {
  const json& p = ctx.msg.payload;
  const std::size_t index = payload_index(p, "index");
  if (const json* samples = optional_field(p, "samples")) {
    if (!samples->is_array()) json_io::fail("payload.samples", "expected array");
    std::vector<Pose> poses;
    for (std::size_t i = 0; i < samples->size(); ++i) {
      Pose pose;
      pose.position = json_io::vec3((*samples)[i], "payload.samples[" + std::to_string(i) + "]");
      pose.orientation = tool_down_orientation();
      poses.push_back(pose);
    }
    ctx.s.active = redraw_from(*ctx.s.active, index, poses);
    ctx.s.cursor->index = ctx.s.active->size() - 1;
    ctx.ack(json{{"index", index}, {"length", ctx.s.active->size()}, {"armed", false}});
    return;
  }
  Trajectory prefix = redraw_from(*ctx.s.active, index, {});
  ctx.s.recorder = Recorder(RecorderConfig{prefix.sample_period, prefix.orientation_mode});
  ctx.s.recorder.start(prefix);
  ctx.s.active = std::move(prefix);
  ctx.s.cursor->index = index;
  ctx.s.cursor->state = PlaybackState::Paused;
  ctx.s.redraw_armed = true;
  ctx.ack(json{{"index", index}, {"length", ctx.s.active->size()}, {"armed", true}});
}

void Session::on_save(Context& ctx) {
  Trajectory traj = *ctx.s.active;
  validate(traj);
  const std::string id = store_.save(traj);
  ctx.s.active.reset();
  ctx.s.cursor.reset();
  ctx.s.mode = Mode::Idle;
  ctx.ack(json{{"id", id}, {"path", "trajectories/" + id + ".json"}});
}

void Session::on_discard(Context& ctx) {
  ctx.s.active.reset();
  ctx.s.cursor.reset();
  ctx.s.mode = Mode::Idle;
  ctx.ack(json{{"mode", "Idle"}});
}

void Session::on_add_to_training_set(Context& ctx) {
  Trajectory traj = *ctx.s.active;
  validate(traj);
  const std::string id = store_.save(traj);
  ManifestEntry entry{id, "trajectories/" + id + ".json", config_.clock()};
  TrainingSetManifest manifest = ctx.s.manifest;
  if (!manifest.contains(id)) manifest.entries.push_back(entry);
  save_manifest(layout_, manifest);
  ctx.s.manifest = std::move(manifest);
  ctx.s.active.reset();
  ctx.s.cursor.reset();
  ctx.s.mode = Mode::Idle;
  ctx.ack(json{{"id", id}, {"size", ctx.s.manifest.entries.size()}});
}

void Session::on_list_training_set(Context& ctx) { ctx.ack(manifest_to_json(ctx.s.manifest)); }

void Session::on_delete_trajectory(Context& ctx) {
  const std::string id = payload_string(ctx.msg.payload, "id");
  const bool listed = ctx.s.manifest.contains(id);
  if (!listed && !store_.contains(id)) throw Error(Errc::NotFound, "no trajectory '" + id + "'");
  TrainingSetManifest manifest = ctx.s.manifest;
  std::erase_if(manifest.entries, [&](const ManifestEntry& e) { return e.id == id; });
  if (listed) save_manifest(layout_, manifest);
  if (store_.contains(id)) store_.remove(id);
  ctx.s.manifest = std::move(manifest);
  ctx.ack(json{{"id", id}, {"size", ctx.s.manifest.entries.size()}});
}

void Session::on_train_model(Context& ctx) {
  ctx.s.mode = Mode::Training;
  const double t0 = config_.clock();
  TrainOutcome outcome = train_and_store(layout_, config_.n_resample, config_.basis, config_.training_budget_s);
  const double elapsed = config_.clock() - t0;
  ctx.s.model = std::move(outcome.model);
  ctx.s.mode = Mode::Idle;
  ctx.ack(json{{"demos", outcome.demos},
               {"duration", elapsed},
               {"reference_duration", ctx.s.model->reference_duration}});
}

void Session::on_place_marker(Context& ctx) {
  const json& p = ctx.msg.payload;
  Marker m;
  m.position = json_io::vec3(json_io::require(p, "position", "payload"), "payload.position");
  m.timestamp = payload_number(p, "timestamp");
  if (m.timestamp < 0.0) json_io::fail("payload.timestamp", "expected non-negative number");
  ctx.s.markers.push_back(m);
  ctx.ack(json{{"index", ctx.s.markers.size() - 1}, {"count", ctx.s.markers.size()}});
}

void Session::on_condition_and_sample(Context& ctx) {
  if (!ctx.s.model) throw Error(Errc::NoModel, "no trained model");
  double noise = config_.basis.noise;
  if (optional_field(ctx.msg.payload, "noise") != nullptr) {
    noise = payload_number(ctx.msg.payload, "noise");
    if (noise < 0.0) json_io::fail("payload.noise", "expected non-negative number");
  }
  Trajectory traj = condition_and_sample(*ctx.s.model, ctx.s.markers, noise);
  ctx.s.last_sample = traj;
  ctx.ack(json{{"trajectory", trajectory_to_json(traj)}, {"markers", ctx.s.markers.size()}});
}

void Session::on_execute(Context& ctx) {
  const json& p = ctx.msg.payload;
  Trajectory traj;
  if (optional_field(p, "id") != nullptr) {
    traj = store_.load(payload_string(p, "id"));
  } else if (ctx.s.mode == Mode::Reviewing) {
    traj = *ctx.s.active;
  } else if (ctx.s.last_sample) {
    traj = *ctx.s.last_sample;
  } else {
    throw Error(Errc::PayloadValidation, "nothing to execute: no id given and no sampled trajectory");
  }
  std::optional<Endpoint> endpoint;
  if (optional_field(p, "endpoint") != nullptr) endpoint = Endpoint::parse(payload_string(p, "endpoint"));

  const auto joints = preflight(config_.arm, traj, ctx.s.display_joints, config_.ik);
  ctx.ack(json{{"waypoints", traj.size()}, {"duration", traj.duration()}});
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const auto hits = collision_check(config_.arm, joints[i], config_.scene.boxes);
    if (!hits.empty()) ctx.send(MessageType::CollisionWarning, json{{"index", i}, {"pairs", collision_json(hits)}});
  }
  ctx.s.execution = ExecutionJob{ctx.msg.seq, std::move(traj), joints, endpoint};
  ctx.s.display_joints = joints.back();
  ctx.s.active.reset();
  ctx.s.cursor.reset();
  ctx.s.mode = Mode::Executing;
}

void Session::on_execution_done(Context& ctx) {
  const std::uint64_t seq = ctx.s.execution ? ctx.s.execution->seq : ctx.msg.seq;
  ctx.s.execution.reset();
  ctx.s.mode = Mode::Idle;
  ctx.replies.emplace_back(MessageType::ExecutionDone, seq, ctx.msg.payload);
}

}  // namespace pbd::server
