// pbd: headless front end for the demonstration engine.

#include <csignal>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pbd/json_io.hpp"
#include "pbd/metrics.hpp"
#include "pbd/server/executor.hpp"
#include "pbd/server/mock_robot.hpp"
#include "pbd/server/server.hpp"
#include "pbd/server/session.hpp"

using nlohmann::json;
using namespace pbd;
using namespace pbd::server;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

void install_signal_handlers() {
  struct sigaction sa {};
  sa.sa_handler = on_signal;
  sigemptyset(&sa.sa_mask);
  ::sigaction(SIGINT, &sa, nullptr);
  ::sigaction(SIGTERM, &sa, nullptr);
}

void print(const json& doc) { std::cout << doc.dump() << std::endl; }

int fail(std::string_view code, std::string_view message) {
  std::cerr << json{{"error", std::string(code)}, {"message", std::string(message)}}.dump() << std::endl;
  return 1;
}

Marker parse_marker(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(Errc::PayloadValidation, "marker '" + text + "': '" + item + "' is not a number");
    }
  }
  if (values.size() != 4) throw Error(Errc::PayloadValidation, "marker '" + text + "' must be x,y,z,t");
  Marker m;
  m.position = Eigen::Vector3d(values[0], values[1], values[2]);
  m.timestamp = values[3];
  return m;
}

std::string default_config(const char* name) { return std::string(PBD_CONFIG_DIR) + "/" + name; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Programming-by-demonstration engine"};
  app.require_subcommand(1);

  std::string data_dir, arm_path = default_config("ur10.json"), scene_path = default_config("scene_desk.json");
  std::string listen = "127.0.0.1:7070", robot;
  auto* serve = app.add_subcommand("serve", "Run the session server");
  serve->add_option("--data", data_dir, "Session data directory")->required();
  serve->add_option("--arm", arm_path, "Arm description file");
  serve->add_option("--scene", scene_path, "Scene file");
  serve->add_option("--listen", listen, "host:port to listen on");
  serve->add_option("--robot", robot, "Default robot endpoint host:port for Execute");

  auto* train = app.add_subcommand("train", "Train a model from a data directory's training set");
  train->add_option("--data", data_dir, "Session data directory")->required();

  std::string model_path, out_path;
  std::vector<std::string> markers;
  double noise = 0.0;
  auto* sample = app.add_subcommand("sample", "Condition a model on markers and print the mean trajectory");
  sample->add_option("--model", model_path, "Model file")->required();
  sample->add_option("--marker", markers, "Marker x,y,z,t (repeatable)")->required();
  sample->add_option("--noise", noise, "Marker observation variance (m^2)");
  sample->add_option("--out", out_path, "Write the trajectory here instead of stdout");

  std::string traj_path, ref_path;
  auto* metrics_cmd = app.add_subcommand("metrics", "Smoothness metrics for a trajectory");
  metrics_cmd->add_option("--traj", traj_path, "Trajectory file")->required();
  metrics_cmd->add_option("--ref", ref_path, "Reference trajectory for mse");

  std::string endpoint;
  auto* replay = app.add_subcommand("replay", "Stream a trajectory to a robot endpoint");
  replay->add_option("--traj", traj_path, "Trajectory file")->required();
  replay->add_option("--endpoint", endpoint, "Robot endpoint host:port")->required();
  replay->add_option("--arm", arm_path, "Arm description file");

  std::string log_path = "mock_robot.log";
  auto* mock = app.add_subcommand("mock-robot", "Run the mock robot endpoint");
  mock->add_option("--listen", listen, "host:port to listen on");
  mock->add_option("--log", log_path, "Log file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what());
  }

  try {
    if (serve->parsed()) {
      ServerConfig cfg;
      cfg.session.data_dir = data_dir;
      cfg.session.arm = load_arm_file(arm_path);
      cfg.session.scene = load_scene_file(scene_path);
      cfg.listen = Endpoint::parse(listen);
      if (!robot.empty()) cfg.robot = Endpoint::parse(robot);
      Server server(std::move(cfg));
      install_signal_handlers();
      print(json{{"listening", server.endpoint().str()}});
      server.run(g_stop);
    } else if (train->parsed()) {
      const DataLayout layout{data_dir};
      const TrainOutcome out = train_and_store(layout, kDefaultResample, BasisConfig{});
      print(json{{"demos", out.demos},
                 {"duration", out.seconds},
                 {"reference_duration", out.model.reference_duration},
                 {"model", layout.model().string()}});
    } else if (sample->parsed()) {
      std::vector<Marker> parsed;
      for (const auto& m : markers) parsed.push_back(parse_marker(m));
      const Trajectory traj = condition_and_sample(load_model_file(model_path), parsed, noise);
      if (out_path.empty()) {
        print(trajectory_to_json(traj));
      } else {
        save_trajectory_file(out_path, traj);
        print(json{{"waypoints", traj.size()}, {"path", out_path}});
      }
    } else if (metrics_cmd->parsed()) {
      const Trajectory traj = load_trajectory_file(traj_path);
      const metrics::SmoothnessReport r = metrics::smoothness(traj);
      json doc{{"mean_jerk", r.mean_jerk}, {"deviation", r.deviation}, {"variation", r.variation}};
      if (!ref_path.empty()) doc["mse"] = metrics::mse(traj, load_trajectory_file(ref_path));
      print(doc);
    } else if (replay->parsed()) {
      const ArmModel arm = load_arm_file(arm_path);
      const Trajectory traj = load_trajectory_file(traj_path);
      const ExecutionReport report = execute_on_robot(arm, traj, Endpoint::parse(endpoint), arm.home);
      print(report.to_json());
    } else if (mock->parsed()) {
      MockRobot robot_endpoint(Endpoint::parse(listen), log_path);
      install_signal_handlers();
      print(json{{"listening", robot_endpoint.endpoint().str()}, {"log", log_path}});
      robot_endpoint.run(g_stop);
    }
  } catch (const Error& e) {
    return fail(to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail("InternalError", e.what());
  }
  return 0;
}
