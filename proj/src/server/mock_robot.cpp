#include "pbd/server/mock_robot.hpp"

#include <nlohmann/json.hpp>

#include "pbd/error.hpp"
#include "pbd/server/protocol.hpp"

namespace pbd::server {

using nlohmann::json;

MockRobot::MockRobot(const Endpoint& listen, const std::filesystem::path& log_path)
    : listener_(TcpListener::bind(listen)) {
  log_.open(log_path, std::ios::out | std::ios::trunc);
  if (!log_) throw Error(Errc::StorageFailure, "cannot open log file " + log_path.string());
  log_.flush();
}

MockRobot::~MockRobot() { stop(); }

void MockRobot::start() {
  stop_ = false;
  thread_ = std::thread([this] { run(stop_); });
}

void MockRobot::stop() {
  stop_ = true;
  if (thread_.joinable()) thread_.join();
}

void MockRobot::run(const std::atomic<bool>& stop) {
  while (!stop) {
    auto stream = listener_.accept(std::chrono::milliseconds(50));
    if (stream) serve(*stream, stop);
  }
}

void MockRobot::serve(TcpStream& stream, const std::atomic<bool>& stop) {
  while (!stop) {
    auto line = stream.read_line(std::chrono::milliseconds(50));
    if (!line) {
      if (stream.closed()) return;
      continue;
    }
    const double received_at = monotonic_seconds();
    if (line->empty()) continue;
    json echo;
    try {
      const Envelope env = decode(*line);
      echo = json{{"type", env.type}, {"seq", env.seq}, {"payload", env.payload}, {"received_at", received_at}};
    } catch (const Error& e) {
      echo = json{{"type", "ErrorReply"},
                  {"seq", 0},
                  {"payload", {{"code", "PayloadValidation"}, {"message", e.what()}}},
                  {"received_at", received_at}};
    }
    const std::string text = echo.dump();
    {
      std::lock_guard lock(log_mutex_);
      log_ << text << '\n';
      log_.flush();
    }
    ++received_;
    try {
      stream.write_all(text + "\n");
    } catch (const Error&) {
      return;
    }
  }
}

}  // namespace pbd::server
