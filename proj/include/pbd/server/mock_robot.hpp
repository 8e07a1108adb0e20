#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "pbd/server/net.hpp"

namespace pbd::server {

/// Stand-in for the robot controller. Accepts execution streams one
/// connection at a time, echoes every envelope back with a `received_at`
/// field (monotonic seconds) and appends one log line per message.
class MockRobot {
 public:
  /// Binds immediately; throws Error(BindFailure). The log file is truncated.
  MockRobot(const Endpoint& listen, const std::filesystem::path& log_path);
  ~MockRobot();

  MockRobot(const MockRobot&) = delete;
  MockRobot& operator=(const MockRobot&) = delete;

  Endpoint endpoint() const { return listener_.local_endpoint(); }

  void start();
  /// Serves until `stop` becomes true.
  void run(const std::atomic<bool>& stop);
  void stop();

  std::size_t received() const { return received_.load(); }

 private:
  void serve(TcpStream& stream, const std::atomic<bool>& stop);

  TcpListener listener_;
  std::ofstream log_;
  std::mutex log_mutex_;
  std::atomic<bool> stop_{false};
  std::atomic<std::size_t> received_{0};
  std::thread thread_;
};

}  // namespace pbd::server
