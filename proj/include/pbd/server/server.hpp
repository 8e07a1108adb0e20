#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include "pbd/server/executor.hpp"
#include "pbd/server/net.hpp"
#include "pbd/server/session.hpp"

namespace pbd::server {

struct ServerConfig {
  SessionConfig session;
  Endpoint listen;
  /// Robot endpoint used when Execute names none. Without either, execution
  /// runs the same timed schedule without sending anything.
  std::optional<Endpoint> robot;
  StreamOptions stream;
};

/// Single-session server. Clients speak newline-delimited envelopes, or the
/// same envelopes as web socket text frames after an HTTP upgrade. A second
/// concurrent client receives Busy and is closed.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  Endpoint endpoint() const { return listener_.local_endpoint(); }

  void start();
  void run(const std::atomic<bool>& stop);
  void stop();

  /// Only safe while the server is not running.
  const Session& session() const { return session_; }

 private:
  struct Client;
  struct Completion;

  void accept_client(TcpStream stream);
  void refuse(TcpStream stream);
  void read_client();
  void process_text(const std::string& text);
  void send(const Envelope& env);
  void drop_client();
  void maybe_launch_execution();
  void finish_execution();

  ServerConfig config_;
  Session session_;
  TcpListener listener_;
  std::unique_ptr<Client> client_;
  int wake_[2] = {-1, -1};
  std::thread executor_;
  std::mutex completion_mutex_;
  std::unique_ptr<Completion> completion_;
  bool executing_ = false;
  std::atomic<bool> stop_{false};
  std::thread thread_;
};

}  // namespace pbd::server
