#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pbd::server {

/// "host:port"; host may be a name or dotted quad, port 0 asks for any free port.
struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  static Endpoint parse(std::string_view text);
  std::string str() const;
};

/// Owning file descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();
  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void close();

 private:
  int fd_ = -1;
};

class TcpStream {
 public:
  TcpStream() = default;
  explicit TcpStream(Socket sock);

  /// Throws Error(EndpointUnreachable) on refusal or timeout.
  static TcpStream connect(const Endpoint& ep, std::chrono::milliseconds timeout = std::chrono::seconds(2));

  bool valid() const { return sock_.valid(); }
  int fd() const { return sock_.fd(); }

  /// Throws Error(EndpointUnreachable) if the peer went away.
  void write_all(std::string_view data);

  /// Reads whatever is available, waiting up to `timeout`. Returns an empty
  /// string on timeout and std::nullopt on orderly shutdown.
  std::optional<std::string> read_some(std::chrono::milliseconds timeout);

  /// Next newline-terminated line (without the newline). std::nullopt on
  /// timeout or close; closed() tells the two apart.
  std::optional<std::string> read_line(std::chrono::milliseconds timeout);
  bool closed() const { return closed_; }

  void close() { sock_.close(); }

 private:
  Socket sock_;
  std::string buffer_;
  bool closed_ = false;
};

class TcpListener {
 public:
  /// Throws Error(BindFailure).
  static TcpListener bind(const Endpoint& ep);

  Endpoint local_endpoint() const;
  int fd() const { return sock_.fd(); }
  std::optional<TcpStream> accept(std::chrono::milliseconds timeout);

 private:
  Socket sock_;
};

/// Wall-clock seconds on a monotonic base, shared by the executor and mock robot.
double monotonic_seconds();

}  // namespace pbd::server
