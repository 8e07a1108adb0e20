#include "pbd/server/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "pbd/error.hpp"

namespace pbd::server {

Endpoint Endpoint::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos) {
    throw Error(Errc::PayloadValidation, "endpoint '" + std::string(text) + "' must be host:port");
  }
  Endpoint ep;
  ep.host = std::string(text.substr(0, colon));
  if (ep.host.empty()) ep.host = "0.0.0.0";
  const std::string port(text.substr(colon + 1));
  try {
    std::size_t used = 0;
    const unsigned long value = std::stoul(port, &used);
    if (used != port.size() || value > 65535) throw std::out_of_range("port");
    ep.port = static_cast<std::uint16_t>(value);
  } catch (const std::exception&) {
    throw Error(Errc::PayloadValidation, "endpoint '" + std::string(text) + "' has an invalid port");
  }
  return ep;
}

std::string Endpoint::str() const { return host + ":" + std::to_string(port); }

Socket::~Socket() { close(); }

Socket::Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

namespace {

sockaddr_in resolve(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (::getaddrinfo(ep.host.c_str(), nullptr, &hints, &found) != 0 || found == nullptr) {
    throw Error(Errc::EndpointUnreachable, "cannot resolve host '" + ep.host + "'");
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(found->ai_addr)->sin_addr;
  ::freeaddrinfo(found);
  return addr;
}

bool wait_for(int fd, short events, std::chrono::milliseconds timeout) {
  pollfd p{fd, events, 0};
  for (;;) {
    const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc < 0 && errno == EINTR) continue;
    return rc > 0;
  }
}

}  // namespace

TcpStream::TcpStream(Socket sock) : sock_(std::move(sock)) {
  int one = 1;
  ::setsockopt(sock_.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpStream TcpStream::connect(const Endpoint& ep, std::chrono::milliseconds timeout) {
  const sockaddr_in addr = resolve(ep);
  Socket sock(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!sock.valid()) throw Error(Errc::EndpointUnreachable, std::string("socket: ") + std::strerror(errno));
  const int flags = ::fcntl(sock.fd(), F_GETFL, 0);
  ::fcntl(sock.fd(), F_SETFL, flags | O_NONBLOCK);
  int rc = ::connect(sock.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr);
  if (rc < 0 && errno != EINPROGRESS) {
    throw Error(Errc::EndpointUnreachable, "connect " + ep.str() + ": " + std::strerror(errno));
  }
  if (rc < 0) {
    if (!wait_for(sock.fd(), POLLOUT, timeout)) {
      throw Error(Errc::EndpointUnreachable, "connect " + ep.str() + ": timed out");
    }
    int err = 0;
    socklen_t len = sizeof err;
    ::getsockopt(sock.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) throw Error(Errc::EndpointUnreachable, "connect " + ep.str() + ": " + std::strerror(err));
  }
  ::fcntl(sock.fd(), F_SETFL, flags);
  return TcpStream(std::move(sock));
}

void TcpStream::write_all(std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(sock_.fd(), data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        wait_for(sock_.fd(), POLLOUT, std::chrono::milliseconds(100));
        continue;
      }
      throw Error(Errc::EndpointUnreachable, std::string("send: ") + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::optional<std::string> TcpStream::read_some(std::chrono::milliseconds timeout) {
  if (!wait_for(sock_.fd(), POLLIN, timeout)) return std::string();
  char buf[4096];
  for (;;) {
    const ssize_t n = ::recv(sock_.fd(), buf, sizeof buf, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      closed_ = true;
      return std::nullopt;
    }
    return std::string(buf, static_cast<std::size_t>(n));
  }
}

std::optional<std::string> TcpStream::read_line(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (closed_) return std::nullopt;
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return std::nullopt;
    auto chunk = read_some(left);
    if (!chunk) return std::nullopt;
    buffer_ += *chunk;
  }
}

TcpListener TcpListener::bind(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  if (ep.host == "0.0.0.0" || ep.host == "*") {
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
  } else if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) != 1) {
    try {
      addr = resolve(ep);
    } catch (const Error& e) {
      throw Error(Errc::BindFailure, e.what());
    }
  }
  TcpListener listener;
  listener.sock_ = Socket(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!listener.sock_.valid()) throw Error(Errc::BindFailure, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(listener.sock_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(listener.sock_.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) < 0) {
    throw Error(Errc::BindFailure, "bind " + ep.str() + ": " + std::strerror(errno));
  }
  if (::listen(listener.sock_.fd(), 8) < 0) {
    throw Error(Errc::BindFailure, "listen " + ep.str() + ": " + std::strerror(errno));
  }
  return listener;
}

Endpoint TcpListener::local_endpoint() const {
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  ::getsockname(sock_.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
  char host[INET_ADDRSTRLEN] = {};
  ::inet_ntop(AF_INET, &addr.sin_addr, host, sizeof host);
  Endpoint ep;
  ep.host = host;
  if (ep.host == "0.0.0.0") ep.host = "127.0.0.1";
  ep.port = ntohs(addr.sin_port);
  return ep;
}

std::optional<TcpStream> TcpListener::accept(std::chrono::milliseconds timeout) {
  if (!wait_for(sock_.fd(), POLLIN, timeout)) return std::nullopt;
  const int fd = ::accept4(sock_.fd(), nullptr, nullptr, SOCK_CLOEXEC);
  if (fd < 0) return std::nullopt;
  return TcpStream(Socket(fd));
}

double monotonic_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

}  // namespace pbd::server
