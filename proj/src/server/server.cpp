#include "pbd/server/server.hpp"

#include <fcntl.h>
#include <poll.h>
#include <unistd.h>

#include <cerrno>

#include "pbd/server/websocket.hpp"

namespace pbd::server {

using nlohmann::json;

struct Server::Client {
  TcpStream stream;
  enum class Codec { Unknown, Line, WebSocket } codec = Codec::Unknown;
  bool upgraded = false;
  std::string inbuf;
  WebSocketDecoder ws;
  std::optional<std::uint64_t> last_seq;
};

struct Server::Completion {
  std::uint64_t seq = 0;
  std::optional<ExecutionReport> report;
  std::optional<Error> error;
};

Server::Server(ServerConfig config)
    : config_(std::move(config)), session_(config_.session), listener_(TcpListener::bind(config_.listen)) {
  if (::pipe2(wake_, O_CLOEXEC) != 0) throw Error(Errc::BindFailure, "cannot create wake pipe");
}

Server::~Server() {
  stop();
  if (executor_.joinable()) executor_.join();
  ::close(wake_[0]);
  ::close(wake_[1]);
}

void Server::start() {
  stop_ = false;
  thread_ = std::thread([this] { run(stop_); });
}

void Server::stop() {
  stop_ = true;
  if (thread_.joinable()) thread_.join();
}

void Server::run(const std::atomic<bool>& stop) {
  while (!stop) {
    pollfd fds[3] = {{listener_.fd(), POLLIN, 0}, {wake_[0], POLLIN, 0}, {-1, POLLIN, 0}};
    if (client_) fds[2].fd = client_->stream.fd();
    const int rc = ::poll(fds, 3, 50);
    if (rc < 0 && errno != EINTR) break;
    if (rc <= 0) continue;
    if (fds[1].revents & POLLIN) {
      char drain[16];
      [[maybe_unused]] auto n = ::read(wake_[0], drain, sizeof drain);
      finish_execution();
    }
    if (fds[2].revents & (POLLIN | POLLHUP | POLLERR)) read_client();
    if (fds[0].revents & POLLIN) {
      if (auto stream = listener_.accept(std::chrono::milliseconds(0))) {
        if (client_) {
          refuse(std::move(*stream));
        } else {
          accept_client(std::move(*stream));
        }
      }
    }
  }
  if (executor_.joinable()) {
    executor_.join();
    finish_execution();
  }
  drop_client();
}

void Server::accept_client(TcpStream stream) {
  client_ = std::make_unique<Client>();
  client_->stream = std::move(stream);
}

void Server::refuse(TcpStream stream) {
  const Envelope busy(MessageType::Busy, 0, json{{"message", "another session is active"}});
  try {
    // Browsers only see the reply after an upgrade, so finish one if asked.
    std::string request;
    for (int i = 0; i < 4; ++i) {
      auto chunk = stream.read_some(std::chrono::milliseconds(50));
      if (!chunk) break;
      request += *chunk;
      if (request.find("\r\n\r\n") != std::string::npos || (!request.empty() && request.rfind("GET ", 0) != 0)) break;
    }
    std::size_t consumed = 0;
    std::optional<std::string> response;
    if (request.rfind("GET ", 0) == 0) response = websocket_handshake(request, consumed);
    if (response) {
      stream.write_all(*response + websocket_frame(encode(busy)) + websocket_frame("", 0x8));
    } else {
      stream.write_all(encode(busy) + "\n");
    }
  } catch (const Error&) {
  }
}

void Server::read_client() {
  auto chunk = client_->stream.read_some(std::chrono::milliseconds(0));
  if (!chunk) {
    drop_client();
    return;
  }
  Client& c = *client_;
  c.inbuf += *chunk;
  if (c.codec == Client::Codec::Unknown) {
    if (c.inbuf.size() < 4 && std::string_view("GET ").starts_with(c.inbuf)) return;
    c.codec = c.inbuf.rfind("GET ", 0) == 0 ? Client::Codec::WebSocket : Client::Codec::Line;
  }
  try {
    if (c.codec == Client::Codec::Line) {
      std::size_t nl;
      while (client_ && (nl = client_->inbuf.find('\n')) != std::string::npos) {
        std::string line = client_->inbuf.substr(0, nl);
        client_->inbuf.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) process_text(line);
      }
      return;
    }
    if (!c.upgraded) {
      std::size_t consumed = 0;
      auto response = websocket_handshake(c.inbuf, consumed);
      if (!response) return;
      c.stream.write_all(*response);
      c.upgraded = true;
      c.ws.feed(std::string_view(c.inbuf).substr(consumed));
      c.inbuf.clear();
    } else {
      c.ws.feed(c.inbuf);
      c.inbuf.clear();
    }
    while (client_) {
      auto msg = client_->ws.next();
      if (!msg) break;
      if (msg->opcode == 0x8) {
        client_->stream.write_all(websocket_frame("", 0x8));
        drop_client();
        return;
      }
      if (msg->opcode == 0x9) {
        client_->stream.write_all(websocket_frame(msg->payload, 0xA));
        continue;
      }
      if (msg->opcode == 0x1 || msg->opcode == 0x2) process_text(msg->payload);
    }
  } catch (const Error&) {
    drop_client();
  }
}

void Server::process_text(const std::string& text) {
  const std::string mode(to_string(session_.mode()));
  Envelope env;
  try {
    env = decode(text);
  } catch (const Error& e) {
    send(make_error(0, Errc::PayloadValidation, mode, "", e.what()));
    return;
  }
  if (client_->last_seq && env.seq <= *client_->last_seq) {
    send(make_error(env.seq, Errc::SequenceError, mode, env.type,
                    "seq " + std::to_string(env.seq) + " does not follow " + std::to_string(*client_->last_seq)));
    return;
  }
  client_->last_seq = env.seq;
  const auto kind = env.kind();
  // Reply-only types (and ExecutionDone, which only the executor produces) are never client requests.
  if (kind && !is_client_request(*kind)) {
    send(make_error(env.seq, Errc::InvalidTransition, mode, env.type, env.type + " is not a client request"));
    return;
  }
  for (const auto& reply : session_.handle(env)) send(reply);
  maybe_launch_execution();
}

void Server::send(const Envelope& env) {
  if (!client_) return;
  try {
    const std::string text = encode(env);
    if (client_->codec == Client::Codec::WebSocket) {
      client_->stream.write_all(websocket_frame(text));
    } else {
      client_->stream.write_all(text + "\n");
    }
  } catch (const Error&) {
    drop_client();
  }
}

void Server::drop_client() { client_.reset(); }

void Server::maybe_launch_execution() {
  if (executing_ || session_.mode() != Mode::Executing || !session_.state().execution) return;
  executing_ = true;
  ExecutionJob job = *session_.state().execution;
  if (!job.endpoint) job.endpoint = config_.robot;
  const StreamOptions options = config_.stream;
  executor_ = std::thread([this, job = std::move(job), options] {
    auto done = std::make_unique<Completion>();
    done->seq = job.seq;
    try {
      if (job.endpoint) {
        TcpStream stream = TcpStream::connect(*job.endpoint);
        done->report = stream_states(job.trajectory, job.joints, &stream, options);
      } else {
        done->report = stream_states(job.trajectory, job.joints, nullptr, options);
      }
    } catch (const Error& e) {
      done->error = e;
    }
    {
      std::lock_guard lock(completion_mutex_);
      completion_ = std::move(done);
    }
    const char byte = 1;
    [[maybe_unused]] auto n = ::write(wake_[1], &byte, 1);
  });
}

void Server::finish_execution() {
  std::unique_ptr<Completion> done;
  {
    std::lock_guard lock(completion_mutex_);
    done = std::move(completion_);
  }
  if (!done) return;
  if (executor_.joinable()) executor_.join();
  executing_ = false;
  json payload = done->report ? done->report->to_json() : json{{"sent", 0}};
  payload["ok"] = !done->error.has_value();
  if (done->error) {
    payload["error"] = json{{"code", std::string(to_string(done->error->code()))}, {"message", done->error->what()}};
    send(make_error(done->seq, done->error->code(), to_string(session_.mode()), "Execute", done->error->what()));
  }
  for (const auto& reply : session_.handle(Envelope(MessageType::ExecutionDone, done->seq, payload))) send(reply);
}

}  // namespace pbd::server
