#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pbd::server {

/// Sec-WebSocket-Accept value for a client key.
std::string websocket_accept_key(std::string_view client_key);

/// Parses an HTTP upgrade request. Returns the 101 response when the request
/// is complete and valid, std::nullopt while more bytes are needed, and
/// throws Error(PayloadValidation) for a request that can never upgrade.
/// `consumed` receives the request length including the blank line.
std::optional<std::string> websocket_handshake(std::string_view request, std::size_t& consumed);

/// Unmasked server-to-client frame.
std::string websocket_frame(std::string_view payload, unsigned char opcode = 0x1);

/// Client frame encoder, masked with `mask`; used by tests and tools.
std::string websocket_client_frame(std::string_view payload, unsigned mask, unsigned char opcode = 0x1);

struct WebSocketMessage {
  unsigned char opcode = 0x1;
  std::string payload;
};

/// Incremental frame decoder. Fragmented messages are reassembled.
class WebSocketDecoder {
 public:
  void feed(std::string_view bytes) { buffer_.append(bytes); }
  /// Next complete message, or std::nullopt until more bytes arrive.
  std::optional<WebSocketMessage> next();

 private:
  std::string buffer_;
  std::string partial_;
  unsigned char partial_opcode_ = 0;
};

}  // namespace pbd::server
