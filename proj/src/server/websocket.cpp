#include "pbd/server/websocket.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <algorithm>
#include <cctype>

#include "pbd/error.hpp"

namespace pbd::server {

namespace {

constexpr std::string_view kGuid = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string websocket_accept_key(std::string_view client_key) {
  const std::string input = std::string(client_key) + std::string(kGuid);
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(input.data()), input.size(), digest);
  unsigned char encoded[4 * ((SHA_DIGEST_LENGTH + 2) / 3) + 1];
  const int n = EVP_EncodeBlock(encoded, digest, SHA_DIGEST_LENGTH);
  return std::string(reinterpret_cast<char*>(encoded), static_cast<std::size_t>(n));
}

std::optional<std::string> websocket_handshake(std::string_view request, std::size_t& consumed) {
  const auto end = request.find("\r\n\r\n");
  if (end == std::string_view::npos) {
    if (request.size() > 16384) throw Error(Errc::PayloadValidation, "upgrade request too large");
    return std::nullopt;
  }
  consumed = end + 4;
  std::string_view head = request.substr(0, end);
  if (head.substr(0, 4) != "GET ") throw Error(Errc::PayloadValidation, "upgrade request must be GET");
  std::string key;
  bool upgrade = false;
  std::size_t pos = head.find("\r\n");
  while (pos != std::string_view::npos) {
    const std::size_t next = head.find("\r\n", pos + 2);
    const std::string_view line = head.substr(pos + 2, next == std::string_view::npos ? std::string_view::npos
                                                                                      : next - pos - 2);
    const auto colon = line.find(':');
    if (colon != std::string_view::npos) {
      const std::string name = lower(trim(line.substr(0, colon)));
      const std::string_view value = trim(line.substr(colon + 1));
      if (name == "sec-websocket-key") key = std::string(value);
      if (name == "upgrade" && lower(value) == "websocket") upgrade = true;
    }
    pos = next;
  }
  if (!upgrade || key.empty()) throw Error(Errc::PayloadValidation, "not a websocket upgrade request");
  return "HTTP/1.1 101 Switching Protocols\r\n"
         "Upgrade: websocket\r\n"
         "Connection: Upgrade\r\n"
         "Sec-WebSocket-Accept: " +
         websocket_accept_key(key) + "\r\n\r\n";
}

namespace {

std::string frame(std::string_view payload, unsigned char opcode, std::optional<unsigned> mask) {
  std::string out;
  out.push_back(static_cast<char>(0x80 | opcode));
  const unsigned char mask_bit = mask ? 0x80 : 0x00;
  const std::size_t n = payload.size();
  if (n < 126) {
    out.push_back(static_cast<char>(mask_bit | n));
  } else if (n <= 0xFFFF) {
    out.push_back(static_cast<char>(mask_bit | 126));
    out.push_back(static_cast<char>((n >> 8) & 0xFF));
    out.push_back(static_cast<char>(n & 0xFF));
  } else {
    out.push_back(static_cast<char>(mask_bit | 127));
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<char>((n >> shift) & 0xFF));
  }
  if (!mask) {
    out.append(payload);
    return out;
  }
  const unsigned char key[4] = {static_cast<unsigned char>(*mask >> 24), static_cast<unsigned char>(*mask >> 16),
                                static_cast<unsigned char>(*mask >> 8), static_cast<unsigned char>(*mask)};
  out.append(reinterpret_cast<const char*>(key), 4);
  for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<char>(payload[i] ^ key[i % 4]));
  return out;
}

}  // namespace

std::string websocket_frame(std::string_view payload, unsigned char opcode) {
  return frame(payload, opcode, std::nullopt);
}

std::string websocket_client_frame(std::string_view payload, unsigned mask, unsigned char opcode) {
  return frame(payload, opcode, mask);
}

std::optional<WebSocketMessage> WebSocketDecoder::next() {
  for (;;) {
    if (buffer_.size() < 2) return std::nullopt;
    const auto* b = reinterpret_cast<const unsigned char*>(buffer_.data());
    const bool fin = (b[0] & 0x80) != 0;
    const unsigned char opcode = b[0] & 0x0F;
    const bool masked = (b[1] & 0x80) != 0;
    std::uint64_t len = b[1] & 0x7F;
    std::size_t offset = 2;
    if (len == 126) {
      if (buffer_.size() < 4) return std::nullopt;
      len = (std::uint64_t{b[2]} << 8) | b[3];
      offset = 4;
    } else if (len == 127) {
      if (buffer_.size() < 10) return std::nullopt;
      len = 0;
      for (int i = 0; i < 8; ++i) len = (len << 8) | b[2 + i];
      offset = 10;
    }
    if (len > (1u << 24)) throw Error(Errc::PayloadValidation, "websocket frame too large");
    const std::size_t mask_len = masked ? 4 : 0;
    if (buffer_.size() < offset + mask_len + len) return std::nullopt;
    std::string payload = buffer_.substr(offset + mask_len, len);
    if (masked) {
      const unsigned char* key = b + offset;
      for (std::size_t i = 0; i < payload.size(); ++i) payload[i] = static_cast<char>(payload[i] ^ key[i % 4]);
    }
    buffer_.erase(0, offset + mask_len + len);

    if (opcode >= 0x8) return WebSocketMessage{opcode, std::move(payload)};  // control frames
    if (opcode != 0x0) {
      partial_opcode_ = opcode;
      partial_.clear();
    }
    partial_ += payload;
    if (fin) {
      WebSocketMessage msg{partial_opcode_, std::move(partial_)};
      partial_.clear();
      return msg;
    }
  }
}

}  // namespace pbd::server
