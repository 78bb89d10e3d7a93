#pragma once

/// @file frame.hpp
/// @brief Length-prefixed typed frames.
///
/// Wire layout: 4-byte big-endian payload length, 1-byte type, payload.
/// Payloads are at most 2^24 bytes; larger messages are chunked by the sender.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace mpsi {

enum class FrameType : std::uint8_t {
  kHello = 1,
  kShares = 2,
  kGcChunk = 3,
  kGarblerLabels = 4,
  kBaseOtMsg = 5,
  kExtOtMsg = 6,
  kDecodeTable = 7,
  kResult = 8,
  kAbort = 9,
};

inline constexpr std::size_t kFrameHeaderBytes = 5;
inline constexpr std::size_t kMaxFramePayload = std::size_t{1} << 24;

std::string_view frame_type_name(FrameType type);
bool is_known_frame_type(std::uint8_t raw);

class FrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Frame {
  FrameType type = FrameType::kHello;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);
void encode_header(FrameType type, std::size_t payload_bytes, std::uint8_t* out);

/// Decodes exactly one frame occupying all of `bytes`.
Frame decode_frame(std::span<const std::uint8_t> bytes);

/// Incremental decoder for a byte stream.
class FrameDecoder {
 public:
  void push(std::span<const std::uint8_t> bytes);

  /// Next complete frame, or nullopt when more bytes are needed. Throws
  /// FrameError on an oversize length or unknown type.
  std::optional<Frame> next();

  std::size_t buffered() const { return buffer_.size() - pos_; }

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t pos_ = 0;
};

}  // namespace mpsi
