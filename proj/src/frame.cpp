#include "mpsi/frame.hpp"

#include <string>

namespace mpsi {

std::string_view frame_type_name(FrameType type) {
  switch (type) {
    case FrameType::kHello:
      return "HELLO";
    case FrameType::kShares:
      return "SHARES";
    case FrameType::kGcChunk:
      return "GC_CHUNK";
    case FrameType::kGarblerLabels:
      return "GARBLER_LABELS";
    case FrameType::kBaseOtMsg:
      return "BASE_OT_MSG";
    case FrameType::kExtOtMsg:
      return "EXT_OT_MSG";
    case FrameType::kDecodeTable:
      return "DECODE_TABLE";
    case FrameType::kResult:
      return "RESULT";
    case FrameType::kAbort:
      return "ABORT";
  }
  return "UNKNOWN";
}

bool is_known_frame_type(std::uint8_t raw) { return raw >= 1 && raw <= 9; }

void encode_header(FrameType type, std::size_t payload_bytes, std::uint8_t* out) {
  if (payload_bytes > kMaxFramePayload) {
    throw FrameError("frame payload of " + std::to_string(payload_bytes) +
                     " bytes exceeds the 2^24 limit");
  }
  const auto len = static_cast<std::uint32_t>(payload_bytes);
  out[0] = static_cast<std::uint8_t>(len >> 24);
  out[1] = static_cast<std::uint8_t>(len >> 16);
  out[2] = static_cast<std::uint8_t>(len >> 8);
  out[3] = static_cast<std::uint8_t>(len);
  out[4] = static_cast<std::uint8_t>(type);
}

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  std::vector<std::uint8_t> out(kFrameHeaderBytes + frame.payload.size());
  encode_header(frame.type, frame.payload.size(), out.data());
  std::copy(frame.payload.begin(), frame.payload.end(), out.begin() + kFrameHeaderBytes);
  return out;
}

namespace {

struct Header {
  std::uint32_t length;
  FrameType type;
};

Header parse_header(const std::uint8_t* p) {
  const std::uint32_t len = (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
                            (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
  if (len > kMaxFramePayload) {
    throw FrameError("frame length " + std::to_string(len) + " exceeds the 2^24 limit");
  }
  if (!is_known_frame_type(p[4])) {
    throw FrameError("unknown frame type " + std::to_string(p[4]));
  }
  return {len, static_cast<FrameType>(p[4])};
}

}  // namespace

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderBytes) throw FrameError("short read: incomplete frame header");
  const Header h = parse_header(bytes.data());
  if (bytes.size() < kFrameHeaderBytes + h.length) throw FrameError("short read: incomplete payload");
  if (bytes.size() > kFrameHeaderBytes + h.length) throw FrameError("trailing bytes after frame");
  return Frame{h.type, std::vector<std::uint8_t>(bytes.begin() + kFrameHeaderBytes, bytes.end())};
}

void FrameDecoder::push(std::span<const std::uint8_t> bytes) {
  if (pos_ > 0 && pos_ * 2 > buffer_.size()) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<Frame> FrameDecoder::next() {
  if (buffered() < kFrameHeaderBytes) return std::nullopt;
  const Header h = parse_header(buffer_.data() + pos_);
  if (buffered() < kFrameHeaderBytes + h.length) return std::nullopt;
  const auto first = buffer_.begin() + static_cast<std::ptrdiff_t>(pos_ + kFrameHeaderBytes);
  Frame f{h.type, std::vector<std::uint8_t>(first, first + h.length)};
  pos_ += kFrameHeaderBytes + h.length;
  return f;
}

}  // namespace mpsi
