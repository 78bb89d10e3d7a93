#pragma once

/// @file channel.hpp
/// @brief Reliable in-order byte streams and the framed channel on top.

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mpsi/frame.hpp"

namespace mpsi {

/// Raised when a peer disconnects, aborts, or sends something unexpected.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the peer sent an ABORT frame.
class PeerAbort : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

/// A connected, reliable, in-order byte stream.
class Channel {
 public:
  virtual ~Channel() = default;

  /// Writes all bytes or throws ProtocolError.
  virtual void write(std::span<const std::uint8_t> bytes) = 0;
  /// Reads exactly out.size() bytes or throws ProtocolError.
  virtual void read(std::span<std::uint8_t> out) = 0;
  /// Closes both directions; pending and future reads by the peer fail once
  /// buffered data is drained.
  virtual void close() = 0;
};

/// Two connected in-process endpoints.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_in_process_pair();

struct TrafficStats {
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_received = 0;
};

/// Frames over a byte stream. Not thread-safe; one owner per direction pair.
class FrameChannel {
 public:
  explicit FrameChannel(std::unique_ptr<Channel> channel);

  void send(FrameType type, std::span<const std::uint8_t> payload);
  /// Splits a large message into frames of at most `chunk` bytes; an empty
  /// message still sends one empty frame.
  void send_chunked(FrameType type, std::span<const std::uint8_t> message,
                    std::size_t chunk = kMaxFramePayload);

  /// Next frame of any type, except ABORT which raises PeerAbort.
  Frame receive();
  /// Next frame, which must be of the given type.
  Frame expect(FrameType type);
  /// Reassembles `total` bytes sent with send_chunked.
  std::vector<std::uint8_t> receive_chunked(FrameType type, std::size_t total);

  /// Best effort; never throws.
  void send_abort(std::string_view reason) noexcept;
  void close() noexcept;

  const TrafficStats& traffic() const { return traffic_; }

 private:
  std::unique_ptr<Channel> channel_;
  TrafficStats traffic_;
};

/// Appends a big-endian unsigned integer of `bytes` bytes.
void put_be(std::vector<std::uint8_t>& out, std::uint64_t value, int bytes);
/// Reads a big-endian unsigned integer; throws ProtocolError when out of data.
std::uint64_t get_be(std::span<const std::uint8_t> in, std::size_t& pos, int bytes);

/// Bit i goes to byte i / 8, bit position i % 8.
std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t count);

}  // namespace mpsi
