#include "mpsi/channel.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

namespace mpsi {

namespace {

// One direction of an in-process pipe.
struct Pipe {
  std::mutex mutex;
  std::condition_variable ready;
  std::deque<std::uint8_t> data;
  bool closed = false;
};

class InProcessChannel final : public Channel {
 public:
  InProcessChannel(std::shared_ptr<Pipe> in, std::shared_ptr<Pipe> out)
      : in_(std::move(in)), out_(std::move(out)) {}
  ~InProcessChannel() override { close(); }

  void write(std::span<const std::uint8_t> bytes) override {
    {
      std::lock_guard lock(out_->mutex);
      if (out_->closed) throw ProtocolError("write on a closed channel");
      out_->data.insert(out_->data.end(), bytes.begin(), bytes.end());
    }
    out_->ready.notify_all();
  }

  void read(std::span<std::uint8_t> out) override {
    std::size_t done = 0;
    std::unique_lock lock(in_->mutex);
    while (done < out.size()) {
      in_->ready.wait(lock, [&] { return !in_->data.empty() || in_->closed; });
      if (in_->data.empty()) throw ProtocolError("peer disconnected");
      const std::size_t take = std::min(out.size() - done, in_->data.size());
      std::copy_n(in_->data.begin(), take, out.begin() + static_cast<std::ptrdiff_t>(done));
      in_->data.erase(in_->data.begin(), in_->data.begin() + static_cast<std::ptrdiff_t>(take));
      done += take;
    }
  }

  void close() override {
    for (const auto& pipe : {in_, out_}) {
      {
        std::lock_guard lock(pipe->mutex);
        pipe->closed = true;
      }
      pipe->ready.notify_all();
    }
  }

 private:
  std::shared_ptr<Pipe> in_;
  std::shared_ptr<Pipe> out_;
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_in_process_pair() {
  auto a_to_b = std::make_shared<Pipe>();
  auto b_to_a = std::make_shared<Pipe>();
  return {std::make_unique<InProcessChannel>(b_to_a, a_to_b),
          std::make_unique<InProcessChannel>(a_to_b, b_to_a)};
}

FrameChannel::FrameChannel(std::unique_ptr<Channel> channel) : channel_(std::move(channel)) {}

void FrameChannel::send(FrameType type, std::span<const std::uint8_t> payload) {
  std::uint8_t header[kFrameHeaderBytes];
  encode_header(type, payload.size(), header);
  channel_->write(header);
  if (!payload.empty()) channel_->write(payload);
  traffic_.bytes_sent += kFrameHeaderBytes + payload.size();
  ++traffic_.frames_sent;
}

void FrameChannel::send_chunked(FrameType type, std::span<const std::uint8_t> message,
                                std::size_t chunk) {
  chunk = std::clamp<std::size_t>(chunk, 1, kMaxFramePayload);
  if (message.empty()) {
    send(type, {});
    return;
  }
  for (std::size_t pos = 0; pos < message.size(); pos += chunk) {
    send(type, message.subspan(pos, std::min(chunk, message.size() - pos)));
  }
}

Frame FrameChannel::receive() {
  std::uint8_t header[kFrameHeaderBytes];
  channel_->read(header);
  const std::uint32_t len = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                            (std::uint32_t{header[2]} << 8) | std::uint32_t{header[3]};
  if (len > kMaxFramePayload) {
    throw ProtocolError("frame decode failure: length " + std::to_string(len) + " exceeds 2^24");
  }
  if (!is_known_frame_type(header[4])) {
    throw ProtocolError("frame decode failure: unknown type " + std::to_string(header[4]));
  }
  Frame f{static_cast<FrameType>(header[4]), std::vector<std::uint8_t>(len)};
  if (len != 0) channel_->read(f.payload);
  traffic_.bytes_received += kFrameHeaderBytes + len;
  ++traffic_.frames_received;
  if (f.type == FrameType::kAbort) {
    throw PeerAbort("peer aborted: " + std::string(f.payload.begin(), f.payload.end()));
  }
  return f;
}

Frame FrameChannel::expect(FrameType type) {
  Frame f = receive();
  if (f.type != type) {
    throw ProtocolError("expected " + std::string(frame_type_name(type)) + " frame, got " +
                        std::string(frame_type_name(f.type)));
  }
  return f;
}

std::vector<std::uint8_t> FrameChannel::receive_chunked(FrameType type, std::size_t total) {
  std::vector<std::uint8_t> out;
  out.reserve(total);
  do {
    Frame f = expect(type);
    if (out.size() + f.payload.size() > total) {
      throw ProtocolError(std::string(frame_type_name(type)) + " message longer than expected");
    }
    out.insert(out.end(), f.payload.begin(), f.payload.end());
  } while (out.size() < total);
  return out;
}

void FrameChannel::send_abort(std::string_view reason) noexcept {
  try {
    const auto* p = reinterpret_cast<const std::uint8_t*>(reason.data());
    send(FrameType::kAbort, std::span(p, std::min(reason.size(), std::size_t{4096})));
  } catch (...) {
  }
}

void FrameChannel::close() noexcept {
  try {
    channel_->close();
  } catch (...) {
  }
}

void put_be(std::vector<std::uint8_t>& out, std::uint64_t value, int bytes) {
  for (int i = bytes - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

std::uint64_t get_be(std::span<const std::uint8_t> in, std::size_t& pos, int bytes) {
  if (pos + static_cast<std::size_t>(bytes) > in.size()) {
    throw ProtocolError("frame decode failure: payload too short");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v = (v << 8) | in[pos++];
  return v;
}

std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    out[i / 8] |= static_cast<std::uint8_t>((bits[i] & 1) << (i % 8));
  }
  return out;
}

std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t count) {
  if (bytes.size() * 8 < count) throw ProtocolError("frame decode failure: bit payload too short");
  std::vector<std::uint8_t> bits(count);
  for (std::size_t i = 0; i < count; ++i) bits[i] = (bytes[i / 8] >> (i % 8)) & 1;
  return bits;
}

}  // namespace mpsi
