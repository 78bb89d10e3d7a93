#include "mpsi/ot.hpp"

#include <sodium.h>

#include <string>

namespace mpsi {

namespace {

constexpr std::size_t kPointBytes = crypto_core_ristretto255_BYTES;
constexpr std::size_t kScalarBytes = crypto_core_ristretto255_SCALARBYTES;
static_assert(kPointBytes == 32);

using Point = std::array<std::uint8_t, kPointBytes>;
using Scalar = std::array<std::uint8_t, kScalarBytes>;

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw OtError("libsodium failed to initialize");
}

Scalar random_scalar() {
  Scalar s;
  crypto_core_ristretto255_scalar_random(s.data());
  return s;
}

Point base_mul(const Scalar& s) {
  Point p;
  if (crypto_scalarmult_ristretto255_base(p.data(), s.data()) != 0) {
    throw OtError("degenerate scalar");
  }
  return p;
}

Point mul(const Scalar& s, const Point& q) {
  Point p;
  if (crypto_scalarmult_ristretto255(p.data(), s.data(), q.data()) != 0) {
    throw ProtocolError("malformed group element on the wire");
  }
  return p;
}

Point load_point(const std::uint8_t* in) {
  Point p;
  std::copy_n(in, kPointBytes, p.begin());
  if (crypto_core_ristretto255_is_valid_point(p.data()) != 1) {
    throw ProtocolError("malformed group element on the wire");
  }
  return p;
}

// Key for instance i, bound to the sender point, receiver point and shared point.
Label derive_key(std::uint64_t i, const Point& a, const Point& b, const Point& shared) {
  std::array<std::uint8_t, 8 + 3 * kPointBytes> buf;
  for (int k = 0; k < 8; ++k) buf[k] = static_cast<std::uint8_t>(i >> (56 - 8 * k));
  std::copy(a.begin(), a.end(), buf.begin() + 8);
  std::copy(b.begin(), b.end(), buf.begin() + 8 + kPointBytes);
  std::copy(shared.begin(), shared.end(), buf.begin() + 8 + 2 * kPointBytes);
  return Label::load(sha256(buf).data());
}

void store_labels(std::vector<std::uint8_t>& out, std::size_t at, const Label& l) {
  l.store(out.data() + at);
}

std::size_t padded_count(std::size_t n) { return (n + kKappa - 1) / kKappa * kKappa; }

void xor_into(std::vector<std::uint8_t>& dst, std::span<const std::uint8_t> src) {
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] ^= src[k];
}

// kappa columns of `rows` bits each become `rows` labels; bit j of row i is
// bit i of column j.
std::vector<Label> transpose(const std::vector<std::vector<std::uint8_t>>& columns,
                             std::size_t rows) {
  std::vector<Label> out(rows);
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const std::uint64_t bit = std::uint64_t{1} << (j % 64);
    const bool high = j >= 64;
    const auto& col = columns[j];
    for (std::size_t b = 0; b < rows / 8; ++b) {
      std::uint8_t byte = col[b];
      for (std::size_t k = 0; byte != 0; ++k, byte >>= 1) {
        if (byte & 1) (high ? out[8 * b + k].hi : out[8 * b + k].lo) |= bit;
      }
    }
  }
  return out;
}

void send_count(FrameChannel& channel, std::uint64_t count) {
  std::vector<std::uint8_t> payload;
  put_be(payload, count, 8);
  channel.send(FrameType::kExtOtMsg, payload);
}

void expect_count(FrameChannel& channel, std::uint64_t count) {
  const Frame f = channel.expect(FrameType::kExtOtMsg);
  std::size_t pos = 0;
  const std::uint64_t got = get_be(f.payload, pos, 8);
  if (pos != f.payload.size() || got != count) {
    throw ProtocolError("OT matrix-size mismatch: peer has " + std::to_string(got) +
                        " instances, expected " + std::to_string(count));
  }
}

}  // namespace

std::vector<Label> dealer_ot(const OtBatch& batch) {
  if (batch.messages.size() != batch.choices.size()) {
    throw OtError("dealer_ot: " + std::to_string(batch.messages.size()) + " message pairs but " +
                  std::to_string(batch.choices.size()) + " choice bits");
  }
  std::vector<Label> out(batch.count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = batch.messages[i][batch.choices[i] & 1];
  return out;
}

void base_ot_send(FrameChannel& channel, std::span<const OtPair> messages) {
  ensure_sodium();
  const std::size_t count = messages.size();
  const Scalar a = random_scalar();
  const Point big_a = base_mul(a);
  channel.send(FrameType::kBaseOtMsg, big_a);

  const auto received = channel.receive_chunked(FrameType::kBaseOtMsg, kPointBytes * count);
  std::vector<std::uint8_t> masked(2 * kLabelBytes * count);
  for (std::size_t i = 0; i < count; ++i) {
    const Point b = load_point(received.data() + kPointBytes * i);
    Point b_minus_a;
    crypto_core_ristretto255_sub(b_minus_a.data(), b.data(), big_a.data());
    const Label k0 = derive_key(i, big_a, b, mul(a, b));
    const Label k1 = derive_key(i, big_a, b, mul(a, b_minus_a));
    store_labels(masked, 2 * kLabelBytes * i, messages[i][0] ^ k0);
    store_labels(masked, 2 * kLabelBytes * i + kLabelBytes, messages[i][1] ^ k1);
  }
  channel.send_chunked(FrameType::kBaseOtMsg, masked);
}

std::vector<Label> base_ot_receive(FrameChannel& channel, std::span<const std::uint8_t> choices) {
  ensure_sodium();
  const std::size_t count = choices.size();
  const Frame first = channel.expect(FrameType::kBaseOtMsg);
  if (first.payload.size() != kPointBytes) throw ProtocolError("malformed group element on the wire");
  const Point big_a = load_point(first.payload.data());

  std::vector<Label> keys(count);
  std::vector<std::uint8_t> points(kPointBytes * count);
  for (std::size_t i = 0; i < count; ++i) {
    const Scalar b = random_scalar();
    Point big_b = base_mul(b);
    if (choices[i] & 1) crypto_core_ristretto255_add(big_b.data(), big_a.data(), big_b.data());
    keys[i] = derive_key(i, big_a, big_b, mul(b, big_a));
    std::copy(big_b.begin(), big_b.end(), points.begin() + static_cast<std::ptrdiff_t>(kPointBytes * i));
  }
  channel.send_chunked(FrameType::kBaseOtMsg, points);

  const auto masked = channel.receive_chunked(FrameType::kBaseOtMsg, 2 * kLabelBytes * count);
  std::vector<Label> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = 2 * kLabelBytes * i + ((choices[i] & 1) ? kLabelBytes : 0);
    out[i] = Label::load(masked.data() + at) ^ keys[i];
  }
  return out;
}

void ot_extend_send(FrameChannel& channel, std::span<const std::uint8_t> s,
                    std::span<const Label> seeds, std::span<const OtPair> messages) {
  if (s.size() != kKappa || seeds.size() != kKappa) {
    throw OtError("ot_extend_send: needs exactly 128 base OTs");
  }
  const std::size_t count = messages.size();
  expect_count(channel, count);
  const std::size_t rows = padded_count(count);
  const std::size_t col_bytes = rows / 8;

  const auto u = channel.receive_chunked(FrameType::kExtOtMsg, kKappa * col_bytes);
  std::vector<std::vector<std::uint8_t>> q(kKappa, std::vector<std::uint8_t>(col_bytes));
  Label s_label;
  for (std::size_t j = 0; j < kKappa; ++j) {
    Prg(seeds[j]).fill(q[j]);
    if (s[j] & 1) {
      xor_into(q[j], std::span(u).subspan(j * col_bytes, col_bytes));
      (j < 64 ? s_label.lo : s_label.hi) |= std::uint64_t{1} << (j % 64);
    }
  }
  const std::vector<Label> rows_q = transpose(q, rows);

  std::vector<Label> in(2 * count);
  std::vector<std::uint64_t> tweaks(2 * count);
  for (std::size_t i = 0; i < count; ++i) {
    in[2 * i] = rows_q[i];
    in[2 * i + 1] = rows_q[i] ^ s_label;
    tweaks[2 * i] = tweaks[2 * i + 1] = i;
  }
  std::vector<Label> pads(2 * count);
  TweakHash hash;
  hash.hash(in, tweaks, pads);

  std::vector<std::uint8_t> y(2 * kLabelBytes * count);
  for (std::size_t i = 0; i < count; ++i) {
    store_labels(y, 2 * kLabelBytes * i, messages[i][0] ^ pads[2 * i]);
    store_labels(y, 2 * kLabelBytes * i + kLabelBytes, messages[i][1] ^ pads[2 * i + 1]);
  }
  channel.send_chunked(FrameType::kExtOtMsg, y);
}

std::vector<Label> ot_extend_receive(FrameChannel& channel, std::span<const OtPair> seeds,
                                     std::span<const std::uint8_t> choices) {
  if (seeds.size() != kKappa) throw OtError("ot_extend_receive: needs exactly 128 base OTs");
  const std::size_t count = choices.size();
  if (count < kKappa) throw OtError("ot_extend_receive: extension needs at least 128 instances");
  send_count(channel, count);
  const std::size_t rows = padded_count(count);
  const std::size_t col_bytes = rows / 8;

  BitVec r(rows, 0);
  std::copy(choices.begin(), choices.end(), r.begin());
  const std::vector<std::uint8_t> r_packed = pack_bits(r);

  std::vector<std::vector<std::uint8_t>> t(kKappa, std::vector<std::uint8_t>(col_bytes));
  std::vector<std::uint8_t> u(kKappa * col_bytes);
  std::vector<std::uint8_t> g1(col_bytes);
  for (std::size_t j = 0; j < kKappa; ++j) {
    Prg(seeds[j][0]).fill(t[j]);
    Prg(seeds[j][1]).fill(g1);
    for (std::size_t b = 0; b < col_bytes; ++b) u[j * col_bytes + b] = t[j][b] ^ g1[b] ^ r_packed[b];
  }
  channel.send_chunked(FrameType::kExtOtMsg, u);
  const std::vector<Label> rows_t = transpose(t, rows);

  std::vector<std::uint64_t> tweaks(count);
  for (std::size_t i = 0; i < count; ++i) tweaks[i] = i;
  std::vector<Label> pads(count);
  TweakHash hash;
  hash.hash(std::span(rows_t).first(count), tweaks, pads);

  const auto y = channel.receive_chunked(FrameType::kExtOtMsg, 2 * kLabelBytes * count);
  std::vector<Label> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = 2 * kLabelBytes * i + ((choices[i] & 1) ? kLabelBytes : 0);
    out[i] = Label::load(y.data() + at) ^ pads[i];
  }
  return out;
}

std::string_view ot_backend_name(OtBackend backend) {
  return backend == OtBackend::kDealer ? "dealer" : "real";
}

OtBackend parse_ot_backend(std::string_view text) {
  if (text == "dealer") return OtBackend::kDealer;
  if (text == "real") return OtBackend::kReal;
  throw std::invalid_argument("unknown ot_backend '" + std::string(text) + "' (dealer | real)");
}

void ot_send(OtBackend backend, FrameChannel& channel, std::span<const OtPair> messages) {
  if (backend == OtBackend::kDealer) {
    std::vector<std::uint8_t> both(2 * kLabelBytes * messages.size());
    for (std::size_t i = 0; i < messages.size(); ++i) {
      store_labels(both, 2 * kLabelBytes * i, messages[i][0]);
      store_labels(both, 2 * kLabelBytes * i + kLabelBytes, messages[i][1]);
    }
    send_count(channel, messages.size());
    channel.send_chunked(FrameType::kExtOtMsg, both);
    return;
  }
  if (messages.size() < kKappa) {
    expect_count(channel, messages.size());
    base_ot_send(channel, messages);
    return;
  }
  Prg prg = Prg::from_entropy();
  BitVec s(kKappa);
  for (std::size_t j = 0; j < kKappa; j += 64) {
    const std::uint64_t word = prg.next_u64();
    for (std::size_t k = 0; k < 64; ++k) s[j + k] = (word >> k) & 1;
  }
  const std::vector<Label> seeds = base_ot_receive(channel, s);
  ot_extend_send(channel, s, seeds, messages);
}

std::vector<Label> ot_receive(OtBackend backend, FrameChannel& channel,
                              std::span<const std::uint8_t> choices) {
  if (backend == OtBackend::kDealer) {
    expect_count(channel, choices.size());
    const auto both = channel.receive_chunked(FrameType::kExtOtMsg, 2 * kLabelBytes * choices.size());
    std::vector<Label> out(choices.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = Label::load(both.data() + 2 * kLabelBytes * i + ((choices[i] & 1) ? kLabelBytes : 0));
    }
    return out;
  }
  if (choices.size() < kKappa) {
    send_count(channel, choices.size());
    return base_ot_receive(channel, choices);
  }
  Prg prg = Prg::from_entropy();
  std::vector<OtPair> seeds(kKappa);
  for (auto& pair : seeds) pair = {prg.next_label(), prg.next_label()};
  base_ot_send(channel, seeds);
  return ot_extend_receive(channel, seeds, choices);
}

}  // namespace mpsi
