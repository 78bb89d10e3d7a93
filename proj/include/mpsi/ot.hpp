#pragma once

/// @file ot.hpp
/// @brief 1-out-of-2 oblivious transfer of 128-bit messages.
///
/// Three backends: an insecure dealer for tests, a Diffie-Hellman base OT over
/// ristretto255, and IKNP extension from kappa base OTs in the reversed role.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "mpsi/channel.hpp"
#include "mpsi/circuit.hpp"
#include "mpsi/crypto.hpp"

namespace mpsi {

using OtPair = std::array<Label, 2>;

class OtError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OtBatch {
  std::vector<OtPair> messages;
  BitVec choices;

  std::size_t count() const { return messages.size(); }
};

/// Hands each receiver its chosen message directly. No security whatsoever.
std::vector<Label> dealer_ot(const OtBatch& batch);

/// Bytes exchanged by base OT: one sender point, then per instance one receiver
/// point and two masked messages.
constexpr std::uint64_t base_ot_transcript_bytes(std::uint64_t count) { return 32 + 64 * count; }

/// Base OT, sender side. Throws ProtocolError on a malformed group element.
void base_ot_send(FrameChannel& channel, std::span<const OtPair> messages);
/// Base OT, receiver side.
std::vector<Label> base_ot_receive(FrameChannel& channel, std::span<const std::uint8_t> choices);

/// OT extension, sender side. `s` and `seeds` are this party's choices and
/// outputs from kappa base OTs in which it acted as receiver.
void ot_extend_send(FrameChannel& channel, std::span<const std::uint8_t> s,
                    std::span<const Label> seeds, std::span<const OtPair> messages);
/// OT extension, receiver side. `seeds` are the kappa pairs it sent as base-OT
/// sender. Requires choices.size() >= kappa.
std::vector<Label> ot_extend_receive(FrameChannel& channel, std::span<const OtPair> seeds,
                                     std::span<const std::uint8_t> choices);

enum class OtBackend { kDealer, kReal };

std::string_view ot_backend_name(OtBackend backend);
/// "dealer" or "real"; throws std::invalid_argument otherwise.
OtBackend parse_ot_backend(std::string_view text);

/// One complete OT session. The real backend uses base OT alone below kappa
/// instances and IKNP extension otherwise; the dealer backend ships both
/// messages in the clear. Every backend exchanges the instance count first and
/// fails with ProtocolError when the two sides disagree.
void ot_send(OtBackend backend, FrameChannel& channel, std::span<const OtPair> messages);
std::vector<Label> ot_receive(OtBackend backend, FrameChannel& channel,
                              std::span<const std::uint8_t> choices);

}  // namespace mpsi
