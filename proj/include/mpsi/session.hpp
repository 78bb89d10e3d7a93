#pragma once

/// @file session.hpp
/// @brief The m-party session: handshake, share phase, garbling and result.
///
/// Topology: P1 and P2 are connected to each other and to every contributor;
/// contributors talk only to P1 and P2. Per ordered pair, frames are strictly
/// in order:
///
///   contributor -> P1: HELLO, SHARES(r)
///   contributor -> P2: HELLO, SHARES(r ^ Q(S))
///   P1 -> P2:          HELLO, GARBLER_LABELS, OT, GC_CHUNK*, DECODE_TABLE
///   P2 -> everyone:    RESULT
///
/// Any failure sends ABORT (reason only) to every peer.

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "mpsi/channel.hpp"
#include "mpsi/config.hpp"
#include "mpsi/psi_circuit.hpp"
#include "mpsi/tcp.hpp"

namespace mpsi {

/// What a party brings: exactly n distinct nonzero sigma-bit elements (padded
/// if necessary) and the size of its real set, announced in HELLO.
struct PartyInput {
  std::vector<Element> set;
  std::optional<std::uint64_t> declared_size;
};

struct PsiResult {
  bool has_intersection = false;
  /// Ascending, dummies removed.
  std::vector<Element> intersection;
  std::optional<std::uint64_t> cardinality;
  /// Declared real-set sizes of every party, this one included.
  std::map<std::uint32_t, std::uint64_t> declared_sizes;

  /// Per peer id.
  std::map<std::uint32_t, TrafficStats> traffic;
  /// Garbled-table payload bytes sent (P1) or received (P2).
  std::uint64_t garbled_bytes = 0;
  std::uint64_t and_count = 0;
  double seconds = 0;
};

struct ResultMessage {
  bool has_intersection = false;
  std::optional<std::uint64_t> cardinality;
  std::vector<Element> intersection;

  friend bool operator==(const ResultMessage&, const ResultMessage&) = default;
};

/// flags u8 | cardinality u64 | count u32 | count x element u64, big-endian.
std::vector<std::uint8_t> encode_result(const ResultMessage& result);
ResultMessage decode_result(std::span<const std::uint8_t> payload);

/// party_id u32 | config hash (32 bytes) | declared size u64.
std::vector<std::uint8_t> encode_hello(const SessionConfig& config, std::uint64_t declared_size);

/// Channels to the peers of one party, keyed by peer id. A HELLO frame already
/// consumed while identifying an accepted connection is kept in `pending_hello`.
struct PeerLinks {
  std::map<std::uint32_t, std::unique_ptr<FrameChannel>> channels;
  std::map<std::uint32_t, Frame> pending_hello;
  /// Peers that already received our HELLO.
  std::set<std::uint32_t> hello_sent;
};

/// Ids this party exchanges frames with.
std::vector<std::uint32_t> peer_ids(const SessionConfig& config);

/// Contributor shares: r is uniform from `prg`, the P2 share is r ^ Q(S).
struct SharePair {
  std::vector<Element> to_garbler;
  std::vector<Element> to_evaluator;
};
SharePair make_shares(std::span<const Element> sorted_set, std::uint32_t sigma, Prg& prg);

/// party_id u32 | n * sigma bits packed LSB first.
std::vector<std::uint8_t> encode_shares(std::uint32_t party_id, std::span<const Element> share,
                                        std::uint32_t sigma);

/// Runs one party to completion. Throws ProtocolError on any abort; no output
/// is revealed in that case.
PsiResult run_party(const SessionConfig& config, const PartyInput& input, PeerLinks& links);

/// Opens the TCP links described by the roster: connects to lower ids and
/// sends HELLO at once, then accepts higher ids on `listener` and identifies
/// each by its HELLO.
PeerLinks connect_tcp(const SessionConfig& config, TcpListener& listener,
                      std::uint64_t declared_size, std::chrono::milliseconds timeout);

/// Listens on this party's roster address, connects and runs.
PsiResult run_party_tcp(const SessionConfig& config, const PartyInput& input,
                        std::chrono::milliseconds timeout = std::chrono::seconds(60));

enum class Transport { kInProcess, kTcp };

struct SimulationOptions {
  CircuitParams params;
  OtBackend ot_backend = OtBackend::kReal;
  Transport transport = Transport::kInProcess;
};

/// All m parties on threads in this process. sets[k] belongs to party k + 1.
/// Returns one result per party, or throws the first root-cause failure.
std::vector<PsiResult> simulate_session(const SimulationOptions& options,
                                        const std::vector<PartyInput>& inputs);

}  // namespace mpsi
