#pragma once

/// @file bench.hpp
/// @brief Gate-count and communication reports over a parameter sweep.
///
/// Gate counts come from the same circuit builders the protocol uses, fed into
/// a counting sink so that n = 2^16 and beyond fit in memory. Published
/// reference figures are printed alongside where they exist.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpsi/circuit.hpp"
#include "mpsi/ot.hpp"
#include "mpsi/psi_circuit.hpp"

namespace mpsi {

struct LiveMeasurement {
  std::uint64_t p1_to_p2_bytes = 0;
  std::uint64_t p2_to_p1_bytes = 0;
  std::uint64_t garbled_bytes = 0;
  double seconds = 0;
};

struct BenchRow {
  CircuitParams params;
  bool sigma_auto = false;
  CircuitStats stats;
  double per_element = 0;
  std::uint64_t table_bytes = 0;
  std::optional<std::uint32_t> ref_gates_per_element;
  std::optional<std::uint32_t> ref_depth;
  std::optional<double> ref_seconds;
  std::optional<double> ref_megabytes;
  std::optional<LiveMeasurement> live;
};

struct BenchOptions {
  std::vector<std::uint32_t> ns{1u << 12};
  std::vector<std::uint32_t> ms{3};
  /// Decimal bit counts or "auto" (40 + 2 log2 n - 1, uncapped).
  std::vector<std::string> sigmas{"32"};
  OutputMode mode = OutputMode::kIntersection;
  Compaction compaction = Compaction::kSortingNetwork;
  /// Also run an in-process session per point and measure traffic and time.
  bool live = false;
  OtBackend ot_backend = OtBackend::kReal;
};

/// Published gates-per-element and depth (three parties; sigma 32, or the
/// hashed length for "auto").
struct GateReference {
  std::uint32_t gates_per_element;
  std::uint32_t depth;
};
std::optional<GateReference> reference_gates(std::uint32_t m, std::uint32_t n, std::uint32_t sigma,
                                             bool sigma_auto);

/// Published running time (s) and communication (MB) at sigma = 32.
struct TrafficReference {
  double seconds;
  double megabytes;
};
std::optional<TrafficReference> reference_traffic(std::uint32_t m, std::uint32_t n,
                                                  std::uint32_t sigma);

/// One sweep point. Throws std::invalid_argument on bad parameters.
BenchRow bench_point(const CircuitParams& params, bool sigma_auto, bool live,
                     OtBackend backend = OtBackend::kReal);

std::vector<BenchRow> run_bench(const BenchOptions& options);

std::string bench_csv(const std::vector<BenchRow>& rows);
std::string bench_text(const std::vector<BenchRow>& rows);

/// AND gates of the Hamming-weight counter over n bits, next to the published
/// formula n log2 n - n.
struct CounterCost {
  std::uint32_t n = 0;
  std::uint64_t and_count = 0;
  std::uint64_t formula = 0;
};
CounterCost counter_cost(std::uint32_t n);

}  // namespace mpsi
