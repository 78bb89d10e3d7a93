#pragma once

/// @file blocks.hpp
/// @brief Circuit builders for the sort-compare-shuffle pipeline.
///
/// Every builder emits into a GateSink. Elements travel on buses of sigma
/// wires, least significant bit first. The value 0 on a bus is the dummy.

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mpsi/circuit.hpp"

namespace mpsi {

/// One sigma-bit element, LSB first.
using Bus = std::vector<WireId>;

/// Bus holding a compile-time constant.
Bus constant_bus(GateSink& sink, std::size_t width, std::uint64_t value);

/// [x > y] as unsigned integers. Exactly sigma ANDs.
WireId build_gt(GateSink& sink, const Bus& x, const Bus& y);

/// [x == y]. sigma-1 ANDs (bitwise XNOR, balanced AND tree).
WireId build_eq(GateSink& sink, const Bus& x, const Bus& y);

/// OR of two bits, one AND.
WireId build_or(GateSink& sink, WireId a, WireId b);

/// [x != 0]. sigma-1 ANDs.
WireId build_nonzero(GateSink& sink, const Bus& x);

/// x if s else y. sigma ANDs.
Bus build_mux(GateSink& sink, WireId s, const Bus& x, const Bus& y);

/// (x, y) if s = 0, (y, x) if s = 1. sigma ANDs.
std::pair<Bus, Bus> build_cond_swap(GateSink& sink, WireId s, const Bus& x, const Bus& y);

/// (min, max). 2 sigma ANDs.
std::pair<Bus, Bus> build_2sorter(GateSink& sink, const Bus& x, const Bus& y);

struct DupSelection {
  Bus out;       // b if match, otherwise the dummy
  WireId match;  // (a == b) or (b == c)
};

/// Emits b when it equals one of its neighbours. 3 sigma - 1 ANDs.
DupSelection build_3dupselection(GateSink& sink, const Bus& a, const Bus& b, const Bus& c);

/// Merges two ascending lists of equal power-of-two length into one ascending
/// list. Uses n * log2(2n) 2-sorters.
std::vector<Bus> build_bitonic_merger(GateSink& sink, std::span<const Bus> a,
                                      std::span<const Bus> b);

/// Full bitonic sorting network over a power-of-two number of buses.
std::vector<Bus> build_bitonic_sort(GateSink& sink, std::span<const Bus> values);

enum class Compaction : std::uint8_t {
  /// Bitonic sort keyed on the element value.
  kSortingNetwork,
  /// Order-preserving shift network routed by suffix dummy counts.
  kShiftNetwork,
};

/// "sort" or "shift".
std::string_view compaction_name(Compaction kind);
/// Inverse of compaction_name; throws std::invalid_argument.
Compaction parse_compaction(std::string_view text);

/// Moves all dummies (zero) to the front. Ascending nonzero entries come out
/// ascending after the dummies; the shift network also keeps arbitrary nonzero
/// entries in their relative order. Requires a power-of-two length.
std::vector<Bus> build_compaction(GateSink& sink, std::span<const Bus> values,
                                  Compaction kind = Compaction::kSortingNetwork);

/// Hamming weight of the given bits, bit_width(n) bits wide.
///
/// Balanced adder tree; each addition is only as wide as the largest sum it
/// can produce.
Bus build_counter(GateSink& sink, std::span<const WireId> bits);

}  // namespace mpsi
