#pragma once

/// @file waksman.hpp
/// @brief Waksman permutation network: circuit builder and switch routing.
///
/// A permutation pi of size n sends input i to output pi[i]. The network for
/// n = 2 is one switch; for larger n it is a column of n/2 input switches, two
/// recursive subnetworks of size n/2 (top, then bottom), and a column of
/// n/2 - 1 output switches. Control bits are listed in exactly that order.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mpsi/blocks.hpp"

namespace mpsi {

struct WaksmanPlan {
  std::size_t size = 0;
  BitVec switch_controls;
};

/// n * log2(n) - n + 1 for a power-of-two n >= 2.
std::uint64_t waksman_switch_count(std::uint64_t n);

/// Applies the switch network to the buses. Each switch is a cond-swap.
std::vector<Bus> build_waksman(GateSink& sink, std::span<const Bus> values,
                               std::span<const WireId> controls);

/// Control bits that make build_waksman realize pi. Deterministic.
/// Throws std::invalid_argument when pi is not a bijection of a power-of-two
/// size >= 2.
WaksmanPlan route_waksman(std::span<const std::uint32_t> pi);

}  // namespace mpsi
