#pragma once

/// @file psi_circuit.hpp
/// @brief Composition of the m-party intersection circuit.
///
/// P1 (garbler) and P2 (evaluator) feed their own sorted sets directly. Every
/// other party i >= 3 is XOR-shared between them and reconstructed inside the
/// circuit. The sets are then folded left to right: merge with the next set,
/// select adjacent duplicates, compact, and repeat. The last round either
/// shuffles the n candidates (intersection) or counts the matches
/// (cardinality), or both.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mpsi/blocks.hpp"
#include "mpsi/circuit.hpp"

namespace mpsi {

using Element = std::uint64_t;

enum class OutputMode : std::uint8_t { kIntersection, kCardinality, kBoth };

constexpr bool reveals_intersection(OutputMode mode) { return mode != OutputMode::kCardinality; }
constexpr bool reveals_cardinality(OutputMode mode) { return mode != OutputMode::kIntersection; }

std::string_view output_mode_name(OutputMode mode);
OutputMode parse_output_mode(std::string_view text);

struct CircuitParams {
  std::uint32_t parties = 2;
  std::uint32_t set_size = 2;
  std::uint32_t sigma = 32;
  OutputMode mode = OutputMode::kIntersection;
  Compaction compaction = Compaction::kSortingNetwork;
};

/// Throws std::invalid_argument unless parties >= 2, set_size is a power of
/// two >= 2 and sigma >= 1.
void validate_params(const CircuitParams& params);

/// Half-open range of input bit positions on one side.
struct BitRange {
  std::uint64_t offset = 0;
  std::uint64_t length = 0;

  std::uint64_t end() const { return offset + length; }
  friend bool operator==(const BitRange&, const BitRange&) = default;
};

/// Input bit positions on each side. Element j of a set occupies
/// [offset + j * sigma, offset + (j + 1) * sigma), LSB first.
struct InputLayout {
  CircuitParams params;
  BitRange garbler_set;
  BitRange evaluator_set;
  /// Entry k holds the share of party k + 3.
  std::vector<BitRange> garbler_shares;
  std::vector<BitRange> evaluator_shares;
  BitRange garbler_shuffle;
  BitRange evaluator_shuffle;
  std::uint64_t garbler_bits = 0;
  std::uint64_t evaluator_bits = 0;

  friend bool operator==(const InputLayout& a, const InputLayout& b) {
    return a.garbler_set == b.garbler_set && a.evaluator_set == b.evaluator_set &&
           a.garbler_shares == b.garbler_shares && a.evaluator_shares == b.evaluator_shares &&
           a.garbler_shuffle == b.garbler_shuffle && a.evaluator_shuffle == b.evaluator_shuffle &&
           a.garbler_bits == b.garbler_bits && a.evaluator_bits == b.evaluator_bits;
  }
};

/// Canonical layout: own set, then shares of parties 3..m in party order, then
/// the shuffle controls. Both sides derive it from the parameters alone.
InputLayout derive_layout(const CircuitParams& params);

/// Rebuilds Q(S_party) as the XOR of the two share ranges. Free of ANDs.
std::vector<Bus> build_reconstruction(GateSink& sink, std::span<const WireId> garbler_inputs,
                                      std::span<const WireId> evaluator_inputs,
                                      const InputLayout& layout, std::uint32_t party);

/// Buses produced while composing the circuit.
struct ExScsBuses {
  std::vector<Bus> intersection;
  std::optional<Bus> cardinality;
  /// Duplicate-selection outputs of every round (n buses each).
  std::vector<std::vector<Bus>> dup_layers;
  /// Compacted intermediate set after every non-final round.
  std::vector<std::vector<Bus>> intermediates;
};

/// Emits the whole circuit into a sink: creates the inputs in layout order,
/// composes the rounds and marks the outputs (intersection buses first, then
/// the cardinality bus).
ExScsBuses build_ex_scs(GateSink& sink, const InputLayout& layout);

struct PsiCircuit {
  Circuit circuit;
  InputLayout layout;
  std::vector<Bus> intersection_outputs;
  std::optional<Bus> cardinality_output;
  std::vector<std::vector<Bus>> dup_layers;
  std::vector<std::vector<Bus>> intermediates;
};

PsiCircuit build_ex_scs(const CircuitParams& params);

/// Same numbers as stats(build_ex_scs(params).circuit) without materializing.
CircuitStats count_ex_scs(const CircuitParams& params);

/// Checks a party's set (exactly n distinct nonzero sigma-bit elements) and
/// returns it sorted ascending. Throws std::invalid_argument.
std::vector<Element> sorted_checked_set(std::span<const Element> set, std::uint32_t set_size,
                                        std::uint32_t sigma);

/// Element j bit b lands at index j * sigma + b. Requires sigma <= 64.
BitVec element_bits(std::span<const Element> elements, std::uint32_t sigma);
std::vector<Element> elements_from_bits(std::span<const std::uint8_t> bits, std::uint32_t sigma);

/// Input bits for one side. own_set must be sorted; shares[k] belongs to
/// party k + 3.
BitVec assemble_inputs(const InputLayout& layout, InputOwner side,
                       std::span<const Element> own_set,
                       const std::vector<std::vector<Element>>& shares,
                       const BitVec& shuffle_controls);

struct PsiOutputs {
  /// The n shuffled candidates; zeros are dummies.
  std::vector<Element> slots;
  std::optional<std::uint64_t> cardinality;
};

PsiOutputs read_outputs(const CircuitParams& params, const BitVec& output_bits);

/// Width of the cardinality bus.
std::uint32_t cardinality_width(std::uint32_t set_size);

}  // namespace mpsi
