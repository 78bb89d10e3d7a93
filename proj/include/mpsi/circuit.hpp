#pragma once

/// @file circuit.hpp
/// @brief Boolean circuit representation: gates over dense wire ids, building,
/// validation, plaintext evaluation and cost accounting.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpsi {

/// Dense wire index, assigned in creation order.
struct WireId {
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(WireId, WireId) = default;
};

enum class GateKind : std::uint8_t { kXor, kAnd, kInv, kConst0, kConst1 };

/// Number of input wires a gate of this kind reads.
constexpr int arity(GateKind kind) {
  switch (kind) {
    case GateKind::kXor:
    case GateKind::kAnd:
      return 2;
    case GateKind::kInv:
      return 1;
    case GateKind::kConst0:
    case GateKind::kConst1:
      return 0;
  }
  return -1;
}

std::string_view gate_kind_name(GateKind kind);

struct Gate {
  GateKind kind = GateKind::kXor;
  WireId in0;
  WireId in1;
  WireId out;
};

/// Which side of the two-party computation provides an input wire.
enum class InputOwner : std::uint8_t { kGarbler, kEvaluator };

class CircuitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One bit per entry, each entry 0 or 1.
using BitVec = std::vector<std::uint8_t>;

/// An immutable, validated circuit. Construct through build_circuit() or
/// CircuitBuilder::finish().
class Circuit {
 public:
  Circuit() = default;

  std::uint32_t num_wires() const { return num_wires_; }
  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<WireId>& garbler_inputs() const { return garbler_inputs_; }
  const std::vector<WireId>& evaluator_inputs() const { return evaluator_inputs_; }
  const std::vector<WireId>& outputs() const { return outputs_; }

 private:
  friend Circuit build_circuit(std::vector<Gate>, std::vector<WireId>,
                               std::vector<WireId>, std::vector<WireId>);

  std::uint32_t num_wires_ = 0;
  std::vector<Gate> gates_;
  std::vector<WireId> garbler_inputs_;
  std::vector<WireId> evaluator_inputs_;
  std::vector<WireId> outputs_;
};

/// Validates a gate stream and wraps it as a Circuit.
///
/// Wires must be dense in [0, W); every wire is either an input or the output
/// of exactly one gate, and every gate reads only wires already defined with
/// smaller indices than its output. Throws CircuitError otherwise.
Circuit build_circuit(std::vector<Gate> gates, std::vector<WireId> garbler_inputs,
                      std::vector<WireId> evaluator_inputs, std::vector<WireId> outputs);

/// Re-runs the validation performed by build_circuit.
void validate(const Circuit& circuit);

struct CircuitStats {
  std::uint64_t and_count = 0;
  std::uint64_t and_depth = 0;
  std::uint64_t total_gates = 0;

  friend bool operator==(const CircuitStats&, const CircuitStats&) = default;
};

/// AND-depth counts AND gates only on the deepest input-to-output path.
CircuitStats stats(const Circuit& circuit);

/// Evaluates every wire; the returned vector is indexed by wire id.
BitVec eval_wires(const Circuit& circuit, const BitVec& garbler_bits,
                  const BitVec& evaluator_bits);

BitVec eval_plaintext(const Circuit& circuit, const BitVec& garbler_bits,
                      const BitVec& evaluator_bits);

/// Debug dump, one gate per line: "<KIND> <in...> -> <out>".
std::string to_netlist(const Circuit& circuit);

/// Destination for gates emitted by the block builders.
///
/// Builders only talk to this interface, so the same construction code can
/// materialize a Circuit or merely count its cost.
class GateSink {
 public:
  virtual ~GateSink() = default;

  virtual WireId input(InputOwner owner) = 0;
  virtual void output(WireId wire) = 0;

  WireId xor_gate(WireId a, WireId b) { return emit(GateKind::kXor, a, b); }
  WireId and_gate(WireId a, WireId b) { return emit(GateKind::kAnd, a, b); }
  WireId inv_gate(WireId a) { return emit(GateKind::kInv, a, a); }

  /// Constant wires are created once per sink and reused.
  WireId constant(bool value);

 protected:
  virtual WireId emit(GateKind kind, WireId a, WireId b) = 0;

 private:
  std::optional<WireId> const0_;
  std::optional<WireId> const1_;
};

/// Materializes the emitted gates.
class CircuitBuilder final : public GateSink {
 public:
  WireId input(InputOwner owner) override;
  void output(WireId wire) override;

  std::uint32_t num_wires() const { return next_wire_; }

  /// Validates and returns the circuit; the builder is left empty.
  Circuit finish();

 protected:
  WireId emit(GateKind kind, WireId a, WireId b) override;

 private:
  std::uint32_t next_wire_ = 0;
  std::vector<Gate> gates_;
  std::vector<WireId> garbler_inputs_;
  std::vector<WireId> evaluator_inputs_;
  std::vector<WireId> outputs_;
};

/// Computes CircuitStats for an emitted gate stream without storing it.
///
/// Handles issued by this sink carry the AND-depth of the wire in their index
/// instead of a dense position; they are only meaningful to this sink. The
/// result is identical to stats() of the materialized circuit.
class CostCounter final : public GateSink {
 public:
  WireId input(InputOwner owner) override;
  void output(WireId wire) override;

  CircuitStats stats() const { return stats_; }
  std::uint64_t garbler_inputs() const { return garbler_inputs_; }
  std::uint64_t evaluator_inputs() const { return evaluator_inputs_; }

 protected:
  WireId emit(GateKind kind, WireId a, WireId b) override;

 private:
  CircuitStats stats_;
  std::uint64_t garbler_inputs_ = 0;
  std::uint64_t evaluator_inputs_ = 0;
};

}  // namespace mpsi
