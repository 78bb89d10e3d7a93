#include "mpsi/circuit.hpp"

#include <algorithm>
#include <sstream>

namespace mpsi {

std::string_view gate_kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::kXor:
      return "XOR";
    case GateKind::kAnd:
      return "AND";
    case GateKind::kInv:
      return "INV";
    case GateKind::kConst0:
      return "CONST0";
    case GateKind::kConst1:
      return "CONST1";
  }
  return "?";
}

namespace {

std::string wire_str(WireId w) { return std::to_string(w.index); }

void check_circuit(std::uint32_t num_wires, const std::vector<Gate>& gates,
                   const std::vector<WireId>& garbler_inputs,
                   const std::vector<WireId>& evaluator_inputs,
                   const std::vector<WireId>& outputs) {
  std::vector<std::uint8_t> defined(num_wires, 0);
  auto define = [&](WireId w, const char* what) {
    if (w.index >= num_wires) {
      throw CircuitError(std::string(what) + " wire " + wire_str(w) + " out of range");
    }
    if (defined[w.index]) {
      throw CircuitError("wire " + wire_str(w) + " assigned more than once");
    }
    defined[w.index] = 1;
  };
  for (WireId w : garbler_inputs) define(w, "garbler input");
  for (WireId w : evaluator_inputs) define(w, "evaluator input");

  for (std::size_t g = 0; g < gates.size(); ++g) {
    const Gate& gate = gates[g];
    const int n_in = arity(gate.kind);
    if (n_in < 0) throw CircuitError("gate " + std::to_string(g) + " has an unknown kind");
    const WireId ins[2] = {gate.in0, gate.in1};
    for (int k = 0; k < n_in; ++k) {
      const WireId in = ins[k];
      if (in.index >= num_wires || !defined[in.index]) {
        throw CircuitError("gate " + std::to_string(g) + " reads undefined wire " + wire_str(in));
      }
      if (in.index >= gate.out.index) {
        throw CircuitError("gate " + std::to_string(g) + " is not topologically ordered");
      }
    }
    define(gate.out, "gate output");
  }
  for (std::uint32_t w = 0; w < num_wires; ++w) {
    if (!defined[w]) throw CircuitError("wire " + std::to_string(w) + " is never assigned");
  }
  for (WireId w : outputs) {
    if (w.index >= num_wires) throw CircuitError("output wire " + wire_str(w) + " does not exist");
  }
}

}  // namespace

Circuit build_circuit(std::vector<Gate> gates, std::vector<WireId> garbler_inputs,
                      std::vector<WireId> evaluator_inputs, std::vector<WireId> outputs) {
  std::uint32_t num_wires = 0;
  auto bump = [&](WireId w) { num_wires = std::max(num_wires, w.index + 1); };
  for (WireId w : garbler_inputs) bump(w);
  for (WireId w : evaluator_inputs) bump(w);
  for (const Gate& g : gates) bump(g.out);

  check_circuit(num_wires, gates, garbler_inputs, evaluator_inputs, outputs);

  Circuit c;
  c.num_wires_ = num_wires;
  c.gates_ = std::move(gates);
  c.garbler_inputs_ = std::move(garbler_inputs);
  c.evaluator_inputs_ = std::move(evaluator_inputs);
  c.outputs_ = std::move(outputs);
  return c;
}

void validate(const Circuit& circuit) {
  check_circuit(circuit.num_wires(), circuit.gates(), circuit.garbler_inputs(),
                circuit.evaluator_inputs(), circuit.outputs());
}

CircuitStats stats(const Circuit& circuit) {
  CircuitStats s;
  s.total_gates = circuit.gates().size();
  std::vector<std::uint32_t> depth(circuit.num_wires(), 0);
  for (const Gate& g : circuit.gates()) {
    switch (g.kind) {
      case GateKind::kAnd:
        ++s.and_count;
        depth[g.out.index] = std::max(depth[g.in0.index], depth[g.in1.index]) + 1;
        break;
      case GateKind::kXor:
        depth[g.out.index] = std::max(depth[g.in0.index], depth[g.in1.index]);
        break;
      case GateKind::kInv:
        depth[g.out.index] = depth[g.in0.index];
        break;
      case GateKind::kConst0:
      case GateKind::kConst1:
        break;
    }
  }
  for (WireId w : circuit.outputs()) {
    s.and_depth = std::max<std::uint64_t>(s.and_depth, depth[w.index]);
  }
  return s;
}

BitVec eval_wires(const Circuit& circuit, const BitVec& garbler_bits,
                  const BitVec& evaluator_bits) {
  if (garbler_bits.size() != circuit.garbler_inputs().size()) {
    throw CircuitError("garbler input has " + std::to_string(garbler_bits.size()) +
                       " bits, circuit expects " +
                       std::to_string(circuit.garbler_inputs().size()));
  }
  if (evaluator_bits.size() != circuit.evaluator_inputs().size()) {
    throw CircuitError("evaluator input has " + std::to_string(evaluator_bits.size()) +
                       " bits, circuit expects " +
                       std::to_string(circuit.evaluator_inputs().size()));
  }
  BitVec v(circuit.num_wires(), 0);
  for (std::size_t i = 0; i < garbler_bits.size(); ++i) {
    v[circuit.garbler_inputs()[i].index] = garbler_bits[i] & 1;
  }
  for (std::size_t i = 0; i < evaluator_bits.size(); ++i) {
    v[circuit.evaluator_inputs()[i].index] = evaluator_bits[i] & 1;
  }
  for (const Gate& g : circuit.gates()) {
    std::uint8_t r = 0;
    switch (g.kind) {
      case GateKind::kXor:
        r = v[g.in0.index] ^ v[g.in1.index];
        break;
      case GateKind::kAnd:
        r = v[g.in0.index] & v[g.in1.index];
        break;
      case GateKind::kInv:
        r = v[g.in0.index] ^ 1;
        break;
      case GateKind::kConst0:
        r = 0;
        break;
      case GateKind::kConst1:
        r = 1;
        break;
    }
    v[g.out.index] = r;
  }
  return v;
}

BitVec eval_plaintext(const Circuit& circuit, const BitVec& garbler_bits,
                      const BitVec& evaluator_bits) {
  const BitVec v = eval_wires(circuit, garbler_bits, evaluator_bits);
  BitVec out;
  out.reserve(circuit.outputs().size());
  for (WireId w : circuit.outputs()) out.push_back(v[w.index]);
  return out;
}

std::string to_netlist(const Circuit& circuit) {
  std::ostringstream os;
  os << "# wires " << circuit.num_wires() << "\n# garbler_inputs";
  for (WireId w : circuit.garbler_inputs()) os << ' ' << w.index;
  os << "\n# evaluator_inputs";
  for (WireId w : circuit.evaluator_inputs()) os << ' ' << w.index;
  os << "\n# outputs";
  for (WireId w : circuit.outputs()) os << ' ' << w.index;
  os << '\n';
  for (const Gate& g : circuit.gates()) {
    os << gate_kind_name(g.kind);
    const int n_in = arity(g.kind);
    if (n_in >= 1) os << ' ' << g.in0.index;
    if (n_in >= 2) os << ' ' << g.in1.index;
    os << " -> " << g.out.index << '\n';
  }
  return os.str();
}

WireId GateSink::constant(bool value) {
  auto& slot = value ? const1_ : const0_;
  if (!slot) slot = emit(value ? GateKind::kConst1 : GateKind::kConst0, WireId{}, WireId{});
  return *slot;
}

WireId CircuitBuilder::input(InputOwner owner) {
  const WireId w{next_wire_++};
  (owner == InputOwner::kGarbler ? garbler_inputs_ : evaluator_inputs_).push_back(w);
  return w;
}

void CircuitBuilder::output(WireId wire) { outputs_.push_back(wire); }

WireId CircuitBuilder::emit(GateKind kind, WireId a, WireId b) {
  const WireId out{next_wire_++};
  gates_.push_back(Gate{kind, a, b, out});
  return out;
}

Circuit CircuitBuilder::finish() {
  Circuit c = build_circuit(std::move(gates_), std::move(garbler_inputs_),
                            std::move(evaluator_inputs_), std::move(outputs_));
  *this = CircuitBuilder{};
  return c;
}

WireId CostCounter::input(InputOwner owner) {
  ++(owner == InputOwner::kGarbler ? garbler_inputs_ : evaluator_inputs_);
  return WireId{0};
}

void CostCounter::output(WireId wire) {
  stats_.and_depth = std::max<std::uint64_t>(stats_.and_depth, wire.index);
}

WireId CostCounter::emit(GateKind kind, WireId a, WireId b) {
  ++stats_.total_gates;
  switch (kind) {
    case GateKind::kAnd:
      ++stats_.and_count;
      return WireId{std::max(a.index, b.index) + 1};
    case GateKind::kXor:
      return WireId{std::max(a.index, b.index)};
    case GateKind::kInv:
      return a;
    case GateKind::kConst0:
    case GateKind::kConst1:
      return WireId{0};
  }
  return WireId{0};
}

}  // namespace mpsi
