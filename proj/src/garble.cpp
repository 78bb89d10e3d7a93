#include "mpsi/garble.hpp"

#include <algorithm>
#include <string>

namespace mpsi {

namespace {

// Active label of every constant wire; public to both sides.
constexpr Label kConstantLabel{0x0123456789abcdefULL, 0x0fedcba987654320ULL};

constexpr std::size_t kSinkBatch = 1 << 14;

}  // namespace

InputLabels make_input_labels(const Circuit& circuit, const Label& seed) {
  Prg prg(seed);
  InputLabels labels;
  labels.delta = prg.next_label();
  labels.delta.lo |= 1;
  labels.garbler_zero.resize(circuit.garbler_inputs().size());
  for (auto& l : labels.garbler_zero) l = prg.next_label();
  labels.evaluator_zero.resize(circuit.evaluator_inputs().size());
  for (auto& l : labels.evaluator_zero) l = prg.next_label();
  return labels;
}

std::vector<Label> encode_inputs(const InputLabels& labels, const BitVec& bits, InputOwner which) {
  const auto& zero = which == InputOwner::kGarbler ? labels.garbler_zero : labels.evaluator_zero;
  if (bits.size() != zero.size()) {
    throw GarbleError("encode_inputs: got " + std::to_string(bits.size()) + " bits for " +
                      std::to_string(zero.size()) + " input wires");
  }
  std::vector<Label> active(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    active[i] = (bits[i] & 1) ? zero[i] ^ labels.delta : zero[i];
  }
  return active;
}

std::vector<std::array<Label, 2>> evaluator_label_pairs(const InputLabels& labels) {
  std::vector<std::array<Label, 2>> pairs(labels.evaluator_zero.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    pairs[i] = {labels.evaluator_zero[i], labels.evaluator_zero[i] ^ labels.delta};
  }
  return pairs;
}

DecodeTable garble_tables(const Circuit& circuit, const InputLabels& labels, const TableSink& sink) {
  if (labels.garbler_zero.size() != circuit.garbler_inputs().size() ||
      labels.evaluator_zero.size() != circuit.evaluator_inputs().size()) {
    throw GarbleError("input labels do not match the circuit");
  }
  const Label delta = labels.delta;
  std::vector<Label> zero(circuit.num_wires());
  for (std::size_t i = 0; i < labels.garbler_zero.size(); ++i) {
    zero[circuit.garbler_inputs()[i].index] = labels.garbler_zero[i];
  }
  for (std::size_t i = 0; i < labels.evaluator_zero.size(); ++i) {
    zero[circuit.evaluator_inputs()[i].index] = labels.evaluator_zero[i];
  }

  TweakHash hash;
  std::vector<Label> batch;
  batch.reserve(kSinkBatch);
  std::uint64_t and_index = 0;
  for (const Gate& g : circuit.gates()) {
    switch (g.kind) {
      case GateKind::kXor:
        zero[g.out.index] = zero[g.in0.index] ^ zero[g.in1.index];
        break;
      case GateKind::kInv:
        zero[g.out.index] = zero[g.in0.index] ^ delta;
        break;
      case GateKind::kConst0:
        zero[g.out.index] = kConstantLabel;
        break;
      case GateKind::kConst1:
        zero[g.out.index] = kConstantLabel ^ delta;
        break;
      case GateKind::kAnd: {
        const Label a0 = zero[g.in0.index];
        const Label b0 = zero[g.in1.index];
        const bool pa = a0.color();
        const bool pb = b0.color();
        const std::uint64_t j0 = 2 * and_index;
        const std::uint64_t j1 = 2 * and_index + 1;
        const Label in[4] = {a0, a0 ^ delta, b0, b0 ^ delta};
        const std::uint64_t tweaks[4] = {j0, j0, j1, j1};
        Label h[4];
        hash.hash(in, tweaks, h);
        // Garbler half: multiplies by the color of b.
        Label tg = h[0] ^ h[1];
        if (pb) tg ^= delta;
        Label wg = h[0];
        if (pa) wg ^= tg;
        // Evaluator half: multiplies by the known value of b.
        const Label te = h[2] ^ h[3] ^ a0;
        Label we = h[2];
        if (pb) we ^= te ^ a0;
        zero[g.out.index] = wg ^ we;
        batch.push_back(tg);
        batch.push_back(te);
        if (batch.size() >= kSinkBatch) {
          sink(batch);
          batch.clear();
        }
        ++and_index;
        break;
      }
    }
  }
  if (!batch.empty()) sink(batch);

  DecodeTable decode;
  decode.bits.reserve(circuit.outputs().size());
  for (WireId w : circuit.outputs()) decode.bits.push_back(zero[w.index].color());
  return decode;
}

GarbledCircuit garble(const Circuit& circuit, const Label& seed) {
  GarbledCircuit gc;
  gc.labels = make_input_labels(circuit, seed);
  gc.tables.reserve(2 * stats(circuit).and_count);
  gc.decode = garble_tables(circuit, gc.labels, [&](std::span<const Label> chunk) {
    gc.tables.insert(gc.tables.end(), chunk.begin(), chunk.end());
  });
  return gc;
}

std::vector<Label> evaluate(const Circuit& circuit, const TableSource& source,
                            std::span<const Label> garbler_active,
                            std::span<const Label> evaluator_active) {
  if (garbler_active.size() != circuit.garbler_inputs().size() ||
      evaluator_active.size() != circuit.evaluator_inputs().size()) {
    throw GarbleError("evaluate: active label count does not match the circuit inputs");
  }
  std::vector<Label> active(circuit.num_wires());
  for (std::size_t i = 0; i < garbler_active.size(); ++i) {
    active[circuit.garbler_inputs()[i].index] = garbler_active[i];
  }
  for (std::size_t i = 0; i < evaluator_active.size(); ++i) {
    active[circuit.evaluator_inputs()[i].index] = evaluator_active[i];
  }

  TweakHash hash;
  std::vector<Label> buffer;
  std::size_t buffer_pos = 0;
  std::uint64_t remaining = 0;
  for (const Gate& g : circuit.gates()) {
    if (g.kind == GateKind::kAnd) ++remaining;
  }
  remaining *= 2;

  std::uint64_t and_index = 0;
  for (const Gate& g : circuit.gates()) {
    switch (g.kind) {
      case GateKind::kXor:
        active[g.out.index] = active[g.in0.index] ^ active[g.in1.index];
        break;
      case GateKind::kInv:
        active[g.out.index] = active[g.in0.index];
        break;
      case GateKind::kConst0:
      case GateKind::kConst1:
        active[g.out.index] = kConstantLabel;
        break;
      case GateKind::kAnd: {
        if (buffer_pos == buffer.size()) {
          buffer.resize(std::min<std::uint64_t>(remaining, kSinkBatch));
          source(buffer);
          remaining -= buffer.size();
          buffer_pos = 0;
        }
        const Label tg = buffer[buffer_pos];
        const Label te = buffer[buffer_pos + 1];
        buffer_pos += 2;
        const Label a = active[g.in0.index];
        const Label b = active[g.in1.index];
        const Label in[2] = {a, b};
        const std::uint64_t tweaks[2] = {2 * and_index, 2 * and_index + 1};
        Label h[2];
        hash.hash(in, tweaks, h);
        Label wg = h[0];
        if (a.color()) wg ^= tg;
        Label we = h[1];
        if (b.color()) we ^= te ^ a;
        active[g.out.index] = wg ^ we;
        ++and_index;
        break;
      }
    }
  }

  std::vector<Label> out;
  out.reserve(circuit.outputs().size());
  for (WireId w : circuit.outputs()) out.push_back(active[w.index]);
  return out;
}

std::vector<Label> evaluate(const Circuit& circuit, std::span<const Label> tables,
                            std::span<const Label> garbler_active,
                            std::span<const Label> evaluator_active) {
  const std::uint64_t needed = 2 * stats(circuit).and_count;
  if (tables.size() < needed) {
    throw GarbleError("garbled table stream truncated: " + std::to_string(tables.size()) +
                      " of " + std::to_string(needed) + " ciphertexts");
  }
  if (tables.size() > needed) throw GarbleError("garbled table stream has trailing material");
  std::size_t pos = 0;
  return evaluate(
      circuit,
      [&](std::span<Label> out) {
        std::copy(tables.begin() + static_cast<std::ptrdiff_t>(pos),
                  tables.begin() + static_cast<std::ptrdiff_t>(pos + out.size()), out.begin());
        pos += out.size();
      },
      garbler_active, evaluator_active);
}

BitVec decode_outputs(const DecodeTable& table, std::span<const Label> output_labels) {
  if (table.bits.size() != output_labels.size()) {
    throw GarbleError("decode_outputs: " + std::to_string(output_labels.size()) +
                      " labels for a table of " + std::to_string(table.bits.size()));
  }
  BitVec bits(output_labels.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = static_cast<std::uint8_t>(output_labels[i].color() ^ (table.bits[i] & 1));
  }
  return bits;
}

std::uint64_t garbled_table_bytes(const CircuitStats& stats) {
  return 2 * kLabelBytes * stats.and_count;
}

}  // namespace mpsi
