#pragma once

/// @file garble.hpp
/// @brief Half-gates garbling with free XOR and point-and-permute.
///
/// Every wire w has a 0-label L_w and a 1-label L_w ^ delta, where delta is
/// global with its color bit set. XOR and INV gates are free, each AND gate
/// costs two ciphertexts. Constant wires use a public active label, so they
/// need no table material either.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mpsi/circuit.hpp"
#include "mpsi/crypto.hpp"

namespace mpsi {

class GarbleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The garbler's secret input encoding: delta and the 0-label of every input.
struct InputLabels {
  Label delta;
  std::vector<Label> garbler_zero;
  std::vector<Label> evaluator_zero;
};

/// Per output wire, the color bit of its 0-label.
struct DecodeTable {
  BitVec bits;
};

/// Draws delta and the input 0-labels from a generator seeded by `seed`.
InputLabels make_input_labels(const Circuit& circuit, const Label& seed);

/// Active labels for the given bits: the 0-label, or 0-label ^ delta.
std::vector<Label> encode_inputs(const InputLabels& labels, const BitVec& bits, InputOwner which);

/// (0-label, 1-label) pairs for every evaluator input, in order. These are the
/// sender messages of the oblivious transfers.
std::vector<std::array<Label, 2>> evaluator_label_pairs(const InputLabels& labels);

/// Receives table material in gate order, in batches.
using TableSink = std::function<void(std::span<const Label>)>;

/// Garbles every gate in order, handing the two ciphertexts of each AND gate
/// to the sink, and returns the output decoding table.
DecodeTable garble_tables(const Circuit& circuit, const InputLabels& labels, const TableSink& sink);

struct GarbledCircuit {
  InputLabels labels;
  std::vector<Label> tables;
  DecodeTable decode;
};

/// Deterministic for a given seed.
GarbledCircuit garble(const Circuit& circuit, const Label& seed);

/// Supplies table material in gate order. Must fill the whole span or throw.
using TableSource = std::function<void(std::span<Label>)>;

std::vector<Label> evaluate(const Circuit& circuit, const TableSource& source,
                            std::span<const Label> garbler_active,
                            std::span<const Label> evaluator_active);

/// Evaluates against an in-memory table stream; throws GarbleError if the
/// stream is truncated or has material left over.
std::vector<Label> evaluate(const Circuit& circuit, std::span<const Label> tables,
                            std::span<const Label> garbler_active,
                            std::span<const Label> evaluator_active);

BitVec decode_outputs(const DecodeTable& table, std::span<const Label> output_labels);

/// Bytes of table material for a circuit: 2 * 16 per AND gate.
std::uint64_t garbled_table_bytes(const CircuitStats& stats);

}  // namespace mpsi
