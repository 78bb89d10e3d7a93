#include "mpsi/psi_circuit.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

#include "mpsi/waksman.hpp"

namespace mpsi {

std::string_view output_mode_name(OutputMode mode) {
  switch (mode) {
    case OutputMode::kIntersection:
      return "intersection";
    case OutputMode::kCardinality:
      return "cardinality";
    case OutputMode::kBoth:
      return "both";
  }
  return "?";
}

OutputMode parse_output_mode(std::string_view text) {
  if (text == "intersection") return OutputMode::kIntersection;
  if (text == "cardinality") return OutputMode::kCardinality;
  if (text == "both") return OutputMode::kBoth;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "'");
}

void validate_params(const CircuitParams& params) {
  if (params.parties < 2) throw std::invalid_argument("at least two parties are required");
  if (params.set_size < 2 || !std::has_single_bit(params.set_size)) {
    throw std::invalid_argument("set size must be a power of two >= 2, got " +
                                std::to_string(params.set_size));
  }
  if (params.sigma == 0) throw std::invalid_argument("sigma must be positive");
}

std::uint32_t cardinality_width(std::uint32_t set_size) {
  return static_cast<std::uint32_t>(std::bit_width(set_size));
}

InputLayout derive_layout(const CircuitParams& params) {
  validate_params(params);
  InputLayout layout;
  layout.params = params;
  const std::uint64_t set_bits = std::uint64_t{params.set_size} * params.sigma;
  const std::uint64_t shuffle_bits =
      reveals_intersection(params.mode) ? waksman_switch_count(params.set_size) : 0;

  auto lay_out_side = [&](BitRange& own, std::vector<BitRange>& shares, BitRange& shuffle) {
    std::uint64_t cursor = 0;
    own = {cursor, set_bits};
    cursor += set_bits;
    for (std::uint32_t party = 3; party <= params.parties; ++party) {
      shares.push_back({cursor, set_bits});
      cursor += set_bits;
    }
    shuffle = {cursor, shuffle_bits};
    return cursor + shuffle_bits;
  };
  layout.garbler_bits =
      lay_out_side(layout.garbler_set, layout.garbler_shares, layout.garbler_shuffle);
  layout.evaluator_bits =
      lay_out_side(layout.evaluator_set, layout.evaluator_shares, layout.evaluator_shuffle);
  return layout;
}

namespace {

std::vector<Bus> buses_from(std::span<const WireId> wires, const BitRange& range,
                            std::uint32_t sigma) {
  std::vector<Bus> out(range.length / sigma);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto first = wires.begin() + static_cast<std::ptrdiff_t>(range.offset + j * sigma);
    out[j].assign(first, first + sigma);
  }
  return out;
}

bool overlaps(const BitRange& a, const BitRange& b) {
  return a.length != 0 && b.length != 0 && a.offset < b.end() && b.offset < a.end();
}

}  // namespace

std::vector<Bus> build_reconstruction(GateSink& sink, std::span<const WireId> garbler_inputs,
                                      std::span<const WireId> evaluator_inputs,
                                      const InputLayout& layout, std::uint32_t party) {
  const auto& p = layout.params;
  if (party < 3 || party > p.parties) {
    throw std::invalid_argument("only parties 3..m are reconstructed, got " +
                                std::to_string(party));
  }
  const BitRange& g = layout.garbler_shares[party - 3];
  const BitRange& e = layout.evaluator_shares[party - 3];
  const std::uint64_t want = std::uint64_t{p.set_size} * p.sigma;
  if (g.length != want || e.length != want || g.end() > garbler_inputs.size() ||
      e.end() > evaluator_inputs.size()) {
    throw std::invalid_argument("share range of party " + std::to_string(party) +
                                " does not fit the inputs");
  }
  for (std::size_t k = 0; k < layout.garbler_shares.size(); ++k) {
    if (k + 3 == party) continue;
    if (overlaps(g, layout.garbler_shares[k]) || overlaps(e, layout.evaluator_shares[k])) {
      throw std::invalid_argument("share ranges overlap");
    }
  }
  if (overlaps(g, layout.garbler_set) || overlaps(g, layout.garbler_shuffle) ||
      overlaps(e, layout.evaluator_set) || overlaps(e, layout.evaluator_shuffle)) {
    throw std::invalid_argument("share ranges overlap");
  }
  const auto r = buses_from(garbler_inputs, g, p.sigma);
  const auto r_prime = buses_from(evaluator_inputs, e, p.sigma);
  std::vector<Bus> out(r.size(), Bus(p.sigma));
  for (std::size_t j = 0; j < r.size(); ++j) {
    for (std::uint32_t b = 0; b < p.sigma; ++b) out[j][b] = sink.xor_gate(r[j][b], r_prime[j][b]);
  }
  return out;
}

ExScsBuses build_ex_scs(GateSink& sink, const InputLayout& layout) {
  const CircuitParams& p = layout.params;
  validate_params(p);
  const std::size_t n = p.set_size;

  std::vector<WireId> garbler(layout.garbler_bits);
  for (auto& w : garbler) w = sink.input(InputOwner::kGarbler);
  std::vector<WireId> evaluator(layout.evaluator_bits);
  for (auto& w : evaluator) w = sink.input(InputOwner::kEvaluator);

  std::vector<std::vector<Bus>> sets;
  sets.push_back(buses_from(garbler, layout.garbler_set, p.sigma));
  sets.push_back(buses_from(evaluator, layout.evaluator_set, p.sigma));
  for (std::uint32_t party = 3; party <= p.parties; ++party) {
    sets.push_back(build_reconstruction(sink, garbler, evaluator, layout, party));
  }

  ExScsBuses result;
  const Bus dummy = constant_bus(sink, p.sigma, 0);
  std::vector<Bus> current = std::move(sets[0]);
  std::vector<WireId> matches;
  for (std::size_t k = 1; k < sets.size(); ++k) {
    const auto merged = build_bitonic_merger(sink, current, sets[k]);
    // Middles sit at odd 0-based positions; every adjacent equal pair has
    // exactly one member there, so each duplicate is emitted once.
    std::vector<Bus> selected(n);
    matches.assign(n, WireId{});
    for (std::size_t i = 0; i < n; ++i) {
      const Bus& right = 2 * i + 2 < merged.size() ? merged[2 * i + 2] : dummy;
      auto dup = build_3dupselection(sink, merged[2 * i], merged[2 * i + 1], right);
      selected[i] = std::move(dup.out);
      matches[i] = dup.match;
    }
    result.dup_layers.push_back(selected);
    if (k + 1 < sets.size()) {
      current = build_compaction(sink, selected, p.compaction);
      result.intermediates.push_back(current);
    } else {
      current = std::move(selected);
    }
  }

  if (reveals_intersection(p.mode)) {
    auto controls_of = [](std::span<const WireId> wires, const BitRange& range) {
      return std::vector<WireId>(wires.begin() + static_cast<std::ptrdiff_t>(range.offset),
                                 wires.begin() + static_cast<std::ptrdiff_t>(range.end()));
    };
    const auto first = build_waksman(sink, current, controls_of(garbler, layout.garbler_shuffle));
    result.intersection =
        build_waksman(sink, first, controls_of(evaluator, layout.evaluator_shuffle));
  }
  if (reveals_cardinality(p.mode)) {
    // With only two sets every middle is a real element. From the third set
    // on, dummy pairs also "match", so count nonzero outputs instead.
    std::vector<WireId> hits = matches;
    if (p.parties > 2) {
      for (std::size_t i = 0; i < n; ++i) hits[i] = build_nonzero(sink, current[i]);
    }
    result.cardinality = build_counter(sink, hits);
  }

  for (const Bus& bus : result.intersection) {
    for (WireId w : bus) sink.output(w);
  }
  if (result.cardinality) {
    for (WireId w : *result.cardinality) sink.output(w);
  }
  return result;
}

PsiCircuit build_ex_scs(const CircuitParams& params) {
  PsiCircuit out;
  out.layout = derive_layout(params);
  CircuitBuilder builder;
  auto buses = build_ex_scs(builder, out.layout);
  out.circuit = builder.finish();
  out.intersection_outputs = std::move(buses.intersection);
  out.cardinality_output = std::move(buses.cardinality);
  out.dup_layers = std::move(buses.dup_layers);
  out.intermediates = std::move(buses.intermediates);
  return out;
}

CircuitStats count_ex_scs(const CircuitParams& params) {
  CostCounter counter;
  build_ex_scs(counter, derive_layout(params));
  return counter.stats();
}

std::vector<Element> sorted_checked_set(std::span<const Element> set, std::uint32_t set_size,
                                        std::uint32_t sigma) {
  if (set.size() != set_size) {
    throw std::invalid_argument("set has " + std::to_string(set.size()) + " elements, expected " +
                                std::to_string(set_size));
  }
  if (sigma == 0 || sigma > 64) throw std::invalid_argument("sigma must be in [1, 64]");
  std::vector<Element> sorted(set.begin(), set.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] == 0) throw std::invalid_argument("set contains the reserved dummy value 0");
    if (sigma < 64 && (sorted[i] >> sigma) != 0) {
      throw std::invalid_argument("element " + std::to_string(sorted[i]) + " exceeds " +
                                  std::to_string(sigma) + " bits");
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw std::invalid_argument("set contains duplicate element " + std::to_string(sorted[i]));
    }
  }
  return sorted;
}

BitVec element_bits(std::span<const Element> elements, std::uint32_t sigma) {
  if (sigma == 0 || sigma > 64) throw std::invalid_argument("sigma must be in [1, 64]");
  BitVec bits(elements.size() * sigma);
  for (std::size_t j = 0; j < elements.size(); ++j) {
    for (std::uint32_t b = 0; b < sigma; ++b) bits[j * sigma + b] = (elements[j] >> b) & 1;
  }
  return bits;
}

std::vector<Element> elements_from_bits(std::span<const std::uint8_t> bits, std::uint32_t sigma) {
  if (sigma == 0 || sigma > 64) throw std::invalid_argument("sigma must be in [1, 64]");
  std::vector<Element> out(bits.size() / sigma, 0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    for (std::uint32_t b = 0; b < sigma; ++b) {
      out[j] |= static_cast<Element>(bits[j * sigma + b] & 1) << b;
    }
  }
  return out;
}

BitVec assemble_inputs(const InputLayout& layout, InputOwner side,
                       std::span<const Element> own_set,
                       const std::vector<std::vector<Element>>& shares,
                       const BitVec& shuffle_controls) {
  const CircuitParams& p = layout.params;
  const bool garbler = side == InputOwner::kGarbler;
  const auto& share_ranges = garbler ? layout.garbler_shares : layout.evaluator_shares;
  const BitRange& set_range = garbler ? layout.garbler_set : layout.evaluator_set;
  const BitRange& shuffle_range = garbler ? layout.garbler_shuffle : layout.evaluator_shuffle;
  if (shares.size() != share_ranges.size()) {
    throw std::invalid_argument("expected shares of " + std::to_string(share_ranges.size()) +
                                " parties, got " + std::to_string(shares.size()));
  }
  if (shuffle_controls.size() != shuffle_range.length) {
    throw std::invalid_argument("expected " + std::to_string(shuffle_range.length) +
                                " shuffle control bits, got " +
                                std::to_string(shuffle_controls.size()));
  }
  BitVec bits(garbler ? layout.garbler_bits : layout.evaluator_bits, 0);
  auto place = [&](const BitRange& range, std::span<const Element> values) {
    if (values.size() != p.set_size) {
      throw std::invalid_argument("set or share has " + std::to_string(values.size()) +
                                  " elements, expected " + std::to_string(p.set_size));
    }
    const BitVec packed = element_bits(values, p.sigma);
    std::copy(packed.begin(), packed.end(), bits.begin() + static_cast<std::ptrdiff_t>(range.offset));
  };
  place(set_range, own_set);
  for (std::size_t k = 0; k < shares.size(); ++k) place(share_ranges[k], shares[k]);
  std::copy(shuffle_controls.begin(), shuffle_controls.end(),
            bits.begin() + static_cast<std::ptrdiff_t>(shuffle_range.offset));
  return bits;
}

PsiOutputs read_outputs(const CircuitParams& params, const BitVec& output_bits) {
  const std::uint64_t slot_bits =
      reveals_intersection(params.mode) ? std::uint64_t{params.set_size} * params.sigma : 0;
  const std::uint64_t count_bits =
      reveals_cardinality(params.mode) ? cardinality_width(params.set_size) : 0;
  if (output_bits.size() != slot_bits + count_bits) {
    throw std::invalid_argument("output has " + std::to_string(output_bits.size()) +
                                " bits, expected " + std::to_string(slot_bits + count_bits));
  }
  PsiOutputs out;
  if (slot_bits != 0) {
    out.slots = elements_from_bits(std::span(output_bits).first(slot_bits), params.sigma);
  }
  if (count_bits != 0) {
    std::uint64_t c = 0;
    for (std::uint64_t b = 0; b < count_bits; ++b) {
      c |= static_cast<std::uint64_t>(output_bits[slot_bits + b] & 1) << b;
    }
    out.cardinality = c;
  }
  return out;
}

}  // namespace mpsi
