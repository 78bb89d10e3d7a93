#pragma once

// Shared helpers for the test binaries.

#include <algorithm>
#include <exception>
#include <thread>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "mpsi/blocks.hpp"
#include "mpsi/channel.hpp"
#include "mpsi/circuit.hpp"
#include "mpsi/crypto.hpp"
#include "mpsi/psi_circuit.hpp"
#include "mpsi/waksman.hpp"

namespace testing {

using mpsi::BitVec;
using mpsi::Bus;
using mpsi::Element;

inline Bus garbler_bus(mpsi::GateSink& sink, std::size_t width) {
  Bus b(width);
  for (auto& w : b) w = sink.input(mpsi::InputOwner::kGarbler);
  return b;
}

inline void mark(mpsi::GateSink& sink, const Bus& bus) {
  for (auto w : bus) sink.output(w);
}

inline void push_value(BitVec& bits, std::uint64_t v, std::size_t width) {
  for (std::size_t i = 0; i < width; ++i) bits.push_back((v >> i) & 1);
}

inline std::uint64_t take_value(const BitVec& bits, std::size_t& pos, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v |= std::uint64_t{bits[pos++]} << i;
  return v;
}

// A circuit whose garbler inputs are `count` buses of `width` bits, built by
// `body` which marks its own outputs. Evaluated in the clear.
class BusCircuit {
 public:
  BusCircuit(std::size_t count, std::size_t width,
             const std::function<void(mpsi::GateSink&, const std::vector<Bus>&)>& body)
      : width_(width) {
    mpsi::CircuitBuilder b;
    std::vector<Bus> in(count);
    for (auto& bus : in) bus = garbler_bus(b, width);
    body(b, in);
    circuit_ = b.finish();
  }

  BitVec run(const std::vector<std::uint64_t>& values) const {
    BitVec bits;
    for (auto v : values) push_value(bits, v, width_);
    return mpsi::eval_plaintext(circuit_, bits, {});
  }

  // Outputs read back as buses of the given widths.
  std::vector<std::uint64_t> run_values(const std::vector<std::uint64_t>& values,
                                        std::size_t out_width) const {
    const BitVec out = run(values);
    std::vector<std::uint64_t> vals;
    std::size_t pos = 0;
    while (pos < out.size()) vals.push_back(take_value(out, pos, out_width));
    return vals;
  }

  const mpsi::Circuit& circuit() const { return circuit_; }

 private:
  std::size_t width_;
  mpsi::Circuit circuit_;
};

inline std::uint64_t mask_of(std::uint32_t sigma) {
  return sigma >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << sigma) - 1;
}

// m sets of n distinct nonzero sigma-bit values sharing `common` elements.
inline std::vector<std::vector<Element>> planted_sets(std::mt19937_64& rng, std::uint32_t m,
                                                      std::uint32_t n, std::uint32_t sigma,
                                                      std::uint32_t common) {
  std::set<Element> used;
  auto fresh = [&] {
    for (;;) {
      const Element e = rng() & mask_of(sigma);
      if (e != 0 && used.insert(e).second) return e;
    }
  };
  std::vector<Element> shared(common);
  for (auto& e : shared) e = fresh();
  std::vector<std::vector<Element>> sets(m, shared);
  for (auto& s : sets) {
    while (s.size() < n) {
      // Occasionally reuse a value from another set so partial overlaps occur.
      const bool exhausted = used.size() >= mask_of(sigma);
      const Element e = (!used.empty() && (exhausted || rng() % 4 == 0))
                            ? *std::next(used.begin(), static_cast<long>(rng() % used.size()))
                            : fresh();
      if (std::find(s.begin(), s.end(), e) == s.end()) s.push_back(e);
    }
    std::shuffle(s.begin(), s.end(), rng);
  }
  return sets;
}

// Random circuit over every gate kind with at most max_gates gates.
inline mpsi::Circuit random_circuit(std::mt19937_64& rng, std::size_t max_gates) {
  mpsi::CircuitBuilder b;
  std::vector<mpsi::WireId> wires;
  const std::size_t g_in = 1 + rng() % 16;
  const std::size_t e_in = rng() % 16;
  for (std::size_t i = 0; i < g_in; ++i) wires.push_back(b.input(mpsi::InputOwner::kGarbler));
  for (std::size_t i = 0; i < e_in; ++i) wires.push_back(b.input(mpsi::InputOwner::kEvaluator));
  const std::size_t gates = 1 + rng() % max_gates;
  for (std::size_t i = 0; i < gates; ++i) {
    const auto a = wires[rng() % wires.size()];
    const auto c = wires[rng() % wires.size()];
    switch (rng() % 8) {
      case 0:
      case 1:
      case 2:
        wires.push_back(b.xor_gate(a, c));
        break;
      case 3:
      case 4:
      case 5:
        wires.push_back(b.and_gate(a, c));
        break;
      case 6:
        wires.push_back(b.inv_gate(a));
        break;
      default:
        wires.push_back(b.constant(rng() & 1));
        break;
    }
  }
  const std::size_t outs = 1 + rng() % 32;
  for (std::size_t i = 0; i < outs; ++i) b.output(wires[wires.size() - 1 - rng() % std::min<std::size_t>(wires.size(), 64)]);
  return b.finish();
}

inline BitVec random_bits(std::mt19937_64& rng, std::size_t n) {
  BitVec v(n);
  for (auto& b : v) b = rng() & 1;
  return v;
}


// One cleartext run of the full intersection circuit. sets[0] belongs to P1,
// sets[1] to P2, the rest are XOR-shared with fresh masks. pi1 and pi2 are the
// shuffles of P1 and P2 (ignored in cardinality mode).
struct PlainRun {
  mpsi::PsiOutputs outputs;
  BitVec wires;
};

inline PlainRun run_plain(const mpsi::PsiCircuit& pc, const std::vector<std::vector<Element>>& sets,
                          const std::vector<std::uint32_t>& pi1,
                          const std::vector<std::uint32_t>& pi2, mpsi::Prg& prg) {
  const auto& p = pc.layout.params;
  std::vector<std::vector<Element>> sorted;
  for (const auto& s : sets) sorted.push_back(mpsi::sorted_checked_set(s, p.set_size, p.sigma));
  std::vector<std::vector<Element>> r, r_prime;
  for (std::size_t k = 2; k < sorted.size(); ++k) {
    std::vector<Element> mask(p.set_size), other(p.set_size);
    for (std::size_t j = 0; j < p.set_size; ++j) {
      mask[j] = prg.next_u64() & mask_of(p.sigma);
      other[j] = mask[j] ^ sorted[k][j];
    }
    r.push_back(mask);
    r_prime.push_back(other);
  }
  const bool shuffled = mpsi::reveals_intersection(p.mode);
  const BitVec c1 = shuffled ? mpsi::route_waksman(pi1).switch_controls : BitVec{};
  const BitVec c2 = shuffled ? mpsi::route_waksman(pi2).switch_controls : BitVec{};
  const BitVec g = mpsi::assemble_inputs(pc.layout, mpsi::InputOwner::kGarbler, sorted[0], r, c1);
  const BitVec e = mpsi::assemble_inputs(pc.layout, mpsi::InputOwner::kEvaluator, sorted[1], r_prime, c2);
  PlainRun run;
  run.wires = mpsi::eval_wires(pc.circuit, g, e);
  run.outputs = mpsi::read_outputs(p, mpsi::eval_plaintext(pc.circuit, g, e));
  return run;
}

inline std::vector<std::uint32_t> identity(std::size_t n) {
  std::vector<std::uint32_t> id(n);
  for (std::size_t i = 0; i < n; ++i) id[i] = static_cast<std::uint32_t>(i);
  return id;
}

inline std::vector<Element> values_of(const BitVec& wires, const std::vector<Bus>& buses) {
  std::vector<Element> out;
  for (const Bus& bus : buses) {
    Element v = 0;
    for (std::size_t b = 0; b < bus.size(); ++b) v |= Element{wires[bus[b].index]} << b;
    out.push_back(v);
  }
  return out;
}

inline std::vector<Element> nonzero(const std::vector<Element>& v) {
  std::vector<Element> out;
  for (auto x : v) {
    if (x != 0) out.push_back(x);
  }
  return out;
}

// Runs the two ends of a framed in-process link on separate threads. A side
// that throws closes its end so the peer fails instead of blocking.
struct PairOutcome {
  std::exception_ptr first;
  std::exception_ptr second;
  mpsi::TrafficStats first_traffic;
  mpsi::TrafficStats second_traffic;
};

inline PairOutcome run_pair(const std::function<void(mpsi::FrameChannel&)>& a,
                            const std::function<void(mpsi::FrameChannel&)>& b) {
  auto [x, y] = mpsi::make_in_process_pair();
  mpsi::FrameChannel ca(std::move(x));
  mpsi::FrameChannel cb(std::move(y));
  PairOutcome out;
  auto guarded = [](const std::function<void(mpsi::FrameChannel&)>& fn, mpsi::FrameChannel& ch,
                    std::exception_ptr& err) {
    try {
      fn(ch);
    } catch (...) {
      err = std::current_exception();
      ch.close();
    }
  };
  std::thread t([&] { guarded(b, cb, out.second); });
  guarded(a, ca, out.first);
  t.join();
  out.first_traffic = ca.traffic();
  out.second_traffic = cb.traffic();
  return out;
}

template <typename E>
bool throws_as(const std::exception_ptr& e) {
  if (!e) return false;
  try {
    std::rethrow_exception(e);
  } catch (const E&) {
    return true;
  } catch (...) {
    return false;
  }
}

}  // namespace testing
