#include <doctest.h>

#include "mpsi/garble.hpp"
#include "mpsi/psi_circuit.hpp"
#include "support.hpp"

using namespace mpsi;

namespace {

BitVec run_garbled(const Circuit& c, const Label& seed, const BitVec& g, const BitVec& e) {
  const GarbledCircuit gc = garble(c, seed);
  const auto ga = encode_inputs(gc.labels, g, InputOwner::kGarbler);
  const auto ea = encode_inputs(gc.labels, e, InputOwner::kEvaluator);
  return decode_outputs(gc.decode, evaluate(c, gc.tables, ga, ea));
}

}  // namespace

TEST_CASE("garbled evaluation matches plaintext on random circuits") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const Circuit c = testing::random_circuit(rng, 2000);
    const BitVec g = testing::random_bits(rng, c.garbler_inputs().size());
    const BitVec e = testing::random_bits(rng, c.evaluator_inputs().size());
    CAPTURE(trial);
    CHECK(run_garbled(c, Label{rng(), rng()}, g, e) == eval_plaintext(c, g, e));
  }
}

TEST_CASE("every gate kind on every input pair") {
  for (GateKind kind : {GateKind::kXor, GateKind::kAnd}) {
    const Circuit c = build_circuit({{kind, WireId{0}, WireId{1}, WireId{2}}}, {WireId{0}},
                                    {WireId{1}}, {WireId{2}});
    for (std::uint8_t a = 0; a < 2; ++a) {
      for (std::uint8_t b = 0; b < 2; ++b) {
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
          CHECK(run_garbled(c, Label{seed, 1}, {a}, {b}) == eval_plaintext(c, {a}, {b}));
        }
      }
    }
  }
  CircuitBuilder b;
  const WireId x = b.input(InputOwner::kGarbler);
  b.output(b.inv_gate(x));
  b.output(b.and_gate(b.constant(true), x));
  b.output(b.xor_gate(b.constant(false), b.constant(true)));
  const Circuit c = b.finish();
  CHECK(run_garbled(c, Label{1, 2}, {0}, {}) == BitVec{1, 0, 1});
  CHECK(run_garbled(c, Label{1, 2}, {1}, {}) == BitVec{0, 1, 1});
}

TEST_CASE("table size is two labels per AND gate") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const Circuit c = testing::random_circuit(rng, 500);
    const GarbledCircuit gc = garble(c, Label{rng(), rng()});
    CHECK(gc.tables.size() == 2 * stats(c).and_count);
    CHECK(garbled_table_bytes(stats(c)) == 32 * stats(c).and_count);
  }
  const PsiCircuit pc = build_ex_scs({3, 8, 12, OutputMode::kBoth, Compaction::kSortingNetwork});
  CHECK(garble(pc.circuit, Label{}).tables.size() * kLabelBytes == 32 * stats(pc.circuit).and_count);
}

TEST_CASE("garbling is deterministic per seed and delta has color 1") {
  std::mt19937_64 rng(47);
  const Circuit c = testing::random_circuit(rng, 300);
  const GarbledCircuit a = garble(c, Label{7, 7});
  const GarbledCircuit b = garble(c, Label{7, 7});
  const GarbledCircuit other = garble(c, Label{7, 8});
  CHECK(a.tables == b.tables);
  CHECK(a.decode.bits == b.decode.bits);
  CHECK(a.labels.delta.color());
  CHECK(other.labels.delta.color());
  CHECK_FALSE(a.labels.delta == other.labels.delta);
  for (const auto& pair : evaluator_label_pairs(a.labels)) CHECK((pair[0] ^ pair[1]) == a.labels.delta);
}

TEST_CASE("streamed garbling delivers the same tables") {
  std::mt19937_64 rng(53);
  const Circuit c = testing::random_circuit(rng, 3000);
  const GarbledCircuit whole = garble(c, Label{1, 1});
  std::vector<Label> streamed;
  const DecodeTable d = garble_tables(c, make_input_labels(c, Label{1, 1}),
                                      [&](std::span<const Label> batch) {
                                        streamed.insert(streamed.end(), batch.begin(), batch.end());
                                      });
  CHECK(streamed == whole.tables);
  CHECK(d.bits == whole.decode.bits);
}

TEST_CASE("evaluation rejects truncated or oversized table streams") {
  CircuitBuilder b;
  const WireId x = b.input(InputOwner::kGarbler);
  const WireId y = b.input(InputOwner::kEvaluator);
  b.output(b.and_gate(x, y));
  const Circuit c = b.finish();
  const GarbledCircuit gc = garble(c, Label{3, 3});
  const auto ga = encode_inputs(gc.labels, {1}, InputOwner::kGarbler);
  const auto ea = encode_inputs(gc.labels, {1}, InputOwner::kEvaluator);
  std::vector<Label> tables = gc.tables;
  tables.push_back(Label{});
  CHECK_THROWS_AS(evaluate(c, tables, ga, ea), GarbleError);
  tables.resize(1);
  CHECK_THROWS_AS(evaluate(c, tables, ga, ea), GarbleError);
  CHECK_THROWS(evaluate(c, gc.tables, ga, std::vector<Label>{}));
  CHECK_THROWS(encode_inputs(gc.labels, {1, 0}, InputOwner::kGarbler));
}

TEST_CASE("garbled PSI circuit decodes to the plaintext result") {
  std::mt19937_64 rng(59);
  Prg prg(Label{1, 9});
  const CircuitParams p{3, 8, 16, OutputMode::kBoth, Compaction::kSortingNetwork};
  const PsiCircuit pc = build_ex_scs(p);
  const auto sets = testing::planted_sets(rng, 3, 8, 16, 3);
  std::vector<std::vector<Element>> sorted;
  for (const auto& s : sets) sorted.push_back(sorted_checked_set(s, 8, 16));
  std::vector<Element> r(8), rp(8);
  for (std::size_t j = 0; j < 8; ++j) {
    r[j] = prg.next_u64() & 0xffff;
    rp[j] = r[j] ^ sorted[2][j];
  }
  const BitVec c1 = route_waksman(random_permutation(8, prg)).switch_controls;
  const BitVec c2 = route_waksman(random_permutation(8, prg)).switch_controls;
  const BitVec g = assemble_inputs(pc.layout, InputOwner::kGarbler, sorted[0], {r}, c1);
  const BitVec e = assemble_inputs(pc.layout, InputOwner::kEvaluator, sorted[1], {rp}, c2);
  CHECK(run_garbled(pc.circuit, Label{2, 2}, g, e) == eval_plaintext(pc.circuit, g, e));
}
