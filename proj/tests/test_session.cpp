#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <thread>

#include "mpsi/config.hpp"
#include "mpsi/oracle.hpp"
#include "mpsi/session.hpp"
#include "support.hpp"

using namespace mpsi;

namespace {

std::vector<PartyInput> inputs_of(const std::vector<std::vector<Element>>& sets) {
  std::vector<PartyInput> out;
  for (const auto& s : sets) out.push_back({s, std::nullopt});
  return out;
}

std::vector<PsiResult> simulate(std::uint32_t m, std::uint32_t n, std::uint32_t sigma, OutputMode mode,
                                const std::vector<std::vector<Element>>& sets,
                                OtBackend backend = OtBackend::kReal,
                                Transport transport = Transport::kInProcess) {
  SimulationOptions o;
  o.params = {m, n, sigma, mode, Compaction::kSortingNetwork};
  o.ot_backend = backend;
  o.transport = transport;
  return simulate_session(o, inputs_of(sets));
}

SessionConfig config_for(std::uint32_t m, std::uint32_t n, std::uint32_t sigma, std::uint32_t id) {
  SessionConfig c;
  c.m = m;
  c.n = n;
  c.sigma = sigma;
  c.mode = OutputMode::kBoth;
  c.party_id = id;
  c.role = role_for_party(id);
  c.ot_backend = OtBackend::kDealer;
  for (std::uint32_t j = 1; j <= m; ++j) c.roster[j] = {"in-process", static_cast<std::uint16_t>(j)};
  return c;
}

struct Outcome {
  std::vector<std::optional<PsiResult>> results;
  std::vector<std::exception_ptr> errors;
};

// Runs parties with individually chosen configs over in-process links.
Outcome run_manual(const std::vector<SessionConfig>& configs, const std::vector<PartyInput>& inputs) {
  const std::size_t m = configs.size();
  std::vector<PeerLinks> links(m);
  for (std::uint32_t a = 1; a <= m; ++a) {
    for (std::uint32_t b : peer_ids(configs[a - 1])) {
      if (b < a) continue;
      auto [ca, cb] = make_in_process_pair();
      links[a - 1].channels[b] = std::make_unique<FrameChannel>(std::move(ca));
      links[b - 1].channels[a] = std::make_unique<FrameChannel>(std::move(cb));
    }
  }
  Outcome out{std::vector<std::optional<PsiResult>>(m), std::vector<std::exception_ptr>(m)};
  {
    std::vector<std::jthread> threads;
    for (std::size_t k = 0; k < m; ++k) {
      threads.emplace_back([&, k] {
        try {
          out.results[k] = run_party(configs[k], inputs[k], links[k]);
        } catch (...) {
          out.errors[k] = std::current_exception();
        }
      });
    }
  }
  return out;
}

std::string message_of(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& x) {
    return x.what();
  }
  return {};
}

double chi_square_p(const std::vector<std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0;
  for (auto c : counts) stat += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

TEST_CASE("worked example: every party learns {3, 5} and cardinality 2") {
  const std::vector<std::vector<Element>> sets = {{1, 3, 5, 7}, {3, 4, 5, 8}, {3, 5, 9, 10}};
  for (OtBackend backend : {OtBackend::kDealer, OtBackend::kReal}) {
    const auto results = simulate(3, 4, 8, OutputMode::kBoth, sets, backend);
    REQUIRE(results.size() == 3);
    for (const PsiResult& r : results) {
      CHECK(r.has_intersection);
      CHECK(r.intersection == std::vector<Element>{3, 5});
      CHECK(r.cardinality == 2);
      CHECK(r.declared_sizes.size() == 3);
      CHECK(r.declared_sizes.at(2) == 4);
    }
  }
}

TEST_CASE("disjoint sets, two parties, and cardinality only") {
  const auto disjoint = simulate(3, 4, 8, OutputMode::kBoth, {{1, 2, 3, 4}, {5, 6, 7, 8}, {9, 10, 11, 12}});
  for (const auto& r : disjoint) {
    CHECK(r.intersection.empty());
    CHECK(r.cardinality == 0);
  }
  const auto two = simulate(2, 4, 8, OutputMode::kIntersection, {{1, 2, 3, 4}, {4, 3, 9, 10}});
  for (const auto& r : two) {
    CHECK(r.intersection == std::vector<Element>{3, 4});
    CHECK_FALSE(r.cardinality.has_value());
  }
  const auto card = simulate(4, 2, 8, OutputMode::kCardinality, {{1, 2}, {2, 1}, {1, 2}, {2, 3}});
  for (const auto& r : card) {
    CHECK_FALSE(r.has_intersection);
    CHECK(r.intersection.empty());
    CHECK(r.cardinality == 1);
  }
}

TEST_CASE("random sessions agree with the oracle") {
  std::mt19937_64 rng(83);
  for (std::uint32_t m : {2u, 3u, 5u}) {
    for (std::uint32_t n : {4u, 16u}) {
      const auto sets = testing::planted_sets(rng, m, n, 20, static_cast<std::uint32_t>(rng() % n));
      const auto want = oracle::intersect(sets);
      const auto results = simulate(m, n, 20, OutputMode::kBoth, sets);
      for (const auto& r : results) {
        CHECK(std::set<Element>(r.intersection.begin(), r.intersection.end()) == want);
        CHECK(r.intersection.size() == want.size());
        CHECK(r.cardinality == want.size());
      }
    }
  }
}

TEST_CASE("TCP transport gives the same answer") {
  const std::vector<std::vector<Element>> sets = {{1, 3, 5, 7}, {3, 4, 5, 8}, {3, 5, 9, 10}};
  const auto results = simulate(3, 4, 8, OutputMode::kBoth, sets, OtBackend::kReal, Transport::kTcp);
  for (const auto& r : results) {
    CHECK(r.intersection == std::vector<Element>{3, 5});
    CHECK(r.cardinality == 2);
  }
}

TEST_CASE("shares reconstruct and each share alone is uniform") {
  Prg prg(Label{8, 8});
  const std::vector<Element> set{1, 77, 200};
  std::vector<std::uint64_t> garbler_counts(256), evaluator_counts(256);
  for (int trial = 0; trial < 10000; ++trial) {
    const SharePair s = make_shares(set, 8, prg);
    for (std::size_t j = 0; j < set.size(); ++j) REQUIRE((s.to_garbler[j] ^ s.to_evaluator[j]) == set[j]);
    ++garbler_counts[s.to_garbler[1]];
    ++evaluator_counts[s.to_evaluator[1]];
  }
  CHECK(chi_square_p(garbler_counts) > 0.001);
  CHECK(chi_square_p(evaluator_counts) > 0.001);
}

TEST_CASE("contributors send n sigma bits per share and hear only the result") {
  const std::vector<std::vector<Element>> sets = {{1, 3, 5, 7}, {3, 4, 5, 8}, {3, 5, 9, 10}, {3, 5, 6, 11}};
  const auto results = simulate(4, 4, 8, OutputMode::kBoth, sets);
  const std::uint64_t hello = kFrameHeaderBytes + 4 + 32 + 8;
  const std::uint64_t shares = kFrameHeaderBytes + 4 + (4 * 8 + 7) / 8;
  for (std::size_t k = 2; k < 4; ++k) {
    const PsiResult& r = results[k];
    CHECK(r.traffic.size() == 2);
    for (std::uint32_t peer : {1u, 2u}) {
      const TrafficStats& t = r.traffic.at(peer);
      CHECK(t.frames_sent == 2);
      CHECK(t.bytes_sent == hello + shares);
    }
    CHECK(r.traffic.at(1).frames_received == 1);
    CHECK(r.traffic.at(2).frames_received == 2);
  }
}

TEST_CASE("garbled table bytes equal 32 per AND gate") {
  const std::vector<std::vector<Element>> sets = {{1, 3, 5, 7}, {3, 4, 5, 8}, {3, 5, 9, 10}};
  const auto results = simulate(3, 4, 8, OutputMode::kBoth, sets);
  const auto expect = count_ex_scs({3, 4, 8, OutputMode::kBoth, Compaction::kSortingNetwork}).and_count;
  CHECK(results[0].and_count == expect);
  CHECK(results[0].garbled_bytes == 32 * expect);
  CHECK(results[1].garbled_bytes == 32 * expect);
  CHECK(results[0].traffic.at(2).bytes_sent > 32 * expect);
}

TEST_CASE("a config-hash mismatch aborts everyone without a result") {
  std::vector<SessionConfig> configs;
  for (std::uint32_t id = 1; id <= 3; ++id) configs.push_back(config_for(3, 4, 8, id));
  configs[2].sigma = 9;
  const auto outcome = run_manual(configs, inputs_of({{1, 3, 5, 7}, {3, 4, 5, 8}, {3, 5, 9, 10}}));
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK_FALSE(outcome.results[k].has_value());
    CHECK(testing::throws_as<ProtocolError>(outcome.errors[k]));
  }
  bool named = false;
  for (const auto& e : outcome.errors) named |= message_of(e).find("config-hash mismatch") != std::string::npos;
  CHECK(named);
}

TEST_CASE("a rejected input ends the session for everyone") {
  std::vector<SessionConfig> configs;
  for (std::uint32_t id = 1; id <= 3; ++id) configs.push_back(config_for(3, 4, 8, id));
  SUBCASE("duplicate element at a contributor") {
    const auto outcome = run_manual(configs, inputs_of({{1, 3, 5, 7}, {3, 4, 5, 8}, {3, 3, 9, 10}}));
    CHECK(testing::throws_as<std::invalid_argument>(outcome.errors[2]));
    CHECK(testing::throws_as<ProtocolError>(outcome.errors[0]));
    CHECK(testing::throws_as<ProtocolError>(outcome.errors[1]));
    for (const auto& r : outcome.results) CHECK_FALSE(r.has_value());
  }
  SUBCASE("oversized element at the garbler") {
    const auto outcome = run_manual(configs, inputs_of({{1, 3, 5, 700}, {3, 4, 5, 8}, {3, 5, 9, 10}}));
    CHECK(testing::throws_as<std::invalid_argument>(outcome.errors[0]));
    for (const auto& r : outcome.results) CHECK_FALSE(r.has_value());
  }
  SUBCASE("simulate_session reports the rejection as the root cause") {
    CHECK_THROWS_AS(simulate(3, 4, 8, OutputMode::kBoth, {{1, 3, 5, 7}, {3, 4, 5, 8}, {0, 5, 9, 10}}),
                    std::invalid_argument);
  }
}

TEST_CASE("declared sizes travel in HELLO") {
  SimulationOptions o;
  o.params = {2, 4, 8, OutputMode::kCardinality, Compaction::kSortingNetwork};
  o.ot_backend = OtBackend::kDealer;
  const auto results = simulate_session(o, {{{1, 2, 3, 200}, 3}, {{1, 2, 100, 201}, 2}});
  for (const auto& r : results) {
    CHECK(r.declared_sizes.at(1) == 3);
    CHECK(r.declared_sizes.at(2) == 2);
    CHECK(r.cardinality == 2);
  }
}

TEST_CASE("peer ids follow the topology") {
  CHECK(peer_ids(config_for(4, 4, 8, 1)) == std::vector<std::uint32_t>{2, 3, 4});
  CHECK(peer_ids(config_for(4, 4, 8, 2)) == std::vector<std::uint32_t>{1, 3, 4});
  CHECK(peer_ids(config_for(4, 4, 8, 3)) == std::vector<std::uint32_t>{1, 2});
  CHECK(peer_ids(config_for(2, 4, 8, 2)) == std::vector<std::uint32_t>{1});
}
