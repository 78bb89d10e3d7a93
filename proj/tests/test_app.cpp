#include <doctest.h>

#include <sstream>
#include <unordered_set>

#include "mpsi/anomaly.hpp"
#include "mpsi/bench.hpp"
#include "mpsi/config.hpp"
#include "mpsi/encode.hpp"
#include "mpsi/oracle.hpp"
#include "support.hpp"

using namespace mpsi;

TEST_CASE("token files: trimming, comments, blanks and repeats") {
  std::istringstream in("# header\n  alpha \n\nbeta\n\talpha\n#gamma\ngamma\r\n");
  CHECK(read_tokens(in) == std::vector<std::string>{"alpha", "beta", "gamma"});
  CHECK_THROWS_AS(load_tokens("/nonexistent/window.txt"), InputError);
}

TEST_CASE("token encoding is deterministic, masked and never zero") {
  CHECK(encode_token("10.0.0.1", 63) == encode_token("10.0.0.1", 63));
  CHECK(encode_token("10.0.0.1", 63) != encode_token("10.0.0.2", 63));
  for (std::uint32_t sigma : {1u, 8u, 32u, 63u, 64u}) {
    for (int i = 0; i < 200; ++i) {
      const Element e = encode_token("t" + std::to_string(i), sigma);
      CHECK(e != 0);
      CHECK((e & ~testing::mask_of(sigma)) == 0);
    }
  }
  // Truncation keeps the low bits of the 64-bit value.
  const Element low = encode_token("x", 64) & 0xff;
  CHECK(encode_token("x", 8) == (low == 0 ? 1 : low));
}

TEST_CASE("10^5 tokens at sigma 63 do not collide") {
  std::vector<std::string> tokens;
  for (int i = 0; i < 100000; ++i) tokens.push_back("198.51." + std::to_string(i / 256) + "." + std::to_string(i % 256));
  const EncodedSet set = encode_elements(tokens, 63);
  CHECK(set.elements.size() == tokens.size());
  CHECK(std::is_sorted(set.elements.begin(), set.elements.end()));
  CHECK(set.tokens.at(encode_token("198.51.0.7", 63)) == "198.51.0.7");
}

TEST_CASE("collisions are reported") {
  // At two bits, five distinct tokens cannot all be distinct nonzero values.
  CHECK_THROWS_AS(encode_elements({"a", "b", "c", "d", "e"}, 2), InputError);
}

TEST_CASE("sigma resolution and session sizes") {
  CHECK(resolve_sigma("auto", 4096) == 63);
  CHECK(resolve_sigma("auto", 1u << 16) == 64);
  CHECK(resolve_sigma("40", 4096) == 40);
  CHECK_THROWS(resolve_sigma("0", 8));
  CHECK_THROWS(resolve_sigma("65", 8));
  CHECK_THROWS(resolve_sigma("abc", 8));
  CHECK(session_size_for(0) == 2);
  CHECK(session_size_for(1) == 2);
  CHECK(session_size_for(3) == 4);
  CHECK(session_size_for(4) == 4);
  CHECK(session_size_for(1000) == 1024);
}

TEST_CASE("padding stays inside the party's reserved range") {
  std::mt19937_64 rng(89);
  for (std::uint32_t parties : {2u, 3u, 5u}) {
    std::vector<std::vector<Element>> padded;
    std::vector<std::vector<Element>> real(parties);
    for (std::uint32_t id = 1; id <= parties; ++id) {
      std::set<Element> r;
      while (r.size() < 5) r.insert(1 + rng() % 255);
      real[id - 1].assign(r.begin(), r.end());
      const auto p = pad_set(real[id - 1], 16, 12, id, parties);
      CHECK(p.size() == 16);
      CHECK(std::is_sorted(p.begin(), p.end()));
      CHECK(std::adjacent_find(p.begin(), p.end()) == p.end());
      CHECK_NOTHROW(sorted_checked_set(p, 16, 12));
      padded.push_back(p);
    }
    // Padding never reaches the intersection of the padded sets.
    CHECK(oracle::intersect(padded) == oracle::intersect(real));
  }
  CHECK_THROWS_AS(pad_set(std::vector<Element>{1, 2, 3}, 2, 8, 1, 2), InputError);
  CHECK_THROWS_AS(pad_set(std::vector<Element>{1}, 4, 1, 1, 2), InputError);
  CHECK_THROWS_AS(pad_set(std::vector<Element>{1}, 4, 8, 3, 2), InputError);
  CHECK(pad_set(std::vector<Element>{1, 2}, 2, 8, 1, 2) == std::vector<Element>{1, 2});
}

TEST_CASE("Jaccard examples and verdicts") {
  const Rational half = jaccard_from_counts(2, 3, 3);
  CHECK(half == Rational::of(1, 2));
  CHECK(half.str() == "1/2");
  CHECK(judge("p", 2, 3, 3, parse_threshold("0.4")).label == Verdict::kAnomalous);
  CHECK(judge("p", 3, 3, 3, parse_threshold("0.4")).jaccard == Rational::of(1, 1));
  CHECK(judge("p", 0, 3, 3, parse_threshold("0.4")).label == Verdict::kRegular);
  // Equality is not an anomaly.
  CHECK(judge("p", 2, 3, 3, parse_threshold("1/2")).label == Verdict::kRegular);
  CHECK_THROWS_AS(jaccard_from_counts(4, 3, 5), std::invalid_argument);
  CHECK_THROWS_AS(jaccard_from_counts(0, 0, 0), std::invalid_argument);
  CHECK(oracle::jaccard({1, 2, 3}, {2, 3, 4}) == oracle::Fraction{1, 2});
  CHECK(verdict_name(Verdict::kAnomalous) == "anomalous");
}

TEST_CASE("threshold parsing is exact") {
  CHECK(parse_threshold("0.4") == Rational::of(2, 5));
  CHECK(parse_threshold(".25") == Rational::of(1, 4));
  CHECK(parse_threshold("1") == Rational::of(1, 1));
  CHECK(parse_threshold("0") == Rational::of(0, 1));
  CHECK(parse_threshold("2/5") == Rational::of(2, 5));
  CHECK(parse_threshold("0.1") < parse_threshold("0.10000001"));
  for (const char* bad : {"", "1.5", "-0.1", "3/2", "1/0", "abc", "0.4x", "."}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_threshold(bad), std::invalid_argument);
  }
}

TEST_CASE("raising the threshold never turns regular into anomalous") {
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint64_t n1 = 1 + rng() % 50;
    const std::uint64_t n2 = 1 + rng() % 50;
    const std::uint64_t c = rng() % (std::min(n1, n2) + 1);
    bool seen_regular = false;
    for (int k = 0; k <= 10; ++k) {
      const Verdict v = judge("p", c, n1, n2, Rational::of(static_cast<std::uint64_t>(k), 10)).label;
      if (seen_regular) CHECK(v == Verdict::kRegular);
      seen_regular |= v == Verdict::kRegular;
    }
  }
}

TEST_CASE("detect_local runs one private session per blacklist") {
  const std::vector<std::string> window{"10.0.0.1", "10.0.0.2", "10.0.0.3"};
  const std::vector<std::vector<std::string>> lists{
      {"10.0.0.2", "10.0.0.3", "10.0.0.4"}, {"10.0.0.1", "10.0.0.2", "10.0.0.3"}, {"192.0.2.1"}};
  const auto verdicts =
      detect_local(window, lists, {"east", "west"}, parse_threshold("0.4"), "auto", OtBackend::kReal);
  REQUIRE(verdicts.size() == 3);
  CHECK(verdicts[0].peer == "east");
  CHECK(verdicts[0].intersection == 2);
  CHECK(verdicts[0].jaccard == Rational::of(1, 2));
  CHECK(verdicts[0].label == Verdict::kAnomalous);
  CHECK(verdicts[1].jaccard == Rational::of(1, 1));
  CHECK(verdicts[2].peer == "peer3");
  CHECK(verdicts[2].intersection == 0);
  CHECK(verdicts[2].own_size == 3);
  CHECK(verdicts[2].peer_size == 1);
  CHECK(verdicts[2].label == Verdict::kRegular);
  CHECK_THROWS_AS(detect_local({}, lists, {}, parse_threshold("0.4"), "auto", OtBackend::kDealer),
                  InputError);
}

TEST_CASE("bench rows match the built circuits") {
  for (std::uint32_t m : {2u, 3u}) {
    for (std::uint32_t n : {4u, 16u}) {
      const CircuitParams p{m, n, 16, OutputMode::kIntersection, Compaction::kSortingNetwork};
      const BenchRow row = bench_point(p, false, false);
      const CircuitStats s = stats(build_ex_scs(p).circuit);
      CHECK(row.stats == s);
      CHECK(row.per_element == doctest::Approx(static_cast<double>(s.and_count) / n));
      CHECK(row.table_bytes == 32 * s.and_count);
    }
  }
  const BenchRow live = bench_point({3, 8, 16, OutputMode::kBoth, Compaction::kSortingNetwork}, false, true,
                                    OtBackend::kDealer);
  REQUIRE(live.live.has_value());
  CHECK(live.live->garbled_bytes == live.table_bytes);
  CHECK(live.live->p1_to_p2_bytes > live.table_bytes);
}

TEST_CASE("per-element cost grows with n and references are attached") {
  BenchOptions o;
  o.ns = {1u << 8, 1u << 10, 1u << 12};
  o.ms = {3};
  o.sigmas = {"32", "auto"};
  const auto rows = run_bench(o);
  REQUIRE(rows.size() == 6);
  double last = 0;
  for (const auto& r : rows) {
    if (r.sigma_auto) continue;
    CHECK(r.per_element > last);
    last = r.per_element;
  }
  CHECK(rows.back().params.sigma == auto_sigma(1u << 12));
  CHECK(reference_gates(3, 1u << 12, 32, false).has_value());
  CHECK_FALSE(reference_gates(4, 1u << 12, 32, false).has_value());
  CHECK(reference_traffic(3, 1u << 12, 32).has_value());
  CHECK(bench_csv(rows).find("and_count") != std::string::npos);
  CHECK_FALSE(bench_text(rows).empty());
}

TEST_CASE("counter cost against the formula") {
  for (std::uint32_t n : {2u, 16u, 256u}) {
    const CounterCost c = counter_cost(n);
    CHECK(c.n == n);
    CHECK(c.and_count <= 2 * n);
    CHECK(c.formula == n * static_cast<std::uint64_t>(std::countr_zero(n)) - n);
  }
  CHECK_THROWS(counter_cost(3));
}
