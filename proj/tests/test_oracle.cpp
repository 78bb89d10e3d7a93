#include <doctest.h>

#include "mpsi/crypto.hpp"
#include "mpsi/oracle.hpp"
#include "support.hpp"

using namespace mpsi;

TEST_CASE("intersection examples") {
  CHECK(oracle::intersect({{1, 3}, {3, 4}, {3, 9}}) == std::set<oracle::Value>{3});
  CHECK(oracle::intersect({{5, 2, 9}}) == std::set<oracle::Value>{2, 5, 9});
  CHECK(oracle::intersect({}).empty());
  CHECK(oracle::intersect({{1, 2}, {3, 4}}).empty());
  // Repeats inside one set do not count as membership in another.
  CHECK(oracle::intersect({{7, 7}, {8}}).empty());
}

TEST_CASE("both intersection methods agree on random inputs") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t m = 1 + rng() % 6;
    std::vector<std::vector<oracle::Value>> sets(m);
    for (auto& s : sets) {
      s.resize(rng() % 30);
      for (auto& v : s) v = rng() % 40;
    }
    CHECK(oracle::intersect(sets) == oracle::intersect_by_merge(sets));
  }
}

TEST_CASE("Jaccard by enumeration") {
  CHECK(oracle::jaccard({1, 2, 3}, {2, 3, 4}) == oracle::Fraction{1, 2});
  CHECK(oracle::jaccard({1, 2, 3}, {1, 2, 3}) == oracle::Fraction{1, 1});
  CHECK(oracle::jaccard({1, 2, 3}, {4, 5}) == oracle::Fraction{0, 1});
  CHECK(oracle::jaccard({}, {4}) == oracle::Fraction{0, 1});
  CHECK_THROWS_AS(oracle::jaccard({}, {}), std::invalid_argument);
}

TEST_CASE("small helpers") {
  CHECK(oracle::is_ascending({1, 1, 2}));
  CHECK_FALSE(oracle::is_ascending({2, 1}));
  CHECK(oracle::same_multiset({3, 1, 1}, {1, 3, 1}));
  CHECK_FALSE(oracle::same_multiset({1, 3}, {1, 1, 3}));
  CHECK(oracle::hamming_weight({1, 0, 1, 1}) == 3);
  const auto all = oracle::all_binary_vectors(3);
  CHECK(all.size() == 8);
  CHECK(all[5] == std::vector<std::uint8_t>{1, 0, 1});
  CHECK_THROWS(oracle::all_binary_vectors(25));
}

TEST_CASE("uniformity check accepts uniform and rejects skewed permutations") {
  Prg prg(Label{11, 13});
  std::vector<std::vector<std::uint32_t>> uniform;
  for (int i = 0; i < 24000; ++i) uniform.push_back(random_permutation(4, prg));
  const auto good = oracle::uniformity_check(uniform, 4);
  CHECK(good.cells == 24);
  CHECK(good.samples == 24000);
  CHECK(good.pass);

  const std::vector<std::vector<std::uint32_t>> constant(24000, {0, 1, 2, 3});
  const auto bad = oracle::uniformity_check(constant, 4);
  CHECK_FALSE(bad.pass);
  CHECK(bad.p_value < 1e-12);

  // Composing a fixed permutation with a uniform one stays uniform.
  std::vector<std::vector<std::uint32_t>> composed;
  const std::vector<std::uint32_t> fixed{2, 0, 3, 1};
  for (const auto& p : uniform) composed.push_back({p[fixed[0]], p[fixed[1]], p[fixed[2]], p[fixed[3]]});
  CHECK(oracle::uniformity_check(composed, 4).pass);

  // Only half the cells reachable.
  std::vector<std::vector<std::uint32_t>> half;
  for (const auto& p : uniform) {
    if (p[0] < p[1]) half.push_back(p);
  }
  CHECK_FALSE(oracle::uniformity_check(half, 4).pass);

  CHECK_THROWS_AS(oracle::uniformity_check(std::vector<std::vector<std::uint32_t>>(100, {0, 1, 2, 3}), 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(oracle::uniformity_check(std::vector<std::vector<std::uint32_t>>(300, {0, 0, 1, 2}), 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(oracle::uniformity_check(uniform, 6), std::invalid_argument);
}

TEST_CASE("reports describe containers and scalars") {
  const auto r = oracle::compare(std::set<oracle::Value>{1, 2}, std::set<oracle::Value>{1, 2}, "ctx");
  CHECK(r.pass);
  CHECK(r.expected == "{1,2}");
  CHECK(oracle::describe(7) == "7");
  CHECK_FALSE(oracle::compare(1, 2, "x").pass);
}
