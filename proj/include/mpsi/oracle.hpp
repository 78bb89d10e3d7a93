#pragma once

/// @file oracle.hpp
/// @brief Brute-force ground truth for tests.
///
/// Deliberately shares no code with the circuit, garbling or protocol paths:
/// plain standard-library containers and Boost.Math for the chi-square tail.

#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace mpsi::oracle {

using Value = std::uint64_t;

/// m-way intersection by hashing: count occurrences across sets.
std::set<Value> intersect(const std::vector<std::vector<Value>>& sets);

/// Same result by repeated sorted-merge; used to cross-check intersect().
std::set<Value> intersect_by_merge(const std::vector<std::vector<Value>>& sets);

struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// |A n B| / |A u B| in lowest terms, by enumerating union and intersection.
/// Throws std::invalid_argument when both sets are empty.
Fraction jaccard(const std::vector<Value>& a, const std::vector<Value>& b);

bool is_ascending(const std::vector<Value>& v);
bool same_multiset(std::vector<Value> a, std::vector<Value> b);

/// Number of set bits.
std::uint64_t hamming_weight(const std::vector<std::uint8_t>& bits);

/// All 2^len vectors over {0,1}, vector k holding the bits of k LSB first.
std::vector<std::vector<std::uint8_t>> all_binary_vectors(unsigned len);

struct UniformityResult {
  double statistic = 0;
  double p_value = 0;
  std::uint64_t cells = 0;
  std::uint64_t samples = 0;
  bool pass = false;
};

/// Chi-square goodness of fit of permutation samples of [0, n) against the
/// uniform distribution on all n! permutations. Requires n <= 5 and at least
/// 10 n! samples (std::invalid_argument otherwise).
UniformityResult uniformity_check(const std::vector<std::vector<std::uint32_t>>& samples,
                                  unsigned n, double alpha = 0.001);

struct OracleReport {
  std::string expected;
  std::string observed;
  bool pass = false;
  std::string context;
};

template <typename T>
std::string describe(const T& v) {
  std::ostringstream out;
  if constexpr (requires { v.begin(); v.end(); }) {
    out << '{';
    bool first = true;
    for (const auto& x : v) {
      out << (first ? "" : ",") << x;
      first = false;
    }
    out << '}';
  } else {
    out << v;
  }
  return out.str();
}

template <typename T>
OracleReport compare(const T& expected, const T& observed, std::string context) {
  return OracleReport{describe(expected), describe(observed), expected == observed, std::move(context)};
}

}  // namespace mpsi::oracle
