#include "mpsi/oracle.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace mpsi::oracle {

std::set<Value> intersect(const std::vector<std::vector<Value>>& sets) {
  if (sets.empty()) return {};
  std::unordered_map<Value, std::size_t> seen_in;
  for (const auto& s : sets) {
    const std::unordered_set<Value> distinct(s.begin(), s.end());
    for (Value v : distinct) ++seen_in[v];
  }
  std::set<Value> out;
  for (const auto& [v, count] : seen_in) {
    if (count == sets.size()) out.insert(v);
  }
  return out;
}

std::set<Value> intersect_by_merge(const std::vector<std::vector<Value>>& sets) {
  if (sets.empty()) return {};
  std::vector<Value> acc = sets[0];
  std::sort(acc.begin(), acc.end());
  acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
  for (std::size_t k = 1; k < sets.size(); ++k) {
    std::vector<Value> next = sets[k];
    std::sort(next.begin(), next.end());
    std::vector<Value> merged;
    std::size_t i = 0, j = 0;
    while (i < acc.size() && j < next.size()) {
      if (acc[i] < next[j]) {
        ++i;
      } else if (next[j] < acc[i]) {
        ++j;
      } else {
        merged.push_back(acc[i]);
        ++i;
        while (j < next.size() && next[j] == merged.back()) ++j;
      }
    }
    acc = std::move(merged);
  }
  return {acc.begin(), acc.end()};
}

Fraction jaccard(const std::vector<Value>& a, const std::vector<Value>& b) {
  std::set<Value> uni(a.begin(), a.end());
  uni.insert(b.begin(), b.end());
  if (uni.empty()) throw std::invalid_argument("jaccard of two empty sets");
  const std::set<Value> sa(a.begin(), a.end());
  std::uint64_t common = 0;
  for (Value v : std::set<Value>(b.begin(), b.end())) common += sa.count(v);
  const std::uint64_t g = std::gcd(common, static_cast<std::uint64_t>(uni.size()));
  return Fraction{common / g, uni.size() / g};
}

bool is_ascending(const std::vector<Value>& v) { return std::is_sorted(v.begin(), v.end()); }

bool same_multiset(std::vector<Value> a, std::vector<Value> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

std::uint64_t hamming_weight(const std::vector<std::uint8_t>& bits) {
  std::uint64_t w = 0;
  for (auto b : bits) w += b != 0;
  return w;
}

std::vector<std::vector<std::uint8_t>> all_binary_vectors(unsigned len) {
  if (len > 24) throw std::invalid_argument("too many vectors to enumerate");
  std::vector<std::vector<std::uint8_t>> out(std::size_t{1} << len, std::vector<std::uint8_t>(len));
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (unsigned i = 0; i < len; ++i) out[k][i] = (k >> i) & 1;
  }
  return out;
}

UniformityResult uniformity_check(const std::vector<std::vector<std::uint32_t>>& samples,
                                  unsigned n, double alpha) {
  if (n < 2 || n > 5) throw std::invalid_argument("uniformity_check supports 2 <= n <= 5");
  std::uint64_t cells = 1;
  for (unsigned k = 2; k <= n; ++k) cells *= k;
  if (samples.size() < 10 * cells) {
    throw std::invalid_argument("too few samples: " + std::to_string(samples.size()) + " < 10 n! = " +
                                std::to_string(10 * cells));
  }
  std::map<std::vector<std::uint32_t>, std::uint64_t> counts;
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    counts[perm] = 0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (const auto& s : samples) {
    const auto it = counts.find(s);
    if (it == counts.end()) throw std::invalid_argument("sample is not a permutation of [0, n)");
    ++it->second;
  }
  const double expected = static_cast<double>(samples.size()) / static_cast<double>(cells);
  UniformityResult r;
  r.cells = cells;
  r.samples = samples.size();
  for (const auto& [p, c] : counts) {
    const double d = static_cast<double>(c) - expected;
    r.statistic += d * d / expected;
  }
  const boost::math::chi_squared dist(static_cast<double>(cells - 1));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  r.pass = r.p_value > alpha;
  return r;
}

}  // namespace mpsi::oracle
