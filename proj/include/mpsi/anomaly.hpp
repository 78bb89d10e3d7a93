#pragma once

/// @file anomaly.hpp
/// @brief Jaccard similarity from a revealed intersection size, and the
/// threshold verdict used to flag a traffic window against a peer blacklist.
///
/// Everything is exact: similarities and thresholds are reduced fractions and
/// comparisons are done by cross-multiplication.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mpsi/ot.hpp"

namespace mpsi {

struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  /// Reduced form; throws std::invalid_argument on a zero denominator.
  static Rational of(std::uint64_t num, std::uint64_t den);

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return static_cast<unsigned __int128>(a.num) * b.den <=>
           static_cast<unsigned __int128>(b.num) * a.den;
  }
};

/// "0.4", ".25", "1", "2/5". Must lie in [0, 1]. Throws std::invalid_argument.
Rational parse_threshold(std::string_view text);

/// c / (n1 + n2 - c). Throws std::invalid_argument unless c <= min(n1, n2)
/// and the union is nonempty.
Rational jaccard_from_counts(std::uint64_t c, std::uint64_t n1, std::uint64_t n2);

enum class Verdict { kRegular, kAnomalous };

std::string_view verdict_name(Verdict verdict);

struct AnomalyVerdict {
  std::string peer;
  std::uint64_t intersection = 0;
  std::uint64_t own_size = 0;
  std::uint64_t peer_size = 0;
  Rational jaccard;
  Rational threshold;
  Verdict label = Verdict::kRegular;
};

/// Anomalous iff the similarity strictly exceeds the threshold.
AnomalyVerdict judge(std::string peer, std::uint64_t c, std::uint64_t own_size,
                     std::uint64_t peer_size, const Rational& threshold);

/// Two-party cardinality sessions, one per blacklist, run in this process.
std::vector<AnomalyVerdict> detect_local(const std::vector<std::string>& window,
                                         const std::vector<std::vector<std::string>>& blacklists,
                                         const std::vector<std::string>& names,
                                         const Rational& threshold, std::string_view sigma,
                                         OtBackend backend);

}  // namespace mpsi
