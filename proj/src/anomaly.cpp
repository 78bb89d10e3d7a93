#include "mpsi/anomaly.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <stdexcept>

#include "mpsi/encode.hpp"
#include "mpsi/session.hpp"

namespace mpsi {

Rational Rational::of(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  const std::uint64_t g = std::gcd(num, den);
  return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

namespace {

std::uint64_t parse_digits(std::string_view s, std::string_view whole) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad threshold '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Rational parse_threshold(std::string_view text) {
  Rational t;
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    t = Rational::of(parse_digits(text.substr(0, slash), text), parse_digits(text.substr(slash + 1), text));
  } else if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view whole = text.substr(0, dot);
    const std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 18 || (whole.empty() && frac.empty())) {
      throw std::invalid_argument("bad threshold '" + std::string(text) + "'");
    }
    std::uint64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::uint64_t w = whole.empty() ? 0 : parse_digits(whole, text);
    const std::uint64_t f = frac.empty() ? 0 : parse_digits(frac, text);
    if (w > 1) throw std::invalid_argument("threshold must lie in [0, 1]");
    t = Rational::of(w * den + f, den);
  } else {
    t = Rational::of(parse_digits(text, text), 1);
  }
  if (t > Rational{1, 1}) throw std::invalid_argument("threshold must lie in [0, 1]");
  return t;
}

Rational jaccard_from_counts(std::uint64_t c, std::uint64_t n1, std::uint64_t n2) {
  if (c > std::min(n1, n2)) {
    throw std::invalid_argument("intersection size exceeds a set size");
  }
  const std::uint64_t uni = n1 + n2 - c;
  if (uni == 0) throw std::invalid_argument("Jaccard similarity of two empty sets is undefined");
  return Rational::of(c, uni);
}

std::string_view verdict_name(Verdict verdict) {
  return verdict == Verdict::kAnomalous ? "anomalous" : "regular";
}

AnomalyVerdict judge(std::string peer, std::uint64_t c, std::uint64_t own_size,
                     std::uint64_t peer_size, const Rational& threshold) {
  AnomalyVerdict v;
  v.peer = std::move(peer);
  v.intersection = c;
  v.own_size = own_size;
  v.peer_size = peer_size;
  v.jaccard = jaccard_from_counts(c, own_size, peer_size);
  v.threshold = threshold;
  v.label = v.jaccard > threshold ? Verdict::kAnomalous : Verdict::kRegular;
  return v;
}

std::vector<AnomalyVerdict> detect_local(const std::vector<std::string>& window,
                                         const std::vector<std::vector<std::string>>& blacklists,
                                         const std::vector<std::string>& names,
                                         const Rational& threshold, std::string_view sigma,
                                         OtBackend backend) {
  if (window.empty()) throw InputError("the traffic window is empty");
  std::vector<AnomalyVerdict> out;
  for (std::size_t k = 0; k < blacklists.size(); ++k) {
    const auto& blacklist = blacklists[k];
    const std::string name = k < names.size() ? names[k] : "peer" + std::to_string(k + 1);
    if (blacklist.empty()) throw InputError("blacklist " + name + " is empty");
    const std::uint32_t n = session_size_for(std::max(window.size(), blacklist.size()));
    const std::uint32_t s = resolve_sigma(sigma, n);
    const EncodedSet own = encode_elements(window, s);
    const EncodedSet theirs = encode_elements(blacklist, s);

    SimulationOptions opt;
    opt.params = CircuitParams{2, n, s, OutputMode::kCardinality, Compaction::kSortingNetwork};
    opt.ot_backend = backend;
    const std::vector<PartyInput> inputs = {
        {pad_set(own.elements, n, s, 1, 2), own.elements.size()},
        {pad_set(theirs.elements, n, s, 2, 2), theirs.elements.size()},
    };
    const auto results = simulate_session(opt, inputs);
    const PsiResult& mine = results[0];
    out.push_back(judge(name, mine.cardinality.value(), mine.declared_sizes.at(1),
                        mine.declared_sizes.at(2), threshold));
  }
  return out;
}

}  // namespace mpsi
