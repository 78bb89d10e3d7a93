#pragma once

/// @file encode.hpp
/// @brief Token files to protocol elements, and padding to the session size.

#include <cstdint>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mpsi/psi_circuit.hpp"

namespace mpsi {

/// Bad input file, hash collision or a set that does not fit.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One token per line; blank lines and lines starting with '#' are skipped,
/// surrounding whitespace is trimmed and repeats are dropped (first one wins).
std::vector<std::string> read_tokens(std::istream& in);
std::vector<std::string> load_tokens(const std::string& path);

/// First 8 bytes of SHA-256(token) as a little-endian integer, truncated to
/// sigma bits; 0 becomes 1.
Element encode_token(std::string_view token, std::uint32_t sigma);

struct EncodedSet {
  /// Ascending.
  std::vector<Element> elements;
  /// Inverse of the encoding for this party's own tokens.
  std::map<Element, std::string> tokens;
};

/// Encodes distinct tokens. Two tokens mapping to one element is reported as
/// an InputError rather than silently shrinking the set.
EncodedSet encode_elements(const std::vector<std::string>& tokens, std::uint32_t sigma);

/// "auto" or a decimal bit count in [1, 64].
std::uint32_t resolve_sigma(std::string_view text, std::uint32_t n);

/// Smallest power of two >= max(count, 2).
std::uint32_t session_size_for(std::uint64_t count);

/// Fills a set up to n with values reserved for `party_id`: the top
/// bit_width(m - 1) bits carry party_id - 1 and the low bits count down from
/// all-ones, skipping the party's own real values. Reserved ranges of
/// different parties are disjoint, so padding never joins the intersection.
std::vector<Element> pad_set(std::span<const Element> real, std::uint32_t n, std::uint32_t sigma,
                             std::uint32_t party_id, std::uint32_t parties);

}  // namespace mpsi
