#include "mpsi/encode.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <set>
#include <unordered_set>

#include "mpsi/config.hpp"
#include "mpsi/crypto.hpp"

namespace mpsi {

std::vector<std::string> read_tokens(std::istream& in) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    std::string token = line.substr(first, last - first + 1);
    if (seen.insert(token).second) out.push_back(std::move(token));
  }
  return out;
}

std::vector<std::string> load_tokens(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open input file " + path);
  return read_tokens(f);
}

Element encode_token(std::string_view token, std::uint32_t sigma) {
  if (sigma < 1 || sigma > 64) throw InputError("sigma must be in [1, 64]");
  const auto digest = sha256(token);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | digest[i];
  if (sigma < 64) v &= (std::uint64_t{1} << sigma) - 1;
  return v == 0 ? 1 : v;
}

EncodedSet encode_elements(const std::vector<std::string>& tokens, std::uint32_t sigma) {
  EncodedSet out;
  for (const auto& t : tokens) {
    const Element e = encode_token(t, sigma);
    const auto [it, fresh] = out.tokens.emplace(e, t);
    if (!fresh && it->second != t) {
      throw InputError("hash collision at sigma=" + std::to_string(sigma) + ": '" + it->second +
                       "' and '" + t + "' encode to the same element; raise sigma");
    }
  }
  out.elements.reserve(out.tokens.size());
  for (const auto& [e, t] : out.tokens) out.elements.push_back(e);
  return out;
}

std::uint32_t resolve_sigma(std::string_view text, std::uint32_t n) {
  if (text == "auto") return protocol_sigma(n);
  std::uint32_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || v < 1 || v > 64) {
    throw InputError("sigma must be 'auto' or an integer in [1, 64], got '" + std::string(text) + "'");
  }
  return v;
}

std::uint32_t session_size_for(std::uint64_t count) {
  if (count > (std::uint64_t{1} << 30)) throw InputError("set too large");
  return static_cast<std::uint32_t>(std::bit_ceil(std::max<std::uint64_t>(count, 2)));
}

std::vector<Element> pad_set(std::span<const Element> real, std::uint32_t n, std::uint32_t sigma,
                             std::uint32_t party_id, std::uint32_t parties) {
  if (real.size() > n) {
    throw InputError("set has " + std::to_string(real.size()) + " elements, more than n=" +
                     std::to_string(n));
  }
  if (party_id < 1 || party_id > parties) throw InputError("party id out of range");
  const auto tag_bits = static_cast<std::uint32_t>(std::bit_width(parties - 1u));
  if (real.size() < n && tag_bits >= sigma) {
    throw InputError("sigma=" + std::to_string(sigma) + " leaves no room for padding");
  }
  const std::uint32_t low_bits = sigma - tag_bits;
  const std::uint64_t low_max =
      low_bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << low_bits) - 1;
  const std::uint64_t tag = std::uint64_t{party_id - 1} << low_bits;

  std::vector<Element> out(real.begin(), real.end());
  const std::set<Element> own(real.begin(), real.end());
  std::uint64_t low = low_max;
  while (out.size() < n) {
    const Element candidate = tag | low;
    if (candidate != 0 && !own.contains(candidate)) out.push_back(candidate);
    if (low == 0) break;
    --low;
  }
  if (out.size() < n) throw InputError("not enough reserved values to pad the set");
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mpsi
