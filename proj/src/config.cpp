#include "mpsi/config.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace mpsi {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::uint64_t parse_uint(std::string_view key, std::string_view value, std::uint64_t max) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size() || v > max) {
    throw ConfigError("config: bad value '" + std::string(value) + "' for " + std::string(key));
  }
  return v;
}

Role parse_role(std::string_view text) {
  if (text == "garbler" || text == "P1") return Role::kGarbler;
  if (text == "evaluator" || text == "P2") return Role::kEvaluator;
  if (text == "contributor") return Role::kContributor;
  throw ConfigError("config: unknown role '" + std::string(text) +
                    "' (garbler | evaluator | contributor)");
}

}  // namespace

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kGarbler:
      return "garbler";
    case Role::kEvaluator:
      return "evaluator";
    case Role::kContributor:
      return "contributor";
  }
  return "?";
}

Role role_for_party(std::uint32_t party_id) {
  if (party_id == 1) return Role::kGarbler;
  if (party_id == 2) return Role::kEvaluator;
  return Role::kContributor;
}

Endpoint parse_endpoint(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw ConfigError("config: address '" + std::string(text) + "' is not host:port");
  }
  Endpoint e;
  e.host = std::string(text.substr(0, colon));
  e.port = static_cast<std::uint16_t>(parse_uint("port", text.substr(colon + 1), 65535));
  return e;
}

CircuitParams SessionConfig::circuit_params() const {
  return CircuitParams{m, n, sigma, mode, compaction};
}

std::uint32_t auto_sigma(std::uint32_t n) {
  return 40 + 2 * static_cast<std::uint32_t>(std::bit_width(n) - 1) - 1;
}

std::uint32_t protocol_sigma(std::uint32_t n) { return std::min(auto_sigma(n), 64u); }

void validate_config(const SessionConfig& c) {
  if (c.m < 2) throw ConfigError("config: m must be at least 2");
  if (c.n < 2 || !std::has_single_bit(c.n)) throw ConfigError("config: n must be a power of two >= 2");
  if (c.sigma < 1 || c.sigma > 64) throw ConfigError("config: sigma must be in [1, 64]");
  if (c.kappa != 128) throw ConfigError("config: only kappa = 128 is supported");
  if (c.party_id < 1 || c.party_id > c.m) {
    throw ConfigError("config: party_id " + std::to_string(c.party_id) + " outside 1.." +
                      std::to_string(c.m));
  }
  if (c.role != role_for_party(c.party_id)) {
    throw ConfigError("config: role " + std::string(role_name(c.role)) + " does not match party_id " +
                      std::to_string(c.party_id));
  }
  for (std::uint32_t id = 1; id <= c.m; ++id) {
    if (!c.roster.contains(id)) throw ConfigError("config: roster." + std::to_string(id) + " missing");
  }
  if (c.roster.size() != c.m) throw ConfigError("config: roster has entries beyond m");
}

SessionConfig parse_config(std::string_view text) {
  SessionConfig c;
  std::set<std::string> seen;
  bool sigma_auto = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("config: duplicate key " + key);

    if (key == "m") {
      c.m = static_cast<std::uint32_t>(parse_uint(key, value, 1u << 20));
    } else if (key == "n") {
      c.n = static_cast<std::uint32_t>(parse_uint(key, value, 1u << 30));
    } else if (key == "sigma") {
      sigma_auto = value == "auto";
      if (!sigma_auto) c.sigma = static_cast<std::uint32_t>(parse_uint(key, value, 1024));
    } else if (key == "kappa") {
      c.kappa = static_cast<std::uint32_t>(parse_uint(key, value, 1024));
    } else if (key == "lambda") {
      c.lambda = static_cast<std::uint32_t>(parse_uint(key, value, 1024));
    } else if (key == "mode") {
      try {
        c.mode = parse_output_mode(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    } else if (key == "compaction") {
      try {
        c.compaction = parse_compaction(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    } else if (key == "role") {
      c.role = parse_role(value);
    } else if (key == "party_id") {
      c.party_id = static_cast<std::uint32_t>(parse_uint(key, value, 1u << 20));
    } else if (key == "ot_backend") {
      try {
        c.ot_backend = parse_ot_backend(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    } else if (key.starts_with("roster.")) {
      const auto id = static_cast<std::uint32_t>(parse_uint(key, std::string_view(key).substr(7), 1u << 20));
      c.roster[id] = parse_endpoint(value);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  for (const char* required : {"m", "n", "sigma", "mode", "role", "party_id", "ot_backend"}) {
    if (!seen.contains(required)) throw ConfigError(std::string("config: missing key ") + required);
  }
  if (sigma_auto) {
    if (c.n < 2 || !std::has_single_bit(c.n)) throw ConfigError("config: n must be a power of two >= 2");
    c.sigma = protocol_sigma(c.n);
  }
  validate_config(c);
  return c;
}

SessionConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const SessionConfig& c) {
  std::ostringstream out;
  out << "compaction=" << compaction_name(c.compaction) << '\n'
      << "kappa=" << c.kappa << '\n'
      << "lambda=" << c.lambda << '\n'
      << "m=" << c.m << '\n'
      << "mode=" << output_mode_name(c.mode) << '\n'
      << "n=" << c.n << '\n'
      << "ot_backend=" << ot_backend_name(c.ot_backend) << '\n';
  for (const auto& [id, e] : c.roster) out << "roster." << id << '=' << e.host << ':' << e.port << '\n';
  out << "sigma=" << c.sigma << '\n';
  return out.str();
}

std::array<std::uint8_t, 32> config_hash(const SessionConfig& config) {
  return sha256(canonical_config(config));
}

std::string format_config(const SessionConfig& c) {
  return canonical_config(c) + "role=" + std::string(role_name(c.role)) + "\nparty_id=" +
         std::to_string(c.party_id) + '\n';
}

}  // namespace mpsi
