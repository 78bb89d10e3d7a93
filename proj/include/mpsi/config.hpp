#pragma once

/// @file config.hpp
/// @brief Session configuration: flat key=value text shared by all parties.
///
/// Keys: m, n, sigma, mode, role, party_id, ot_backend, roster.<id>, and the
/// optional kappa, lambda and compaction. Lines starting with '#' are ignored.

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mpsi/ot.hpp"
#include "mpsi/psi_circuit.hpp"

namespace mpsi {

enum class Role { kGarbler, kEvaluator, kContributor };

std::string_view role_name(Role role);
/// Role implied by a party id: 1 garbles, 2 evaluates, the rest contribute.
Role role_for_party(std::uint32_t party_id);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

/// "host:port"; throws ConfigError.
Endpoint parse_endpoint(std::string_view text);

struct SessionConfig {
  std::uint32_t m = 2;
  std::uint32_t n = 2;
  std::uint32_t sigma = 32;
  std::uint32_t kappa = 128;
  /// Statistical security parameter; recorded and hashed, not used.
  std::uint32_t lambda = 80;
  OutputMode mode = OutputMode::kIntersection;
  Compaction compaction = Compaction::kSortingNetwork;
  Role role = Role::kGarbler;
  std::uint32_t party_id = 1;
  OtBackend ot_backend = OtBackend::kReal;
  std::map<std::uint32_t, Endpoint> roster;

  CircuitParams circuit_params() const;
};

/// sigma = 40 + 2 log2(n) - 1.
std::uint32_t auto_sigma(std::uint32_t n);
/// auto_sigma capped at the 64-bit element width used on the wire.
std::uint32_t protocol_sigma(std::uint32_t n);

/// Parses and validates; `sigma=auto` resolves to protocol_sigma(n). Throws
/// ConfigError.
SessionConfig parse_config(std::string_view text);
SessionConfig load_config(const std::string& path);

/// Throws ConfigError on inconsistent values.
void validate_config(const SessionConfig& config);

/// Serialization of every field all parties must agree on (role and party_id
/// excluded), in fixed key order.
std::string canonical_config(const SessionConfig& config);
std::array<std::uint8_t, 32> config_hash(const SessionConfig& config);

/// Full round-trippable text including role and party_id.
std::string format_config(const SessionConfig& config);

}  // namespace mpsi
