#pragma once

/// @file crypto.hpp
/// @brief 128-bit labels, the fixed-key AES hash and an AES-CTR generator.

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace mpsi {

/// A kappa = 128 bit value: wire labels, seeds, OT messages.
struct Label {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  /// Point-and-permute color bit.
  bool color() const { return lo & 1; }

  Label& operator^=(const Label& o) {
    lo ^= o.lo;
    hi ^= o.hi;
    return *this;
  }
  friend Label operator^(Label a, const Label& b) { return a ^= b; }
  friend bool operator==(const Label&, const Label&) = default;

  /// Little-endian 16-byte encoding.
  void store(std::uint8_t* out) const;
  static Label load(const std::uint8_t* in);
};

inline constexpr std::size_t kLabelBytes = 16;
inline constexpr std::uint32_t kKappa = 128;

/// Doubling in GF(2^128) modulo x^128 + x^7 + x^2 + x + 1.
Label gf_double(const Label& x);

/// AES-128 with a fixed key, used as a public random permutation.
class FixedKeyAes {
 public:
  FixedKeyAes();
  explicit FixedKeyAes(const Label& key);
  ~FixedKeyAes();
  FixedKeyAes(const FixedKeyAes&) = delete;
  FixedKeyAes& operator=(const FixedKeyAes&) = delete;

  void encrypt(std::span<const Label> in, std::span<Label> out) const;

 private:
  struct Ctx;
  std::unique_ptr<Ctx> ctx_;
};

/// Tweakable hash H(x, t) = pi(K) ^ K with K = 2x ^ t, pi fixed-key AES.
class TweakHash {
 public:
  Label operator()(const Label& x, std::uint64_t tweak) const;

  /// Hashes count (label, tweak) pairs at once.
  void hash(std::span<const Label> xs, std::span<const std::uint64_t> tweaks,
            std::span<Label> out) const;

 private:
  FixedKeyAes aes_;
};

/// AES-128 in counter mode keyed by a seed. Deterministic for a given seed.
class Prg {
 public:
  explicit Prg(const Label& seed);
  ~Prg();
  Prg(Prg&&) noexcept;
  Prg& operator=(Prg&&) noexcept;

  /// Seed drawn from the operating system's CSPRNG.
  static Prg from_entropy();

  void fill(std::span<std::uint8_t> out);
  Label next_label();
  std::uint64_t next_u64();
  /// Uniform integer in [0, bound), bound > 0, by rejection sampling.
  std::uint64_t uniform(std::uint64_t bound);

 private:
  struct Ctx;
  std::unique_ptr<Ctx> ctx_;
};

/// Uniform permutation of [0, n) by Fisher-Yates.
std::vector<std::uint32_t> random_permutation(std::size_t n, Prg& prg);

/// Operating-system randomness.
Label os_random_label();

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);
std::array<std::uint8_t, 32> sha256(std::string_view text);

}  // namespace mpsi
