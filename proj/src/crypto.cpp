#include "mpsi/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace mpsi {

namespace {

// Public key for the fixed-key permutation.
constexpr std::uint8_t kFixedKey[16] = {0x61, 0x7e, 0x8d, 0xa2, 0xa0, 0x51, 0x1e, 0x96,
                                        0x5e, 0x41, 0xc2, 0x9b, 0x15, 0x3f, 0xc7, 0x7a};

EVP_CIPHER_CTX* new_aes_ctx(const EVP_CIPHER* cipher, const std::uint8_t* key,
                            const std::uint8_t* iv) {
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  if (ctx == nullptr || EVP_EncryptInit_ex(ctx, cipher, nullptr, key, iv) != 1) {
    EVP_CIPHER_CTX_free(ctx);
    throw std::runtime_error("failed to initialize AES");
  }
  EVP_CIPHER_CTX_set_padding(ctx, 0);
  return ctx;
}

}  // namespace

void Label::store(std::uint8_t* out) const {
  for (int i = 0; i < 8; ++i) {
    out[i] = static_cast<std::uint8_t>(lo >> (8 * i));
    out[8 + i] = static_cast<std::uint8_t>(hi >> (8 * i));
  }
}

Label Label::load(const std::uint8_t* in) {
  Label l;
  for (int i = 0; i < 8; ++i) {
    l.lo |= static_cast<std::uint64_t>(in[i]) << (8 * i);
    l.hi |= static_cast<std::uint64_t>(in[8 + i]) << (8 * i);
  }
  return l;
}

Label gf_double(const Label& x) {
  const std::uint64_t carry = x.hi >> 63;
  Label r;
  r.hi = (x.hi << 1) | (x.lo >> 63);
  r.lo = (x.lo << 1) ^ (carry * 0x87);
  return r;
}

struct FixedKeyAes::Ctx {
  EVP_CIPHER_CTX* ctx = nullptr;
  ~Ctx() { EVP_CIPHER_CTX_free(ctx); }
};

FixedKeyAes::FixedKeyAes() : ctx_(std::make_unique<Ctx>()) {
  ctx_->ctx = new_aes_ctx(EVP_aes_128_ecb(), kFixedKey, nullptr);
}

FixedKeyAes::FixedKeyAes(const Label& key) : ctx_(std::make_unique<Ctx>()) {
  std::uint8_t raw[16];
  key.store(raw);
  ctx_->ctx = new_aes_ctx(EVP_aes_128_ecb(), raw, nullptr);
}

FixedKeyAes::~FixedKeyAes() = default;

void FixedKeyAes::encrypt(std::span<const Label> in, std::span<Label> out) const {
  static_assert(sizeof(Label) == 16);
  if (in.size() != out.size()) throw std::invalid_argument("AES batch size mismatch");
  if (in.empty()) return;
  // Label is two little-endian u64 words, matching the byte order of store()
  // on the little-endian targets we build for.
  int len = 0;
  if (EVP_EncryptUpdate(ctx_->ctx, reinterpret_cast<unsigned char*>(out.data()), &len,
                        reinterpret_cast<const unsigned char*>(in.data()),
                        static_cast<int>(in.size() * sizeof(Label))) != 1) {
    throw std::runtime_error("AES encryption failed");
  }
}

Label TweakHash::operator()(const Label& x, std::uint64_t tweak) const {
  Label k = gf_double(x);
  k.lo ^= tweak;
  Label y;
  aes_.encrypt(std::span(&k, 1), std::span(&y, 1));
  return y ^ k;
}

void TweakHash::hash(std::span<const Label> xs, std::span<const std::uint64_t> tweaks,
                     std::span<Label> out) const {
  constexpr std::size_t kBatch = 64;
  Label keys[kBatch];
  for (std::size_t start = 0; start < xs.size(); start += kBatch) {
    const std::size_t count = std::min(kBatch, xs.size() - start);
    for (std::size_t i = 0; i < count; ++i) {
      keys[i] = gf_double(xs[start + i]);
      keys[i].lo ^= tweaks[start + i];
    }
    aes_.encrypt(std::span(keys, count), out.subspan(start, count));
    for (std::size_t i = 0; i < count; ++i) out[start + i] ^= keys[i];
  }
}

struct Prg::Ctx {
  EVP_CIPHER_CTX* ctx = nullptr;
  std::uint8_t buffer[4096];
  std::size_t pos = sizeof(buffer);
  ~Ctx() { EVP_CIPHER_CTX_free(ctx); }

  void refill() {
    static const std::uint8_t zeros[sizeof(buffer)] = {};
    int len = 0;
    if (EVP_EncryptUpdate(ctx, buffer, &len, zeros, sizeof(buffer)) != 1) {
      throw std::runtime_error("AES-CTR failed");
    }
    pos = 0;
  }
};

Prg::Prg(const Label& seed) : ctx_(std::make_unique<Ctx>()) {
  std::uint8_t key[16];
  seed.store(key);
  const std::uint8_t iv[16] = {};
  ctx_->ctx = new_aes_ctx(EVP_aes_128_ctr(), key, iv);
}

Prg::~Prg() = default;
Prg::Prg(Prg&&) noexcept = default;
Prg& Prg::operator=(Prg&&) noexcept = default;

Prg Prg::from_entropy() { return Prg(os_random_label()); }

void Prg::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (ctx_->pos == sizeof(ctx_->buffer)) ctx_->refill();
    const std::size_t take = std::min(out.size() - done, sizeof(ctx_->buffer) - ctx_->pos);
    std::memcpy(out.data() + done, ctx_->buffer + ctx_->pos, take);
    ctx_->pos += take;
    done += take;
  }
}

Label Prg::next_label() {
  std::uint8_t raw[16];
  fill(raw);
  return Label::load(raw);
}

std::uint64_t Prg::next_u64() {
  std::uint8_t raw[8];
  fill(raw);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(raw[i]) << (8 * i);
  return v;
}

std::uint64_t Prg::uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform: bound must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    const std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

std::vector<std::uint32_t> random_permutation(std::size_t n, Prg& prg) {
  std::vector<std::uint32_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = prg.uniform(i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

Label os_random_label() {
  std::uint8_t raw[16];
  if (RAND_bytes(raw, sizeof(raw)) != 1) throw std::runtime_error("RAND_bytes failed");
  return Label::load(raw);
}

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
  std::array<std::uint8_t, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  return out;
}

std::array<std::uint8_t, 32> sha256(std::string_view text) {
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace mpsi
