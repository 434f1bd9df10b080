#include "sim6g/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <array>
#include <stdexcept>

#include "sim6g/errors.hpp"

namespace sim6g::crypto {
namespace {

constexpr std::array<SuiteInfo, 1> kSuites{{{kEd25519Suite, crypto_sign_BYTES}}};

void ensure_sodium() {
  static const bool ready = [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
    return true;
  }();
  (void)ready;
}

struct ExpandedKey {
  std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES> pk{};
  std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};

  ~ExpandedKey() { sodium_memzero(sk.data(), sk.size()); }
};

ExpandedKey expand(const std::array<std::uint8_t, kSeedSize>& seed) {
  ensure_sodium();
  ExpandedKey key;
  crypto_sign_seed_keypair(key.pk.data(), key.sk.data(), seed.data());
  return key;
}

}  // namespace

const SuiteInfo* find_suite(std::string_view suite_id) {
  auto it = std::find_if(kSuites.begin(), kSuites.end(),
                         [&](const SuiteInfo& s) { return s.id == suite_id; });
  return it == kSuites.end() ? nullptr : &*it;
}

KeyPair generate_keypair(ByteView seed) {
  if (seed.size() != kSeedSize) {
    throw InputError("seed must be exactly 32 bytes, got " + std::to_string(seed.size()));
  }
  std::array<std::uint8_t, kSeedSize> s{};
  std::copy(seed.begin(), seed.end(), s.begin());
  auto expanded = expand(s);
  KeyPair kp;
  std::copy(expanded.pk.begin(), expanded.pk.end(), kp.public_key.begin());
  kp.private_key = PrivateKey(s);
  return kp;
}

KeyPair keypair_from_hex(std::string_view seed_hex) { return generate_keypair(hex_decode(seed_hex)); }

Signature sign(const PrivateKey& key, ByteView message) {
  auto expanded = expand(key.seed());
  Signature sig;
  sig.bytes.resize(crypto_sign_BYTES);
  crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(), expanded.sk.data());
  return sig;
}

bool verify(ByteView public_key, ByteView message, const Signature& sig) {
  const SuiteInfo* suite = find_suite(sig.suite_id);
  if (suite == nullptr) return false;
  if (public_key.size() != crypto_sign_PUBLICKEYBYTES) return false;
  if (sig.bytes.size() != suite->signature_size) return false;
  ensure_sodium();
  return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(),
                                     public_key.data()) == 0;
}

Digest content_id(ByteView data) {
  ensure_sodium();
  Digest d;
  crypto_hash_sha256(d.bytes.data(), data.data(), data.size());
  return d;
}

}  // namespace sim6g::crypto
