#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "sim6g/encoding.hpp"

namespace sim6g::crypto {

inline constexpr std::size_t kSeedSize = 32;
inline constexpr std::size_t kPublicKeySize = 32;
inline constexpr std::size_t kDigestSize = 32;

/// The one registered suite: Ed25519 (RFC 8032), deterministic.
inline constexpr std::string_view kEd25519Suite = "Ed25519Sim6g";

using PublicKey = std::array<std::uint8_t, kPublicKeySize>;

struct SuiteInfo {
  std::string_view id;
  std::size_t signature_size;
};

/// Registered suites, looked up by id. Returns nullptr for unknown ids.
const SuiteInfo* find_suite(std::string_view suite_id);

struct Digest {
  std::array<std::uint8_t, kDigestSize> bytes{};

  std::string hex() const { return hex_encode(bytes); }
  friend bool operator==(const Digest&, const Digest&) = default;
};

struct Signature {
  Bytes bytes;
  std::string suite_id{kEd25519Suite};

  std::string hex() const { return hex_encode(bytes); }
  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Private key material. Holds the 32-byte seed; the expanded signing key
/// is derived on demand.
class PrivateKey {
 public:
  PrivateKey() = default;
  explicit PrivateKey(std::array<std::uint8_t, kSeedSize> seed) : seed_(seed) {}

  const std::array<std::uint8_t, kSeedSize>& seed() const { return seed_; }
  friend bool operator==(const PrivateKey&, const PrivateKey&) = default;

 private:
  std::array<std::uint8_t, kSeedSize> seed_{};
};

struct KeyPair {
  PublicKey public_key{};
  PrivateKey private_key;
  std::string suite_id{kEd25519Suite};
};

/// Deterministic: same seed, same key pair. Throws InputError unless the
/// seed is exactly 32 bytes.
KeyPair generate_keypair(ByteView seed);

/// Convenience for hex seeds as used by configs and the CLI.
KeyPair keypair_from_hex(std::string_view seed_hex);

Signature sign(const PrivateKey& key, ByteView message);

/// Never throws; malformed keys or signatures simply reject.
bool verify(ByteView public_key, ByteView message, const Signature& sig);

/// SHA-256.
Digest content_id(ByteView data);

}  // namespace sim6g::crypto
