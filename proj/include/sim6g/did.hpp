#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "sim6g/canonical.hpp"
#include "sim6g/crypto.hpp"
#include "sim6g/ledger.hpp"

namespace sim6g::did {

inline constexpr std::string_view kMethodName = "sim6g";
inline constexpr std::string_view kDidPrefix = "did:sim6g:";
inline constexpr std::size_t kIdBytes = 16;

/// `did:sim6g:<base58 of 16 bytes>`.
class Did {
 public:
  Did() = default;

  /// Throws InputError unless the text matches the DID grammar exactly.
  static Did parse(std::string_view text);

  /// First 16 bytes of SHA-256(public key), base-58 encoded.
  static Did from_public_key(const crypto::PublicKey& key);

  const std::string& str() const { return text_; }
  std::string_view method_specific_id() const;
  bool empty() const { return text_.empty(); }

  friend auto operator<=>(const Did&, const Did&) = default;

 private:
  explicit Did(std::string text) : text_(std::move(text)) {}
  std::string text_;
};

/// `<did>#<fragment>` reference to a verification method.
struct MethodRef {
  Did did;
  std::string fragment;  // includes the leading '#'

  static MethodRef parse(std::string_view text);
  std::string str() const { return did.str() + fragment; }
};

enum class Purpose { Authentication, Assertion };

std::string_view to_string(Purpose p);

struct VerificationMethod {
  std::string id;  // "#key-0"
  std::string suite_id{crypto::kEd25519Suite};
  crypto::PublicKey public_key{};
  std::vector<Purpose> purposes;

  bool has(Purpose p) const;
  friend bool operator==(const VerificationMethod&, const VerificationMethod&) = default;
};

struct ServiceEndpointEntry {
  std::string id;  // "#roaming-gate"
  std::string type;
  std::string endpoint;

  friend bool operator==(const ServiceEndpointEntry&, const ServiceEndpointEntry&) = default;
};

/// The on-ledger half of an identity. There are no fields for personal data.
struct DidDocument {
  Did id;
  std::optional<Did> controller;
  std::vector<VerificationMethod> verification_methods;
  std::vector<ServiceEndpointEntry> services;
  std::uint64_t version = 0;
  bool deactivated = false;

  const VerificationMethod* find_method(std::string_view fragment) const;
  const ServiceEndpointEntry* find_service(std::string_view id) const;

  /// Throws InputError when structural invariants are violated.
  void validate() const;

  Value to_value() const;
  static DidDocument from_value(const Value& v);

  friend bool operator==(const DidDocument&, const DidDocument&) = default;
};

/// A key an actor can sign with, addressed by its full method reference.
struct Signer {
  MethodRef method;
  crypto::PrivateKey key;
};

struct CreateResult {
  Did did;
  DidDocument document;
  ledger::Receipt receipt;
};

struct Resolution {
  DidDocument document;
  std::uint64_t version = 0;
  bool deactivated = false;
  ledger::Tick as_of_tick = 0;
};

/// Registers DidCreate/DidUpdate/DidDeactivate admission rules.
void install_validators(ledger::LedgerNetwork& network);

/// Fragment of the initial verification method.
inline constexpr std::string_view kInitialKeyFragment = "#key-0";

/// Throws ConflictError if the key was used before.
CreateResult create_did(ledger::LedgerNetwork& network, const ledger::NodeId& node,
                        const crypto::KeyPair& keypair);

std::optional<Resolution> resolve(const ledger::NodeView& view, const Did& did);
std::optional<Resolution> resolve(const ledger::LedgerNetwork& network, const ledger::NodeId& node,
                                  const Did& did);

/// Every historical version for did, reconstructed from the log.
std::vector<DidDocument> history(const ledger::NodeView& view, const Did& did);

/// Commits `new_body` as the next version. The body's id must match; its
/// version and deactivated fields are set here.
ledger::Receipt update_document(ledger::LedgerNetwork& network, const ledger::NodeId& node,
                                const Did& did, DidDocument new_body, const Signer& signer);

ledger::Receipt deactivate(ledger::LedgerNetwork& network, const ledger::NodeId& node,
                           const Did& did, const Signer& signer);

// Ownership proofs -----------------------------------------------------------

inline constexpr std::size_t kNonceSize = 16;
using Nonce = std::array<std::uint8_t, kNonceSize>;

struct OwnershipChallenge {
  Nonce nonce{};
  Did audience;
  Did subject;
  ledger::Tick issued_tick = 0;
  ledger::Tick validity_ticks = 1;
};

struct OwnershipResponse {
  std::string method_ref;
  crypto::Signature signature;
};

enum class OwnershipVerdict {
  Accept,
  Expired,
  Replayed,
  Deactivated,
  NoMatchingKey,
  BadSignature,
  UnknownDid,
};

std::string_view to_string(OwnershipVerdict v);

/// Canonical bytes the subject signs: {audience, nonce, subject_did}.
std::string ownership_signing_input(const OwnershipChallenge& challenge);

OwnershipResponse respond_to_challenge(const crypto::KeyPair& subject_keypair,
                                       std::string_view method_fragment,
                                       const OwnershipChallenge& challenge);

/// Deterministic nonce derivation from a seed.
Nonce nonce_from_seed(std::uint64_t rng_seed);

/// Verifier-side challenge state. Owned by a single verifier actor.
class ChallengeBook {
 public:
  explicit ChallengeBook(Did challenger) : challenger_(std::move(challenger)) {}

  const Did& challenger() const { return challenger_; }

  /// Throws InputError for validity_ticks == 0.
  OwnershipChallenge make_challenge(const Did& subject, ledger::Tick current_tick,
                                    ledger::Tick validity_ticks, std::uint64_t rng_seed);

  /// Consumes the nonce. Only the subject's own authentication keys count;
  /// a controller cannot prove ownership on the subject's behalf.
  OwnershipVerdict verify_ownership(const ledger::LedgerNetwork& network, const ledger::NodeId& node,
                                    const Did& subject, const OwnershipChallenge& challenge,
                                    const OwnershipResponse& response);

  std::size_t outstanding() const { return outstanding_.size(); }

 private:
  Did challenger_;
  // (audience, subject, nonce) -> (issued_tick, validity_ticks)
  std::map<std::tuple<std::string, std::string, Nonce>, std::pair<ledger::Tick, ledger::Tick>> outstanding_;
};

}  // namespace sim6g::did
