#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sim6g/canonical.hpp"
#include "sim6g/crypto.hpp"
#include "sim6g/did.hpp"
#include "sim6g/ledger.hpp"

namespace sim6g::vc {

using did::Did;
using ledger::Tick;

/// Schema labels used by the scenarios.
namespace schema {
inline constexpr std::string_view kAccessPermission = "AccessPermission";
inline constexpr std::string_view kNetworkAuthorization = "NetworkAuthorization";
inline constexpr std::string_view kAlterationPermission = "AlterationPermission";
inline constexpr std::string_view kLocationAttestation = "LocationAttestation";
inline constexpr std::string_view kSocialSecurityNumber = "SocialSecurityNumber";
}  // namespace schema

struct StatusRef {
  std::string registry_id;
  std::uint64_t index = 0;

  friend bool operator==(const StatusRef&, const StatusRef&) = default;
};

struct Proof {
  std::string verification_method;
  crypto::Signature signature;

  friend bool operator==(const Proof&, const Proof&) = default;
};

struct Credential {
  std::string credential_id;
  std::string schema;
  Did issuer;
  Did subject;
  Value claims = Value::object();
  Tick valid_from_tick = 0;
  Tick valid_until_tick = 0;
  std::optional<StatusRef> status;
  Proof proof;

  /// Signed content: everything except credential_id and proof.
  Value body() const;
  Value to_value() const;
  static Credential from_value(const Value& v);

  std::string serialize() const { return canonicalize(to_value()); }
  /// Strict: the text must be canonical.
  static Credential parse(std::string_view text) { return from_value(parse_canonical(text)); }

  friend bool operator==(const Credential&, const Credential&) = default;
};

/// Lowercase hex of content_id(canonical body).
std::string credential_id_of(const Credential& c);

struct Presentation {
  Did holder;
  std::vector<Credential> credentials;
  did::Nonce challenge_nonce{};
  Did audience;
  Proof proof;

  Value body() const;
  Value to_value() const;
  static Presentation from_value(const Value& v);

  std::string serialize() const { return canonicalize(to_value()); }
  static Presentation parse(std::string_view text) { return from_value(parse_canonical(text)); }
};

/// One actor's keys and credential store. Never shared between actors.
class Wallet {
 public:
  struct Entry {
    crypto::KeyPair keypair;
    std::vector<did::Purpose> purposes;
  };

  Wallet() = default;
  explicit Wallet(Did did) : did_(std::move(did)) {}

  const Did& did() const { return did_; }
  void set_did(Did did) { did_ = std::move(did); }

  void add_key(std::string fragment, crypto::KeyPair keypair, std::vector<did::Purpose> purposes);
  void remove_key(std::string_view fragment);
  const Entry* key(std::string_view fragment) const;
  const std::map<std::string, Entry, std::less<>>& keys() const { return keys_; }

  /// First held key whose fragment has `purpose` in `doc` (or, without a
  /// document, in the wallet's own bookkeeping).
  std::optional<did::Signer> signer_for(did::Purpose purpose, const did::DidDocument* doc = nullptr) const;

  void store(Credential c) { credentials_.push_back(std::move(c)); }
  const std::vector<Credential>& credentials() const { return credentials_; }

  /// Status-list allocation state for this wallet as an issuer.
  std::uint64_t allocate_status_index() { return next_status_index_++; }
  std::uint64_t next_status_index() const { return next_status_index_; }
  void set_next_status_index(std::uint64_t n) { next_status_index_ = n; }

 private:
  Did did_;
  std::map<std::string, Entry, std::less<>> keys_;
  std::vector<Credential> credentials_;
  std::uint64_t next_status_index_ = 0;
};

// Revocation registry ------------------------------------------------------------

/// One registry per issuer.
std::string registry_id_for(const Did& issuer);

enum class StatusResult { Active, Revoked, UnknownRegistry };

std::string_view to_string(StatusResult s);

struct RevocationRegistryState {
  std::string registry_id;
  Did issuer;
  std::vector<std::uint64_t> revoked;  // ascending
};

/// Reconstructed from the view's RevocationUpdate entries.
std::optional<RevocationRegistryState> registry_state(const ledger::NodeView& view,
                                                      std::string_view registry_id);

StatusResult check_status(const ledger::NodeView& view, const StatusRef& ref);
StatusResult check_status(const ledger::LedgerNetwork& network, const ledger::NodeId& node,
                          const StatusRef& ref);

/// Registers the RevocationUpdate admission rule.
void install_validators(ledger::LedgerNetwork& network);

/// Throws AuthorizationError for a foreign registry and ConflictError for a
/// repeated revocation.
ledger::Receipt revoke(ledger::LedgerNetwork& network, const ledger::NodeId& node,
                       const Wallet& issuer_wallet, const StatusRef& ref);

// Issuance ---------------------------------------------------------------------------

struct IssueRequest {
  Did subject;
  std::string schema;
  Value claims = Value::object();
  Tick valid_from_tick = 0;
  Tick valid_until_tick = 0;
  bool with_status = false;
};

/// Signs a credential off-ledger. Only a registry bootstrap entry may be
/// committed, never the claims.
Credential issue(ledger::LedgerNetwork& network, const ledger::NodeId& node, Wallet& issuer_wallet,
                 const IssueRequest& request);

// Verification -----------------------------------------------------------------------

enum class Check { HolderBinding, IssuerSignature, IssuerActive, SubjectMatch, TimeWindow, Status };
enum class CheckResult { Pass, Fail, Skipped };

std::string_view to_string(Check c);
std::string_view to_string(CheckResult r);

struct VerificationReport {
  bool accepted = false;
  std::map<Check, CheckResult> checks;
  Tick as_of_tick = 0;
  ledger::NodeId node;
  /// Per-credential breakdown for presentations.
  std::vector<VerificationReport> credentials;
  /// Ledger lookups performed at the verifying node (resolutions and
  /// status queries), all local.
  std::size_t ledger_reads = 0;

  CheckResult check(Check c) const;
  std::vector<Check> failed_checks() const;
  Value to_value() const;
};

VerificationReport verify_credential(const ledger::NodeView& view, const Credential& credential,
                                     const std::optional<Did>& expected_subject = std::nullopt);
VerificationReport verify_credential(const ledger::LedgerNetwork& network, const ledger::NodeId& node,
                                     const Credential& credential,
                                     const std::optional<Did>& expected_subject = std::nullopt);

/// Throws InputError for an empty credential list or a wallet without an
/// authentication key.
Presentation present(const Wallet& holder_wallet, std::vector<Credential> credentials,
                     const did::Nonce& challenge_nonce, const Did& audience);

VerificationReport verify_presentation(const ledger::NodeView& view, const Presentation& presentation,
                                       const did::Nonce& expected_nonce, const Did& expected_audience);
VerificationReport verify_presentation(const ledger::LedgerNetwork& network, const ledger::NodeId& node,
                                       const Presentation& presentation, const did::Nonce& expected_nonce,
                                       const Did& expected_audience);

}  // namespace sim6g::vc
