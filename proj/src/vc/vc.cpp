#include "sim6g/vc.hpp"

#include <algorithm>
#include <array>

#include "sim6g/errors.hpp"

namespace sim6g::vc {
namespace {

using did::DidDocument;
using did::MethodRef;
using did::Purpose;
using ledger::NodeView;
using ledger::Transaction;
using ledger::TxKind;

constexpr std::array<TxKind, 1> kRevocationKinds{TxKind::RevocationUpdate};
constexpr std::string_view kCreateAction = "create";
constexpr std::string_view kRevokeAction = "revoke";

Value proof_to_value(const Proof& p) {
  return Value{{"verification_method", p.verification_method},
               {"suite_id", p.signature.suite_id},
               {"signature", p.signature.hex()}};
}

Proof proof_from_value(const Value& v) {
  require_exact_keys(v, {"verification_method", "suite_id", "signature"});
  Proof p;
  p.verification_method = require_string(v, "verification_method");
  p.signature.suite_id = require_string(v, "suite_id");
  p.signature.bytes = hex_decode(require_string(v, "signature"));
  return p;
}

did::Nonce nonce_from_hex(std::string_view hex) {
  auto bytes = hex_decode(hex);
  if (bytes.size() != did::kNonceSize) throw InputError("nonce must be 16 bytes");
  did::Nonce n{};
  std::copy(bytes.begin(), bytes.end(), n.begin());
  return n;
}

// Key referenced by `proof_ref`, which must belong to `owner` and carry
// `purpose` in the resolved document.
const did::VerificationMethod* proof_method(const DidDocument& doc, const Did& owner,
                                            std::string_view proof_ref, Purpose purpose) {
  try {
    auto ref = MethodRef::parse(proof_ref);
    if (ref.did != owner) return nullptr;
    const auto* m = doc.find_method(ref.fragment);
    if (m == nullptr || !m->has(purpose)) return nullptr;
    return m;
  } catch (const InputError&) {
    return nullptr;
  }
}

bool signature_ok(const did::VerificationMethod* method, const Value& body, const crypto::Signature& sig) {
  if (method == nullptr) return false;
  if (method->suite_id != sig.suite_id) return false;
  return crypto::verify(method->public_key, to_bytes(canonicalize(body)), sig);
}

Proof sign_body(const did::Signer& signer, const Value& body) {
  return Proof{signer.method.str(), crypto::sign(signer.key, to_bytes(canonicalize(body)))};
}

DidDocument active_issuer_doc(const NodeView& view, const Did& issuer) {
  auto resolved = did::resolve(view, issuer);
  if (!resolved) throw NotFoundError("issuer DID not found: " + issuer.str());
  if (resolved->deactivated) throw LifecycleError("issuer DID is deactivated: " + issuer.str());
  return std::move(resolved->document);
}

Value registry_payload(std::string_view action, const std::string& registry_id, const Did& issuer,
                       std::uint64_t index, const did::Signer& signer) {
  return Value{{"action", std::string(action)},
               {"registry_id", registry_id},
               {"issuer", issuer.str()},
               {"index", index},
               {"signer", signer.method.str()}};
}

ledger::Receipt submit_registry(ledger::LedgerNetwork& network, const ledger::NodeId& node,
                                Value payload, const did::Signer& signer) {
  Transaction tx;
  tx.kind = TxKind::RevocationUpdate;
  tx.submitter_did = signer.method.did.str();
  tx.submitter_signature = crypto::sign(signer.key, to_bytes(canonicalize(payload)));
  tx.payload = std::move(payload);
  return network.submit(node, std::move(tx));
}

void validate_revocation(const NodeView& authoritative, const Transaction& tx) {
  require_exact_keys(tx.payload, {"action", "registry_id", "issuer", "index", "signer"});
  auto action = require_string(tx.payload, "action");
  auto registry_id = require_string(tx.payload, "registry_id");
  auto issuer = Did::parse(require_string(tx.payload, "issuer"));
  auto index = require_uint(tx.payload, "index");
  if (action != kCreateAction && action != kRevokeAction) throw InputError("unknown registry action");

  auto existing = registry_state(authoritative, registry_id);
  if (existing && existing->issuer != issuer) {
    throw AuthorizationError("registry " + registry_id + " belongs to another issuer");
  }
  if (registry_id != registry_id_for(issuer)) {
    throw AuthorizationError("issuer does not own registry " + registry_id);
  }

  auto doc = active_issuer_doc(authoritative, issuer);
  if (tx.submitter_did != issuer.str()) throw AuthorizationError("registry updates come from the issuer");
  const auto* method = proof_method(doc, issuer, require_string(tx.payload, "signer"), Purpose::Assertion);
  if (method == nullptr) throw AuthorizationError("signer is not an assertion key of the issuer");
  if (!crypto::verify(method->public_key, to_bytes(canonicalize(tx.payload)), tx.submitter_signature)) {
    throw AuthorizationError("registry update signature does not verify");
  }

  if (action == kCreateAction) {
    if (existing) throw ConflictError("registry already exists: " + registry_id);
    if (index != 0) throw InputError("registry creation carries index 0");
    return;
  }
  if (!existing) throw InputError("unknown registry " + registry_id);
  if (std::binary_search(existing->revoked.begin(), existing->revoked.end(), index)) {
    throw ConflictError("index " + std::to_string(index) + " already revoked in " + registry_id);
  }
}

void set_check(VerificationReport& r, Check c, bool ok) {
  r.checks[c] = ok ? CheckResult::Pass : CheckResult::Fail;
}

void finalize(VerificationReport& r) {
  r.accepted = std::none_of(r.checks.begin(), r.checks.end(),
                            [](const auto& kv) { return kv.second == CheckResult::Fail; });
}

}  // namespace

// Credential -----------------------------------------------------------------------

Value Credential::body() const {
  return Value{{"schema", schema},
               {"issuer", issuer.str()},
               {"subject", subject.str()},
               {"claims", claims},
               {"valid_from_tick", valid_from_tick},
               {"valid_until_tick", valid_until_tick},
               {"status", status ? Value{{"registry_id", status->registry_id}, {"index", status->index}}
                                 : Value(nullptr)}};
}

Value Credential::to_value() const {
  Value v = body();
  v["credential_id"] = credential_id;
  v["proof"] = proof_to_value(proof);
  return v;
}

Credential Credential::from_value(const Value& v) {
  require_exact_keys(v, {"schema", "issuer", "subject", "claims", "valid_from_tick", "valid_until_tick",
                         "status", "credential_id", "proof"});
  Credential c;
  c.credential_id = require_string(v, "credential_id");
  c.schema = require_string(v, "schema");
  c.issuer = Did::parse(require_string(v, "issuer"));
  c.subject = Did::parse(require_string(v, "subject"));
  c.claims = v.at("claims");
  if (!c.claims.is_object()) throw InputError("claims must be a map");
  c.valid_from_tick = require_uint(v, "valid_from_tick");
  c.valid_until_tick = require_uint(v, "valid_until_tick");
  const auto& status = v.at("status");
  if (!status.is_null()) {
    require_exact_keys(status, {"registry_id", "index"});
    c.status = StatusRef{require_string(status, "registry_id"), require_uint(status, "index")};
  }
  c.proof = proof_from_value(v.at("proof"));
  return c;
}

std::string credential_id_of(const Credential& c) { return canonical_digest(c.body()).hex(); }

// Presentation -----------------------------------------------------------------------

Value Presentation::body() const {
  Value creds = Value::array();
  for (const auto& c : credentials) creds.push_back(c.to_value());
  return Value{{"holder", holder.str()},
               {"credentials", creds},
               {"challenge_nonce", hex_encode(challenge_nonce)},
               {"audience", audience.str()}};
}

Value Presentation::to_value() const {
  Value v = body();
  v["proof"] = proof_to_value(proof);
  return v;
}

Presentation Presentation::from_value(const Value& v) {
  require_exact_keys(v, {"holder", "credentials", "challenge_nonce", "audience", "proof"});
  Presentation p;
  p.holder = Did::parse(require_string(v, "holder"));
  const auto& creds = v.at("credentials");
  if (!creds.is_array() || creds.empty()) throw InputError("presentation needs at least one credential");
  for (const auto& c : creds) p.credentials.push_back(Credential::from_value(c));
  p.challenge_nonce = nonce_from_hex(require_string(v, "challenge_nonce"));
  p.audience = Did::parse(require_string(v, "audience"));
  p.proof = proof_from_value(v.at("proof"));
  return p;
}

// Wallet ---------------------------------------------------------------------------------

void Wallet::add_key(std::string fragment, crypto::KeyPair keypair, std::vector<Purpose> purposes) {
  keys_[std::move(fragment)] = Entry{std::move(keypair), std::move(purposes)};
}

void Wallet::remove_key(std::string_view fragment) {
  if (auto it = keys_.find(fragment); it != keys_.end()) keys_.erase(it);
}

const Wallet::Entry* Wallet::key(std::string_view fragment) const {
  auto it = keys_.find(fragment);
  return it == keys_.end() ? nullptr : &it->second;
}

std::optional<did::Signer> Wallet::signer_for(Purpose purpose, const DidDocument* doc) const {
  for (const auto& [fragment, entry] : keys_) {
    bool usable = false;
    if (doc != nullptr) {
      const auto* m = doc->find_method(fragment);
      usable = m != nullptr && m->has(purpose) && m->public_key == entry.keypair.public_key;
    } else {
      usable = std::find(entry.purposes.begin(), entry.purposes.end(), purpose) != entry.purposes.end();
    }
    if (usable) return did::Signer{MethodRef{did_, fragment}, entry.keypair.private_key};
  }
  return std::nullopt;
}

// Registry ---------------------------------------------------------------------------------

std::string registry_id_for(const Did& issuer) { return issuer.str() + "/revocation"; }

std::string_view to_string(StatusResult s) {
  switch (s) {
    case StatusResult::Active: return "active";
    case StatusResult::Revoked: return "revoked";
    case StatusResult::UnknownRegistry: return "unknown-registry";
  }
  return "?";
}

std::optional<RevocationRegistryState> registry_state(const NodeView& view, std::string_view registry_id) {
  std::optional<RevocationRegistryState> state;
  for (const auto* tx : view.history(registry_id)) {
    if (tx->kind != TxKind::RevocationUpdate) continue;
    const auto action = tx->payload.at("action").get<std::string>();
    if (action == kCreateAction && !state) {
      state = RevocationRegistryState{std::string(registry_id),
                                      Did::parse(tx->payload.at("issuer").get<std::string>()),
                                      {}};
    } else if (action == kRevokeAction && state) {
      auto idx = tx->payload.at("index").get<std::uint64_t>();
      auto pos = std::lower_bound(state->revoked.begin(), state->revoked.end(), idx);
      if (pos == state->revoked.end() || *pos != idx) state->revoked.insert(pos, idx);
    }
  }
  return state;
}

StatusResult check_status(const NodeView& view, const StatusRef& ref) {
  auto state = registry_state(view, ref.registry_id);
  if (!state) return StatusResult::UnknownRegistry;
  return std::binary_search(state->revoked.begin(), state->revoked.end(), ref.index)
             ? StatusResult::Revoked
             : StatusResult::Active;
}

StatusResult check_status(const ledger::LedgerNetwork& network, const ledger::NodeId& node,
                          const StatusRef& ref) {
  return check_status(network.view(node), ref);
}

void install_validators(ledger::LedgerNetwork& network) {
  network.set_validator(TxKind::RevocationUpdate, validate_revocation);
}

ledger::Receipt revoke(ledger::LedgerNetwork& network, const ledger::NodeId& node,
                       const Wallet& issuer_wallet, const StatusRef& ref) {
  if (ref.registry_id != registry_id_for(issuer_wallet.did())) {
    throw AuthorizationError("registry " + ref.registry_id + " is not owned by " + issuer_wallet.did().str());
  }
  auto doc = active_issuer_doc(network.authoritative(), issuer_wallet.did());
  auto signer = issuer_wallet.signer_for(Purpose::Assertion, &doc);
  if (!signer) throw AuthorizationError("wallet holds no assertion key of the issuer");
  return submit_registry(network, node,
                         registry_payload(kRevokeAction, ref.registry_id, issuer_wallet.did(), ref.index, *signer),
                         *signer);
}

// Issuance ----------------------------------------------------------------------------------

Credential issue(ledger::LedgerNetwork& network, const ledger::NodeId& node, Wallet& issuer_wallet,
                 const IssueRequest& request) {
  if (request.valid_until_tick < request.valid_from_tick) {
    throw InputError("valid_until_tick precedes valid_from_tick");
  }
  if (!request.claims.is_object()) throw InputError("claims must be a map");
  canonicalize(request.claims);
  if (request.schema.empty()) throw InputError("schema label is empty");

  auto doc = active_issuer_doc(network.view(node), issuer_wallet.did());
  auto signer = issuer_wallet.signer_for(Purpose::Assertion, &doc);
  if (!signer) throw AuthorizationError("wallet holds no assertion key of the issuer");

  Credential c;
  c.schema = request.schema;
  c.issuer = issuer_wallet.did();
  c.subject = request.subject;
  c.claims = request.claims;
  c.valid_from_tick = request.valid_from_tick;
  c.valid_until_tick = request.valid_until_tick;
  if (request.with_status) {
    auto registry_id = registry_id_for(c.issuer);
    if (!registry_state(network.authoritative(), registry_id)) {
      submit_registry(network, node, registry_payload(kCreateAction, registry_id, c.issuer, 0, *signer), *signer);
    }
    c.status = StatusRef{registry_id, issuer_wallet.allocate_status_index()};
  }
  c.credential_id = credential_id_of(c);
  c.proof = sign_body(*signer, c.body());
  return c;
}

// Verification ------------------------------------------------------------------------------

std::string_view to_string(Check c) {
  switch (c) {
    case Check::HolderBinding: return "holder_binding";
    case Check::IssuerSignature: return "issuer_signature";
    case Check::IssuerActive: return "issuer_active";
    case Check::SubjectMatch: return "subject_match";
    case Check::TimeWindow: return "time_window";
    case Check::Status: return "status";
  }
  return "?";
}

std::string_view to_string(CheckResult r) {
  switch (r) {
    case CheckResult::Pass: return "pass";
    case CheckResult::Fail: return "fail";
    case CheckResult::Skipped: return "skipped";
  }
  return "?";
}

CheckResult VerificationReport::check(Check c) const {
  auto it = checks.find(c);
  return it == checks.end() ? CheckResult::Skipped : it->second;
}

std::vector<Check> VerificationReport::failed_checks() const {
  std::vector<Check> out;
  for (const auto& [c, r] : checks) {
    if (r == CheckResult::Fail) out.push_back(c);
  }
  return out;
}

Value VerificationReport::to_value() const {
  Value checks_v = Value::object();
  for (const auto& [c, r] : checks) checks_v[std::string(to_string(c))] = std::string(to_string(r));
  Value v{{"outcome", accepted ? "accept" : "reject"},
          {"checks", checks_v},
          {"as_of_tick", as_of_tick},
          {"node", node}};
  if (!credentials.empty()) {
    Value per = Value::array();
    for (const auto& r : credentials) per.push_back(r.to_value());
    v["credentials"] = per;
  }
  return v;
}

namespace {

VerificationReport blank_report(const NodeView& view) {
  VerificationReport r;
  r.as_of_tick = view.as_of_tick();
  r.node = view.node();
  for (auto c : {Check::HolderBinding, Check::IssuerSignature, Check::IssuerActive, Check::SubjectMatch,
                 Check::TimeWindow, Check::Status}) {
    r.checks[c] = CheckResult::Skipped;
  }
  return r;
}

}  // namespace

VerificationReport verify_credential(const NodeView& view, const Credential& credential,
                                     const std::optional<Did>& expected_subject) {
  auto report = blank_report(view);

  auto issuer = did::resolve(view, credential.issuer);
  ++report.ledger_reads;
  bool signature_valid = false;
  if (issuer) {
    const auto body = credential.body();
    const auto* method = proof_method(issuer->document, credential.issuer,
                                      credential.proof.verification_method, Purpose::Assertion);
    signature_valid = credential.credential_id == canonical_digest(body).hex() &&
                      signature_ok(method, body, credential.proof.signature);
  }
  set_check(report, Check::IssuerSignature, signature_valid);
  set_check(report, Check::IssuerActive, issuer && !issuer->deactivated);

  if (expected_subject) set_check(report, Check::SubjectMatch, credential.subject == *expected_subject);

  const auto now = view.as_of_tick();
  set_check(report, Check::TimeWindow,
            credential.valid_from_tick <= now && now <= credential.valid_until_tick);

  if (credential.status) {
    ++report.ledger_reads;
    set_check(report, Check::Status, check_status(view, *credential.status) == StatusResult::Active);
  }
  finalize(report);
  return report;
}

VerificationReport verify_credential(const ledger::LedgerNetwork& network, const ledger::NodeId& node,
                                     const Credential& credential, const std::optional<Did>& expected_subject) {
  return verify_credential(network.view(node), credential, expected_subject);
}

Presentation present(const Wallet& holder_wallet, std::vector<Credential> credentials,
                     const did::Nonce& challenge_nonce, const Did& audience) {
  if (credentials.empty()) throw InputError("presentation needs at least one credential");
  auto signer = holder_wallet.signer_for(Purpose::Authentication);
  if (!signer) throw InputError("holder wallet has no authentication key");
  Presentation p;
  p.holder = holder_wallet.did();
  p.credentials = std::move(credentials);
  p.challenge_nonce = challenge_nonce;
  p.audience = audience;
  p.proof = sign_body(*signer, p.body());
  return p;
}

VerificationReport verify_presentation(const NodeView& view, const Presentation& presentation,
                                       const did::Nonce& expected_nonce, const Did& expected_audience) {
  auto report = blank_report(view);

  bool bound = presentation.challenge_nonce == expected_nonce && presentation.audience == expected_audience &&
               !presentation.credentials.empty();
  if (bound) {
    auto holder = did::resolve(view, presentation.holder);
    ++report.ledger_reads;
    bound = holder && !holder->deactivated &&
            signature_ok(proof_method(holder->document, presentation.holder,
                                      presentation.proof.verification_method, Purpose::Authentication),
                         presentation.body(), presentation.proof.signature);
  }
  set_check(report, Check::HolderBinding, bound);
  if (!bound) {
    finalize(report);
    return report;
  }

  for (const auto& credential : presentation.credentials) {
    auto sub = verify_credential(view, credential, presentation.holder);
    report.ledger_reads += sub.ledger_reads;
    // Aggregate: a check fails if it fails for any credential.
    for (const auto& [c, r] : sub.checks) {
      if (c == Check::HolderBinding) continue;
      auto& agg = report.checks[c];
      if (r == CheckResult::Fail || (r == CheckResult::Pass && agg == CheckResult::Skipped)) agg = r;
    }
    report.credentials.push_back(std::move(sub));
  }
  finalize(report);
  return report;
}

VerificationReport verify_presentation(const ledger::LedgerNetwork& network, const ledger::NodeId& node,
                                       const Presentation& presentation, const did::Nonce& expected_nonce,
                                       const Did& expected_audience) {
  return verify_presentation(network.view(node), presentation, expected_nonce, expected_audience);
}

}  // namespace sim6g::vc
