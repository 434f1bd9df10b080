#include "sim6g/did.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "sim6g/errors.hpp"

namespace sim6g::did {
namespace {

using ledger::NodeView;
using ledger::Transaction;
using ledger::TxKind;

constexpr std::array<TxKind, 3> kLifecycleKinds{TxKind::DidCreate, TxKind::DidUpdate,
                                                TxKind::DidDeactivate};

Purpose purpose_from_string(std::string_view s) {
  if (s == "authentication") return Purpose::Authentication;
  if (s == "assertion") return Purpose::Assertion;
  throw InputError("unknown verification purpose '" + std::string(s) + "'");
}

crypto::PublicKey public_key_from_hex(std::string_view hex) {
  auto bytes = hex_decode(hex);
  if (bytes.size() != crypto::kPublicKeySize) throw InputError("public key must be 32 bytes");
  crypto::PublicKey pk{};
  std::copy(bytes.begin(), bytes.end(), pk.begin());
  return pk;
}

std::optional<DidDocument> document_of(const Transaction* tx) {
  if (tx == nullptr) return std::nullopt;
  return DidDocument::from_value(require_field(tx->payload, "document"));
}

std::string signing_bytes(const Value& payload) { return canonicalize(payload); }

void check_signed_by(const Transaction& tx, const crypto::PublicKey& pk) {
  if (!crypto::verify(pk, to_bytes(signing_bytes(tx.payload)), tx.submitter_signature)) {
    throw AuthorizationError("transaction signature does not verify");
  }
}

// The signer must be an authentication key of the subject itself or of its
// controller, according to the authoritative log.
void authorize(const NodeView& authoritative, const DidDocument& current, const Transaction& tx) {
  auto ref = MethodRef::parse(require_string(tx.payload, "signer"));
  std::optional<DidDocument> signer_doc;
  if (ref.did == current.id) {
    signer_doc = current;
  } else if (current.controller && ref.did == *current.controller) {
    signer_doc = document_of(authoritative.latest(ref.did.str(), kLifecycleKinds));
    if (!signer_doc) throw AuthorizationError("controller DID is not resolvable");
    if (signer_doc->deactivated) throw AuthorizationError("controller DID is deactivated");
  } else {
    throw AuthorizationError("signer is neither the subject nor its controller");
  }
  if (tx.submitter_did != ref.did.str()) {
    throw AuthorizationError("submitter does not match signer reference");
  }
  const auto* method = signer_doc->find_method(ref.fragment);
  if (method == nullptr || !method->has(Purpose::Authentication)) {
    throw AuthorizationError("signer key is not an authentication method of " + ref.did.str());
  }
  check_signed_by(tx, method->public_key);
}

DidDocument current_or_throw(const NodeView& authoritative, const Did& did) {
  auto doc = document_of(authoritative.latest(did.str(), kLifecycleKinds));
  if (!doc) throw NotFoundError("DID not found: " + did.str());
  if (doc->deactivated) throw LifecycleError("DID is deactivated: " + did.str());
  return *doc;
}

void validate_create(const NodeView& authoritative, const Transaction& tx) {
  require_exact_keys(tx.payload, {"did", "document"});
  auto did = Did::parse(require_string(tx.payload, "did"));
  auto doc = DidDocument::from_value(require_field(tx.payload, "document"));
  doc.validate();
  if (doc.id != did) throw InputError("document id does not match DID");
  if (doc.version != 0 || doc.deactivated || doc.controller || !doc.services.empty() ||
      doc.verification_methods.size() != 1) {
    throw InputError("initial document must be version 0 with exactly one key and nothing else");
  }
  const auto& method = doc.verification_methods.front();
  if (!method.has(Purpose::Authentication) || !method.has(Purpose::Assertion)) {
    throw InputError("initial key must carry both purposes");
  }
  if (Did::from_public_key(method.public_key) != did) {
    throw InputError("DID is not derived from the initial key");
  }
  if (!tx.submitter_did.empty()) throw InputError("DidCreate has no submitter DID");
  check_signed_by(tx, method.public_key);
  if (authoritative.latest(did.str(), kLifecycleKinds) != nullptr) {
    throw ConflictError("DID already exists: " + did.str());
  }
}

void validate_update(const NodeView& authoritative, const Transaction& tx) {
  require_exact_keys(tx.payload, {"did", "document", "signer"});
  auto did = Did::parse(require_string(tx.payload, "did"));
  auto current = current_or_throw(authoritative, did);
  authorize(authoritative, current, tx);
  auto doc = DidDocument::from_value(require_field(tx.payload, "document"));
  doc.validate();
  if (doc.id != did) throw InputError("document id does not match DID");
  if (doc.deactivated) throw InputError("use deactivate to deactivate a DID");
  if (doc.version != current.version + 1) throw InputError("version must increment by exactly one");
}

void validate_deactivate(const NodeView& authoritative, const Transaction& tx) {
  require_exact_keys(tx.payload, {"did", "document", "signer"});
  auto did = Did::parse(require_string(tx.payload, "did"));
  auto current = current_or_throw(authoritative, did);
  authorize(authoritative, current, tx);
  auto expected = current;
  expected.version += 1;
  expected.deactivated = true;
  if (DidDocument::from_value(require_field(tx.payload, "document")) != expected) {
    throw InputError("terminal document must equal the current one, deactivated");
  }
}

ledger::Receipt submit_signed(ledger::LedgerNetwork& network, const ledger::NodeId& node, TxKind kind,
                              Value payload, const std::string& submitter,
                              const crypto::PrivateKey& key) {
  Transaction tx;
  tx.kind = kind;
  tx.submitter_signature = crypto::sign(key, to_bytes(signing_bytes(payload)));
  tx.payload = std::move(payload);
  tx.submitter_did = submitter;
  return network.submit(node, std::move(tx));
}

}  // namespace

// Did ------------------------------------------------------------------------

Did Did::parse(std::string_view text) {
  if (!text.starts_with(kDidPrefix)) throw InputError("not a did:sim6g identifier");
  auto id = text.substr(kDidPrefix.size());
  if (id.empty()) throw InputError("empty method-specific id");
  auto decoded = base58_decode(id);
  if (decoded.size() != kIdBytes) throw InputError("method-specific id must encode 16 bytes");
  if (base58_encode(decoded) != id) throw InputError("non-canonical base-58 id");
  return Did(std::string(text));
}

Did Did::from_public_key(const crypto::PublicKey& key) {
  auto digest = crypto::content_id(key);
  return Did(std::string(kDidPrefix) +
             base58_encode(ByteView(digest.bytes.data(), kIdBytes)));
}

std::string_view Did::method_specific_id() const {
  return std::string_view(text_).substr(std::min(text_.size(), kDidPrefix.size()));
}

MethodRef MethodRef::parse(std::string_view text) {
  auto hash = text.find('#');
  if (hash == std::string_view::npos || hash + 1 == text.size()) {
    throw InputError("method reference needs a '#fragment'");
  }
  return MethodRef{Did::parse(text.substr(0, hash)), std::string(text.substr(hash))};
}

std::string_view to_string(Purpose p) {
  return p == Purpose::Authentication ? "authentication" : "assertion";
}

bool VerificationMethod::has(Purpose p) const {
  return std::find(purposes.begin(), purposes.end(), p) != purposes.end();
}

// DidDocument ------------------------------------------------------------------

const VerificationMethod* DidDocument::find_method(std::string_view fragment) const {
  auto it = std::find_if(verification_methods.begin(), verification_methods.end(),
                         [&](const VerificationMethod& m) { return m.id == fragment; });
  return it == verification_methods.end() ? nullptr : &*it;
}

const ServiceEndpointEntry* DidDocument::find_service(std::string_view sid) const {
  auto it = std::find_if(services.begin(), services.end(),
                         [&](const ServiceEndpointEntry& s) { return s.id == sid; });
  return it == services.end() ? nullptr : &*it;
}

void DidDocument::validate() const {
  if (id.empty()) throw InputError("document id is empty");
  std::set<std::string> ids;
  bool has_auth = false;
  for (const auto& m : verification_methods) {
    if (m.id.size() < 2 || m.id.front() != '#') throw InputError("method id must be a '#fragment'");
    if (!ids.insert(m.id).second) throw InputError("duplicate method id " + m.id);
    if (m.purposes.empty()) throw InputError("method " + m.id + " has no purposes");
    std::set<Purpose> unique(m.purposes.begin(), m.purposes.end());
    if (unique.size() != m.purposes.size()) throw InputError("method " + m.id + " repeats a purpose");
    if (crypto::find_suite(m.suite_id) == nullptr) throw InputError("unregistered suite " + m.suite_id);
    has_auth = has_auth || m.has(Purpose::Authentication);
  }
  std::set<std::string> service_ids;
  for (const auto& s : services) {
    if (s.id.size() < 2 || s.id.front() != '#') throw InputError("service id must be a '#fragment'");
    if (!service_ids.insert(s.id).second) throw InputError("duplicate service id " + s.id);
    if (s.endpoint.empty()) throw InputError("service " + s.id + " has an empty endpoint");
  }
  if (!deactivated && !has_auth) throw InputError("active document needs an authentication method");
}

Value DidDocument::to_value() const {
  Value methods = Value::array();
  for (const auto& m : verification_methods) {
    Value purposes = Value::array();
    for (auto p : m.purposes) purposes.push_back(std::string(to_string(p)));
    methods.push_back({{"id", m.id},
                       {"suite_id", m.suite_id},
                       {"public_key", hex_encode(m.public_key)},
                       {"purposes", purposes}});
  }
  Value svc = Value::array();
  for (const auto& s : services) svc.push_back({{"id", s.id}, {"type", s.type}, {"endpoint", s.endpoint}});
  return Value{{"id", id.str()},
               {"controller", controller ? Value(controller->str()) : Value(nullptr)},
               {"verification_methods", methods},
               {"services", svc},
               {"version", version},
               {"deactivated", deactivated}};
}

DidDocument DidDocument::from_value(const Value& v) {
  require_exact_keys(v, {"id", "controller", "verification_methods", "services", "version", "deactivated"});
  DidDocument doc;
  doc.id = Did::parse(require_string(v, "id"));
  const auto& ctrl = v.at("controller");
  if (ctrl.is_string()) {
    doc.controller = Did::parse(ctrl.get<std::string>());
  } else if (!ctrl.is_null()) {
    throw InputError("controller must be a DID or null");
  }
  const auto& methods = v.at("verification_methods");
  if (!methods.is_array()) throw InputError("verification_methods must be a list");
  for (const auto& m : methods) {
    require_exact_keys(m, {"id", "suite_id", "public_key", "purposes"});
    VerificationMethod vm;
    vm.id = require_string(m, "id");
    vm.suite_id = require_string(m, "suite_id");
    vm.public_key = public_key_from_hex(require_string(m, "public_key"));
    const auto& purposes = m.at("purposes");
    if (!purposes.is_array()) throw InputError("purposes must be a list");
    for (const auto& p : purposes) {
      if (!p.is_string()) throw InputError("purpose must be a string");
      vm.purposes.push_back(purpose_from_string(p.get<std::string>()));
    }
    doc.verification_methods.push_back(std::move(vm));
  }
  const auto& services = v.at("services");
  if (!services.is_array()) throw InputError("services must be a list");
  for (const auto& s : services) {
    require_exact_keys(s, {"id", "type", "endpoint"});
    doc.services.push_back({require_string(s, "id"), require_string(s, "type"), require_string(s, "endpoint")});
  }
  doc.version = require_uint(v, "version");
  doc.deactivated = require_bool(v, "deactivated");
  return doc;
}

// Lifecycle --------------------------------------------------------------------

void install_validators(ledger::LedgerNetwork& network) {
  network.set_validator(TxKind::DidCreate, validate_create);
  network.set_validator(TxKind::DidUpdate, validate_update);
  network.set_validator(TxKind::DidDeactivate, validate_deactivate);
}

CreateResult create_did(ledger::LedgerNetwork& network, const ledger::NodeId& node,
                        const crypto::KeyPair& keypair) {
  auto did = Did::from_public_key(keypair.public_key);
  DidDocument doc;
  doc.id = did;
  doc.verification_methods.push_back(
      {std::string(kInitialKeyFragment), keypair.suite_id, keypair.public_key,
       {Purpose::Authentication, Purpose::Assertion}});
  Value payload{{"did", did.str()}, {"document", doc.to_value()}};
  auto receipt = submit_signed(network, node, TxKind::DidCreate, std::move(payload), "",
                               keypair.private_key);
  return {did, doc, receipt};
}

std::optional<Resolution> resolve(const NodeView& view, const Did& did) {
  auto doc = document_of(view.latest(did.str(), kLifecycleKinds));
  if (!doc) return std::nullopt;
  Resolution r;
  r.version = doc->version;
  r.deactivated = doc->deactivated;
  r.as_of_tick = view.as_of_tick();
  r.document = std::move(*doc);
  return r;
}

std::optional<Resolution> resolve(const ledger::LedgerNetwork& network, const ledger::NodeId& node,
                                  const Did& did) {
  return resolve(network.view(node), did);
}

std::vector<DidDocument> history(const NodeView& view, const Did& did) {
  std::vector<DidDocument> out;
  for (const auto* tx : view.history(did.str())) {
    out.push_back(DidDocument::from_value(require_field(tx->payload, "document")));
  }
  return out;
}

ledger::Receipt update_document(ledger::LedgerNetwork& network, const ledger::NodeId& node,
                                const Did& did, DidDocument new_body, const Signer& signer) {
  auto current = current_or_throw(network.authoritative(), did);
  if (new_body.id != did) throw InputError("document id does not match DID");
  new_body.version = current.version + 1;
  new_body.deactivated = false;
  Value payload{{"did", did.str()}, {"document", new_body.to_value()}, {"signer", signer.method.str()}};
  return submit_signed(network, node, TxKind::DidUpdate, std::move(payload), signer.method.did.str(),
                       signer.key);
}

ledger::Receipt deactivate(ledger::LedgerNetwork& network, const ledger::NodeId& node,
                           const Did& did, const Signer& signer) {
  auto terminal = current_or_throw(network.authoritative(), did);
  terminal.version += 1;
  terminal.deactivated = true;
  Value payload{{"did", did.str()}, {"document", terminal.to_value()}, {"signer", signer.method.str()}};
  return submit_signed(network, node, TxKind::DidDeactivate, std::move(payload),
                       signer.method.did.str(), signer.key);
}

// Ownership proofs -----------------------------------------------------------------

std::string_view to_string(OwnershipVerdict v) {
  switch (v) {
    case OwnershipVerdict::Accept: return "accept";
    case OwnershipVerdict::Expired: return "expired";
    case OwnershipVerdict::Replayed: return "replayed";
    case OwnershipVerdict::Deactivated: return "deactivated";
    case OwnershipVerdict::NoMatchingKey: return "no-matching-key";
    case OwnershipVerdict::BadSignature: return "bad-signature";
    case OwnershipVerdict::UnknownDid: return "unknown-did";
  }
  return "?";
}

std::string ownership_signing_input(const OwnershipChallenge& challenge) {
  return canonicalize(Value{{"nonce", hex_encode(challenge.nonce)},
                            {"audience", challenge.audience.str()},
                            {"subject_did", challenge.subject.str()}});
}

OwnershipResponse respond_to_challenge(const crypto::KeyPair& subject_keypair,
                                       std::string_view method_fragment,
                                       const OwnershipChallenge& challenge) {
  return {challenge.subject.str() + std::string(method_fragment),
          crypto::sign(subject_keypair.private_key, to_bytes(ownership_signing_input(challenge)))};
}

Nonce nonce_from_seed(std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  Nonce nonce{};
  for (std::size_t i = 0; i < kNonceSize; i += 8) {
    auto word = rng();
    for (std::size_t b = 0; b < 8; ++b) nonce[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
  }
  return nonce;
}

OwnershipChallenge ChallengeBook::make_challenge(const Did& subject, ledger::Tick current_tick,
                                                 ledger::Tick validity_ticks, std::uint64_t rng_seed) {
  if (validity_ticks < 1) throw InputError("validity_ticks must be at least 1");
  OwnershipChallenge c{nonce_from_seed(rng_seed), challenger_, subject, current_tick, validity_ticks};
  outstanding_[{challenger_.str(), subject.str(), c.nonce}] = {current_tick, validity_ticks};
  return c;
}

OwnershipVerdict ChallengeBook::verify_ownership(const ledger::LedgerNetwork& network,
                                                 const ledger::NodeId& node, const Did& subject,
                                                 const OwnershipChallenge& challenge,
                                                 const OwnershipResponse& response) {
  auto key = std::make_tuple(challenge.audience.str(), subject.str(), challenge.nonce);
  auto it = outstanding_.find(key);
  if (it == outstanding_.end() || challenge.subject != subject || challenge.audience != challenger_ ||
      it->second != std::make_pair(challenge.issued_tick, challenge.validity_ticks)) {
    return OwnershipVerdict::Replayed;
  }
  outstanding_.erase(it);
  if (network.clock() >= challenge.issued_tick + challenge.validity_ticks) {
    return OwnershipVerdict::Expired;
  }

  auto resolved = resolve(network, node, subject);
  if (!resolved) return OwnershipVerdict::UnknownDid;
  if (resolved->deactivated) return OwnershipVerdict::Deactivated;

  std::optional<MethodRef> ref;
  try {
    ref = MethodRef::parse(response.method_ref);
  } catch (const InputError&) {
    return OwnershipVerdict::NoMatchingKey;
  }
  if (ref->did != subject) return OwnershipVerdict::NoMatchingKey;
  const auto* method = resolved->document.find_method(ref->fragment);
  if (method == nullptr || !method->has(Purpose::Authentication)) return OwnershipVerdict::NoMatchingKey;

  if (!crypto::verify(method->public_key, to_bytes(ownership_signing_input(challenge)),
                      response.signature)) {
    return OwnershipVerdict::BadSignature;
  }
  return OwnershipVerdict::Accept;
}

}  // namespace sim6g::did
