#include "sim6g/interconnect.hpp"

#include <algorithm>

#include "sim6g/errors.hpp"

namespace sim6g::interconnect {
namespace {

Value signature_value(const crypto::Signature& s) {
  return Value{{"suite_id", s.suite_id}, {"value", s.hex()}};
}

crypto::Signature signature_from(const Value& v) {
  require_exact_keys(v, {"suite_id", "value"});
  return crypto::Signature{hex_decode(require_string(v, "value")), require_string(v, "suite_id")};
}

void append(Bytes& out, std::string_view s) { out.insert(out.end(), s.begin(), s.end()); }
void append(Bytes& out, ByteView b) { out.insert(out.end(), b.begin(), b.end()); }

const did::VerificationMethod* assertion_key(const did::DidDocument& doc, const Did& owner,
                                             std::string_view ref_text) {
  try {
    auto ref = did::MethodRef::parse(ref_text);
    if (ref.did != owner) return nullptr;
    const auto* m = doc.find_method(ref.fragment);
    return (m != nullptr && m->has(did::Purpose::Assertion)) ? m : nullptr;
  } catch (const InputError&) {
    return nullptr;
  }
}

InterconnectVerdict deny(InterconnectVerdict v, std::optional<std::size_t> index, std::string reason) {
  v.accepted = false;
  v.offending_patch = index;
  v.reason = std::move(reason);
  return v;
}

}  // namespace

Value Patch::core() const {
  return Value{{"element_name", element_name},
               {"new_value", new_value},
               {"patcher", patcher.str()},
               {"patcher_method", patcher_method},
               {"alteration_vc_id", alteration_vc.credential_id}};
}

Value Patch::to_value() const {
  Value v = core();
  v["alteration_vc"] = alteration_vc.to_value();
  v["patch_signature"] = signature_value(patch_signature);
  return v;
}

Patch Patch::from_value(const Value& v) {
  require_exact_keys(v, {"element_name", "new_value", "patcher", "patcher_method", "alteration_vc_id",
                         "alteration_vc", "patch_signature"});
  Patch p;
  p.element_name = require_string(v, "element_name");
  p.new_value = v.at("new_value");
  p.patcher = Did::parse(require_string(v, "patcher"));
  p.patcher_method = require_string(v, "patcher_method");
  p.alteration_vc = vc::Credential::from_value(v.at("alteration_vc"));
  if (require_string(v, "alteration_vc_id") != p.alteration_vc.credential_id) {
    throw InputError("alteration_vc_id does not match the embedded credential");
  }
  p.patch_signature = signature_from(v.at("patch_signature"));
  return p;
}

Value SignedInterconnectMessage::origin_body() const {
  return Value{{"origin", origin.str()}, {"elements", elements}};
}

crypto::Digest SignedInterconnectMessage::state_digest(std::size_t applied) const {
  Bytes buf;
  append(buf, canonicalize(origin_body()));
  append(buf, origin_method);
  append(buf, origin_signature.bytes);
  auto digest = crypto::content_id(buf);
  for (std::size_t i = 0; i < applied && i < patches.size(); ++i) {
    Bytes next(digest.bytes.begin(), digest.bytes.end());
    append(next, canonicalize(patches[i].core()));
    append(next, patches[i].patch_signature.bytes);
    digest = crypto::content_id(next);
  }
  return digest;
}

Value SignedInterconnectMessage::current_elements() const {
  Value out = elements;
  for (const auto& p : patches) out[p.element_name] = p.new_value;
  return out;
}

Value SignedInterconnectMessage::to_value() const {
  Value ps = Value::array();
  for (const auto& p : patches) ps.push_back(p.to_value());
  return Value{{"origin", origin.str()},
               {"elements", elements},
               {"origin_method", origin_method},
               {"origin_signature", signature_value(origin_signature)},
               {"patches", ps}};
}

SignedInterconnectMessage SignedInterconnectMessage::from_value(const Value& v) {
  require_exact_keys(v, {"origin", "elements", "origin_method", "origin_signature", "patches"});
  SignedInterconnectMessage m;
  m.origin = Did::parse(require_string(v, "origin"));
  m.elements = v.at("elements");
  if (!m.elements.is_object()) throw InputError("elements must be a map");
  m.origin_method = require_string(v, "origin_method");
  m.origin_signature = signature_from(v.at("origin_signature"));
  const auto& ps = v.at("patches");
  if (!ps.is_array()) throw InputError("patches must be a list");
  for (const auto& p : ps) m.patches.push_back(Patch::from_value(p));
  return m;
}

Bytes patch_signing_input(const SignedInterconnectMessage& message, std::size_t index, const Patch& patch) {
  auto prev = message.state_digest(index);
  Bytes out(prev.bytes.begin(), prev.bytes.end());
  append(out, canonicalize(patch.core()));
  return out;
}

SignedInterconnectMessage originate(const vc::Wallet& origin_wallet, const did::DidDocument& origin_doc,
                                    Value elements) {
  if (!elements.is_object()) throw InputError("elements must be a map");
  auto signer = origin_wallet.signer_for(did::Purpose::Assertion, &origin_doc);
  if (!signer) throw AuthorizationError("origin wallet holds no assertion key");
  SignedInterconnectMessage m;
  m.origin = origin_wallet.did();
  m.elements = std::move(elements);
  m.origin_method = signer->method.str();
  m.origin_signature = crypto::sign(signer->key, to_bytes(canonicalize(m.origin_body())));
  return m;
}

void apply_patch(SignedInterconnectMessage& message, const vc::Wallet& patcher_wallet,
                 const did::DidDocument& patcher_doc, std::string element_name, Value new_value,
                 vc::Credential alteration_vc) {
  auto signer = patcher_wallet.signer_for(did::Purpose::Assertion, &patcher_doc);
  if (!signer) throw AuthorizationError("patcher wallet holds no assertion key");
  Patch p;
  p.element_name = std::move(element_name);
  p.new_value = std::move(new_value);
  p.patcher = patcher_wallet.did();
  p.patcher_method = signer->method.str();
  p.alteration_vc = std::move(alteration_vc);
  p.patch_signature = crypto::sign(signer->key, patch_signing_input(message, message.patches.size(), p));
  message.patches.push_back(std::move(p));
}

Value InterconnectVerdict::to_value() const {
  Value reports = Value::array();
  for (const auto& r : credential_reports) reports.push_back(r.to_value());
  return Value{{"outcome", accepted ? "accept" : "reject"},
               {"offending_patch", offending_patch ? Value(*offending_patch) : Value(nullptr)},
               {"reason", reason},
               {"credentials", reports}};
}

InterconnectVerdict verify_message(const ledger::NodeView& view, const SignedInterconnectMessage& message) {
  InterconnectVerdict verdict;

  auto origin = did::resolve(view, message.origin);
  ++verdict.ledger_reads;
  if (!origin || origin->deactivated) return deny(std::move(verdict), std::nullopt, "origin-inactive");
  const auto* origin_key = assertion_key(origin->document, message.origin, message.origin_method);
  if (origin_key == nullptr ||
      !crypto::verify(origin_key->public_key, to_bytes(canonicalize(message.origin_body())),
                      message.origin_signature)) {
    return deny(std::move(verdict), std::nullopt, "origin-signature");
  }

  Value state = message.elements;
  for (std::size_t i = 0; i < message.patches.size(); ++i) {
    const auto& p = message.patches[i];
    if (!state.contains(p.element_name)) return deny(std::move(verdict), i, "unknown-element");

    auto patcher = did::resolve(view, p.patcher);
    ++verdict.ledger_reads;
    if (!patcher || patcher->deactivated) return deny(std::move(verdict), i, "patcher-inactive");
    const auto* key = assertion_key(patcher->document, p.patcher, p.patcher_method);
    if (key == nullptr ||
        !crypto::verify(key->public_key, patch_signing_input(message, i, p), p.patch_signature)) {
      return deny(std::move(verdict), i, "patch-signature");
    }

    const auto& cred = p.alteration_vc;
    auto report = vc::verify_credential(view, cred, p.patcher);
    verdict.ledger_reads += report.ledger_reads;
    const bool cred_ok = report.accepted;
    verdict.credential_reports.push_back(std::move(report));
    if (!cred_ok) return deny(std::move(verdict), i, "alteration-vc-invalid");
    if (cred.schema != vc::schema::kAlterationPermission || cred.issuer != message.origin) {
      return deny(std::move(verdict), i, "alteration-vc-mismatch");
    }
    const auto permitted = cred.claims.find("permitted_elements");
    const bool allowed = permitted != cred.claims.end() && permitted->is_array() &&
                         std::find(permitted->begin(), permitted->end(), Value(p.element_name)) !=
                             permitted->end();
    if (!allowed) return deny(std::move(verdict), i, "element-not-permitted");
    state[p.element_name] = p.new_value;
  }
  verdict.accepted = true;
  return verdict;
}

}  // namespace sim6g::interconnect
