#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sim6g/canonical.hpp"
#include "sim6g/crypto.hpp"
#include "sim6g/did.hpp"
#include "sim6g/ledger.hpp"
#include "sim6g/vc.hpp"

namespace sim6g::interconnect {

using did::Did;

/// One intermediary alteration. The signature covers
/// `state digest before this patch || canonical(core())`, so patches cannot
/// be reordered, dropped from the middle, or moved between messages.
struct Patch {
  std::string element_name;
  Value new_value;
  Did patcher;
  std::string patcher_method;
  vc::Credential alteration_vc;
  crypto::Signature patch_signature;

  Value core() const;
  Value to_value() const;
  static Patch from_value(const Value& v);
};

/// Signaling message whose elements are signed by the originating operator
/// and may be altered only by intermediaries holding an AlterationPermission
/// credential issued by that operator.
struct SignedInterconnectMessage {
  Did origin;
  Value elements = Value::object();
  std::string origin_method;
  crypto::Signature origin_signature;
  std::vector<Patch> patches;

  Value origin_body() const;

  /// Digest of the state after the first `applied` patches.
  crypto::Digest state_digest(std::size_t applied) const;

  /// Elements with every patch applied in order.
  Value current_elements() const;

  Value to_value() const;
  static SignedInterconnectMessage from_value(const Value& v);
  std::string serialize() const { return canonicalize(to_value()); }
  static SignedInterconnectMessage parse(std::string_view text) { return from_value(parse_canonical(text)); }
};

/// Bytes signed by a patcher for the patch at position `index`.
Bytes patch_signing_input(const SignedInterconnectMessage& message, std::size_t index, const Patch& patch);

/// Signs `elements` with the wallet's assertion key as listed in `origin_doc`.
SignedInterconnectMessage originate(const vc::Wallet& origin_wallet, const did::DidDocument& origin_doc,
                                    Value elements);

/// Appends a signed patch. The caller supplies the patcher's alteration VC.
void apply_patch(SignedInterconnectMessage& message, const vc::Wallet& patcher_wallet,
                 const did::DidDocument& patcher_doc, std::string element_name, Value new_value,
                 vc::Credential alteration_vc);

struct InterconnectVerdict {
  bool accepted = false;
  /// Index of the first offending patch; empty when the origin signature
  /// itself fails or the message is accepted.
  std::optional<std::size_t> offending_patch;
  std::string reason;
  std::vector<vc::VerificationReport> credential_reports;
  std::size_t ledger_reads = 0;

  Value to_value() const;
};

/// Receiver-side validation against the receiver's own ledger view.
InterconnectVerdict verify_message(const ledger::NodeView& view, const SignedInterconnectMessage& message);

}  // namespace sim6g::interconnect
