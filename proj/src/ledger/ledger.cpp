#include "sim6g/ledger.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "sim6g/errors.hpp"

namespace sim6g::ledger {
namespace {

constexpr std::array<std::pair<TxKind, std::string_view>, 4> kKindNames{{
    {TxKind::DidCreate, "DidCreate"},
    {TxKind::DidUpdate, "DidUpdate"},
    {TxKind::DidDeactivate, "DidDeactivate"},
    {TxKind::RevocationUpdate, "RevocationUpdate"},
}};

constexpr std::array<TxKind, 3> kLifecycleKinds{TxKind::DidCreate, TxKind::DidUpdate,
                                                TxKind::DidDeactivate};

}  // namespace

std::string_view to_string(TxKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

TxKind tx_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw InputError("unknown transaction kind '" + std::string(name) + "'");
}

std::string Transaction::subject_key() const {
  const char* field = kind == TxKind::RevocationUpdate ? "registry_id" : "did";
  return require_string(payload, field);
}

Value Transaction::to_value() const {
  return Value{
      {"kind", std::string(to_string(kind))},
      {"payload", payload},
      {"submitter_did", submitter_did},
      {"submitter_signature",
       {{"suite_id", submitter_signature.suite_id}, {"value", submitter_signature.hex()}}},
      {"seq", seq},
      {"commit_tick", commit_tick},
  };
}

Transaction Transaction::from_value(const Value& v) {
  require_exact_keys(v, {"kind", "payload", "submitter_did", "submitter_signature", "seq", "commit_tick"});
  Transaction tx;
  tx.kind = tx_kind_from_string(require_string(v, "kind"));
  tx.payload = require_field(v, "payload");
  if (!tx.payload.is_object()) throw InputError("payload must be an object");
  tx.submitter_did = require_string(v, "submitter_did");
  const auto& sig = require_field(v, "submitter_signature");
  require_exact_keys(sig, {"suite_id", "value"});
  tx.submitter_signature.suite_id = require_string(sig, "suite_id");
  tx.submitter_signature.bytes = hex_decode(require_string(sig, "value"));
  tx.seq = require_uint(v, "seq");
  tx.commit_tick = require_uint(v, "commit_tick");
  return tx;
}

std::span<const Transaction> NodeView::delivered() const {
  if (!state_) return {};
  return std::span<const Transaction>(state_->entries.data(), length_);
}

const Transaction* NodeView::latest(std::string_view subject_key, std::span<const TxKind> kinds) const {
  if (!state_) return nullptr;
  auto it = state_->by_subject.find(std::string(subject_key));
  if (it == state_->by_subject.end()) return nullptr;
  const auto& seqs = it->second;
  // seqs is sorted; skip those beyond the delivered prefix.
  auto end = std::lower_bound(seqs.begin(), seqs.end(), static_cast<std::uint64_t>(length_));
  for (auto rit = std::make_reverse_iterator(end); rit != seqs.rend(); ++rit) {
    const auto& tx = state_->entries[*rit];
    if (std::find(kinds.begin(), kinds.end(), tx.kind) != kinds.end()) return &tx;
  }
  return nullptr;
}

std::vector<const Transaction*> NodeView::history(std::string_view subject_key) const {
  std::vector<const Transaction*> out;
  if (!state_) return out;
  auto it = state_->by_subject.find(std::string(subject_key));
  if (it == state_->by_subject.end()) return out;
  for (auto seq : it->second) {
    if (seq >= length_) break;
    out.push_back(&state_->entries[seq]);
  }
  return out;
}

LedgerNetwork::LedgerNetwork(std::vector<NodeConfig> nodes, std::uint64_t seed)
    : nodes_(std::move(nodes)), seed_(seed), state_(std::make_shared<detail::LogState>()) {
  if (nodes_.empty()) throw InputError("ledger network needs at least one node");
  for (const auto& n : nodes_) {
    if (n.id.empty()) throw InputError("node id must be non-empty");
    if (!delays_.emplace(n.id, n.delay).second) throw InputError("duplicate node id '" + n.id + "'");
  }
}

void LedgerNetwork::set_validator(TxKind kind, Validator validator) {
  validators_[kind] = std::move(validator);
}

detail::LogState& LedgerNetwork::mutable_state() {
  // Copy-on-write: outstanding views keep the old snapshot.
  if (state_.use_count() > 1) state_ = std::make_shared<detail::LogState>(*state_);
  return *state_;
}

void LedgerNetwork::append(Transaction tx) {
  auto& state = mutable_state();
  auto key = tx.subject_key();
  state.by_subject[key].push_back(tx.seq);
  state.entries.push_back(std::move(tx));
}

Receipt LedgerNetwork::submit(const NodeId& node, Transaction tx) {
  if (!has_node(node)) throw InputError("unknown node '" + node + "'");
  if (!tx.payload.is_object()) throw InputError("payload must be an object");
  canonicalize(tx.payload);
  (void)tx.subject_key();

  tx.seq = state_->entries.size();
  tx.commit_tick = clock_;
  if (auto it = validators_.find(tx.kind); it != validators_.end()) {
    it->second(authoritative(), tx);
  }
  Receipt receipt{tx.seq, tx.commit_tick};
  append(std::move(tx));
  return receipt;
}

void LedgerNetwork::tick(Tick n) {
  if (n < 1) throw InputError("tick count must be at least 1");
  clock_ += n;
}

bool LedgerNetwork::has_node(const NodeId& node) const { return delays_.contains(node); }

Tick LedgerNetwork::delay(const NodeId& node) const {
  auto it = delays_.find(node);
  if (it == delays_.end()) throw InputError("unknown node '" + node + "'");
  return it->second;
}

Tick LedgerNetwork::max_delay() const {
  Tick m = 0;
  for (const auto& n : nodes_) m = std::max(m, n.delay);
  return m;
}

std::size_t LedgerNetwork::delivered_length(Tick delay) const {
  if (delay > clock_) {
    // Nothing committed at tick >= 0 can be delivered yet.
    return 0;
  }
  const Tick horizon = clock_ - delay;
  const auto& entries = state_->entries;
  auto it = std::upper_bound(entries.begin(), entries.end(), horizon,
                             [](Tick h, const Transaction& tx) { return h < tx.commit_tick; });
  return static_cast<std::size_t>(it - entries.begin());
}

NodeView LedgerNetwork::view(const NodeId& node) const {
  auto d = delay(node);
  return NodeView(node, clock_, state_, delivered_length(d));
}

NodeView LedgerNetwork::authoritative() const {
  return NodeView("<sequencer>", clock_, state_, state_->entries.size());
}

std::optional<Transaction> LedgerNetwork::query_latest(const NodeId& node, std::string_view did) const {
  auto v = view(node);
  const Transaction* tx = v.latest(did, kLifecycleKinds);
  if (tx == nullptr) return std::nullopt;
  return *tx;
}

std::string LedgerNetwork::export_log() const {
  std::string out;
  for (const auto& tx : state_->entries) {
    out += canonicalize(tx.to_value());
    out.push_back('\n');
  }
  return out;
}

void LedgerNetwork::restore(std::string_view exported_log, Tick clock) {
  state_ = std::make_shared<detail::LogState>();
  clock_ = 0;
  std::size_t start = 0;
  while (start < exported_log.size()) {
    auto end = exported_log.find('\n', start);
    if (end == std::string_view::npos) end = exported_log.size();
    auto line = exported_log.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;

    auto tx = Transaction::from_value(parse_canonical(line));
    if (tx.seq != state_->entries.size()) throw InputError("restored log has a sequence gap");
    if (tx.commit_tick < clock_ || tx.commit_tick > clock) {
      throw InputError("restored log has out-of-order commit ticks");
    }
    clock_ = tx.commit_tick;
    if (auto it = validators_.find(tx.kind); it != validators_.end()) {
      it->second(authoritative(), tx);
    }
    append(std::move(tx));
  }
  clock_ = clock;
}

}  // namespace sim6g::ledger
