#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sim6g/canonical.hpp"
#include "sim6g/crypto.hpp"

namespace sim6g::ledger {

using NodeId = std::string;
using Tick = std::uint64_t;

enum class TxKind { DidCreate, DidUpdate, DidDeactivate, RevocationUpdate };

std::string_view to_string(TxKind kind);
TxKind tx_kind_from_string(std::string_view name);

/// One committed entry of the global log. `seq` and `commit_tick` are
/// assigned by the sequencer; everything else comes from the submitter.
struct Transaction {
  TxKind kind = TxKind::DidCreate;
  Value payload = Value::object();
  std::string submitter_did;
  crypto::Signature submitter_signature;
  std::uint64_t seq = 0;
  Tick commit_tick = 0;

  /// Index key: the DID for lifecycle kinds, the registry id for revocations.
  std::string subject_key() const;

  Value to_value() const;
  static Transaction from_value(const Value& v);
};

struct Receipt {
  std::uint64_t seq = 0;
  Tick commit_tick = 0;

  friend bool operator==(const Receipt&, const Receipt&) = default;
};

struct NodeConfig {
  NodeId id;
  Tick delay = 0;
};

namespace detail {
struct LogState {
  std::vector<Transaction> entries;
  std::unordered_map<std::string, std::vector<std::uint64_t>> by_subject;
};
}  // namespace detail

/// Immutable snapshot of a node's delivered prefix. Cheap to copy; safe to
/// share between readers.
class NodeView {
 public:
  NodeView() = default;
  NodeView(NodeId node, Tick as_of, std::shared_ptr<const detail::LogState> state, std::size_t length)
      : node_(std::move(node)), as_of_tick_(as_of), state_(std::move(state)), length_(length) {}

  const NodeId& node() const { return node_; }
  Tick as_of_tick() const { return as_of_tick_; }
  std::size_t size() const { return length_; }
  bool empty() const { return length_ == 0; }

  std::span<const Transaction> delivered() const;

  /// Highest-seq delivered transaction whose subject_key matches and whose
  /// kind is in `kinds`.
  const Transaction* latest(std::string_view subject_key, std::span<const TxKind> kinds) const;

  /// All delivered transactions for a subject key, in seq order.
  std::vector<const Transaction*> history(std::string_view subject_key) const;

 private:
  NodeId node_;
  Tick as_of_tick_ = 0;
  std::shared_ptr<const detail::LogState> state_;
  std::size_t length_ = 0;
};

/// Admission rule for one transaction kind. Receives the sequencer's
/// authoritative view (the entire committed log) and throws to reject.
using Validator = std::function<void(const NodeView& authoritative, const Transaction& tx)>;

/// Deterministic simulated ledger: a single sequencer appends to a global
/// log, and node n sees every entry with commit_tick + delay(n) <= clock.
/// Mutated by one owner; views are snapshots.
class LedgerNetwork {
 public:
  LedgerNetwork(std::vector<NodeConfig> nodes, std::uint64_t seed = 0);

  void set_validator(TxKind kind, Validator validator);

  /// Validates and appends. `tx.seq` and `tx.commit_tick` are overwritten.
  Receipt submit(const NodeId& node, Transaction tx);

  /// Advances the clock; n must be at least 1.
  void tick(Tick n = 1);

  NodeView view(const NodeId& node) const;
  NodeView authoritative() const;

  /// Latest DidCreate/DidUpdate/DidDeactivate for `did` in the node's view.
  std::optional<Transaction> query_latest(const NodeId& node, std::string_view did) const;

  Tick clock() const { return clock_; }
  std::uint64_t seed() const { return seed_; }
  Tick delay(const NodeId& node) const;
  Tick max_delay() const;
  const std::vector<NodeConfig>& nodes() const { return nodes_; }
  bool has_node(const NodeId& node) const;
  std::size_t log_size() const { return state_->entries.size(); }

  /// One canonical transaction per line, newline-terminated.
  std::string export_log() const;

  /// Rebuilds state from an exported log. Every entry is re-validated in
  /// order; seq must be contiguous and commit ticks non-decreasing and not
  /// beyond `clock`.
  void restore(std::string_view exported_log, Tick clock);

 private:
  detail::LogState& mutable_state();
  std::size_t delivered_length(Tick delay) const;
  void append(Transaction tx);

  std::vector<NodeConfig> nodes_;
  std::map<NodeId, Tick, std::less<>> delays_;
  std::uint64_t seed_;
  Tick clock_ = 0;
  std::shared_ptr<detail::LogState> state_;
  std::map<TxKind, Validator> validators_;
};

}  // namespace sim6g::ledger
