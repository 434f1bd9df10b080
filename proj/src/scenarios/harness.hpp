#pragma once

#include <cstdint>
#include <deque>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sim6g/did.hpp"
#include "sim6g/ledger.hpp"
#include "sim6g/scenarios.hpp"
#include "sim6g/vc.hpp"

namespace sim6g::scenario::detail {

struct Actor {
  ActorSpec spec;
  crypto::KeyPair key;
  vc::Wallet wallet;

  const std::string& id() const { return spec.actor_id; }
  const did::Did& did() const { return wallet.did(); }
  const ledger::NodeId& node() const { return spec.node; }
};

/// Typed access to a scenario's params map. Unknown keys are config errors.
class Params {
 public:
  Params(const Value& params, std::initializer_list<std::string_view> allowed);

  std::uint64_t uint(std::string_view key, std::uint64_t fallback) const;
  std::optional<std::uint64_t> optional_uint(std::string_view key) const;
  bool flag(std::string_view key, bool fallback) const;
  std::string string(std::string_view key, std::string_view fallback) const;
  const Value* raw(std::string_view key) const;

 private:
  const Value& params_;
};

/// Shared machinery for every flow: actors pinned to nodes, the message log,
/// tick budget, setup/measured phase split and report assembly.
class Harness {
 public:
  Harness(const ScenarioConfig& config, std::string_view scenario_name, bool with_ledger = true);

  ledger::LedgerNetwork& net() { return net_; }
  const ScenarioConfig& config() const { return config_; }

  Actor& one(Role role);
  std::vector<Actor*> all(Role role);
  bool has(Role role) const;

  /// The first actor of `role` plus count-1 deterministic clones on the same
  /// node.
  std::vector<Actor*> expand(Role role, std::uint64_t count);

  void create_dids();
  void create_did(Actor& actor);

  /// Advances by the maximum node delay so that every node has every entry.
  void sync();
  /// Throws ConfigError when the tick budget would be exceeded.
  void advance(ledger::Tick n = 1);
  bool can_advance(ledger::Tick n = 1) const;
  ledger::Tick now() const { return net_.clock(); }

  void setup_message() { ++setup_messages_; }
  void send(const Actor& from, const Actor& to, LinkClass link, std::string payload_kind);
  void ledger_reads(const Actor& reader, std::size_t count, std::string_view payload_kind);

  void begin_access();
  void end_access();
  bool in_access() const { return measuring_; }

  std::string plant_sentinel();
  std::uint64_t next_rng();

  did::DidDocument resolve_at(const Actor& reader, const did::Did& subject);

  void add_report(const Actor& verifier, const Actor& subject, std::string_view kind, Value report);
  Value& metrics() { return metrics_; }

  ScenarioRun finish(Outcome outcome, std::string failure_reason = {});

 private:
  ScenarioConfig config_;
  std::string name_;
  ledger::LedgerNetwork net_;
  std::deque<Actor> actors_;
  std::vector<ScenarioMessage> messages_;
  std::vector<Value> reports_;
  std::vector<std::string> sentinels_;
  Value metrics_ = Value::object();
  std::uint64_t setup_messages_ = 0;
  std::uint64_t rng_counter_ = 0;
  bool measuring_ = false;
  std::size_t size_before_ = 0;
  std::size_t size_after_ = 0;
};

/// One presentation-based access attempt at the verifier's edge.
struct Attempt {
  ledger::Tick tick = 0;
  bool accepted = false;
  std::vector<vc::Check> failed;
  std::string reason;
};

/// `verifier` challenges `holder`, the holder presents `credential`, the
/// verifier decides from its own ledger node only.
Attempt edge_access(Harness& h, Actor& verifier, Actor& holder, const vc::Credential& credential,
                    LinkClass link, std::string_view kind);

/// Attempts before `boundary` must be accepted; at or after it they must be
/// denied with exactly `expected_failure` failing. Returns an empty string
/// when the sequence obeys the law, otherwise the violation.
std::string check_denial_law(const std::vector<Attempt>& attempts, ledger::Tick boundary,
                             const std::vector<vc::Check>& expected_failure);

std::string describe(const std::vector<vc::Check>& failed);

}  // namespace sim6g::scenario::detail
