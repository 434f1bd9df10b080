#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sim6g/canonical.hpp"
#include "sim6g/ledger.hpp"

namespace sim6g::scenario {

enum class Role {
  HomeMNO,
  VisitedMNO,
  Subscriber,
  IoTDevice,
  NF_Consumer,
  NF_Producer,
  NRF,
  IPX,
  OTTService,
  Government,
};

std::string_view to_string(Role r);
Role role_from_string(std::string_view s);

enum class LinkClass { TerminalVisited, VisitedHome, IntraCore, LedgerLocalRead, OttLink };

std::string_view to_string(LinkClass c);

struct ActorSpec {
  std::string actor_id;
  Role role = Role::Subscriber;
  ledger::NodeId node;
  std::string key_seed_hex;  // 32 bytes, lowercase hex
};

/// Everything a scenario run depends on. No ambient randomness or clock.
struct ScenarioConfig {
  std::vector<ledger::NodeConfig> nodes;
  std::vector<ActorSpec> actors;
  std::string scenario;
  Value params = Value::object();
  std::uint64_t seed = 0;
  ledger::Tick max_ticks = 1000;
  /// "success" or "expected_denial"; empty means either is acceptable.
  std::string expect;
};

/// Names accepted by run_scenario.
const std::vector<std::string_view>& scenario_names();

/// Throws ConfigError naming the offending actor/node/parameter.
void validate(const ScenarioConfig& config);

/// Ready-to-run configuration for each scenario: three operator nodes with
/// distinct delays and the actors the flow needs.
ScenarioConfig default_config(std::string_view scenario_name);

struct ScenarioMessage {
  std::string from;
  std::string to;
  LinkClass link_class = LinkClass::TerminalVisited;
  std::string payload_kind;
  ledger::Tick tick = 0;

  Value to_value() const;
};

enum class Outcome { Success, ExpectedDenial, Failure };

std::string_view to_string(Outcome o);

struct ScenarioReport {
  std::string scenario_name;
  Outcome outcome = Outcome::Failure;
  std::string failure_reason;
  std::map<LinkClass, std::uint64_t> message_counts;
  ledger::Tick ticks_elapsed = 0;
  std::vector<Value> verification_reports;
  std::uint64_t seed = 0;
  /// Scenario-specific measurements (denial ticks, reduction figures, ...).
  Value metrics = Value::object();

  std::uint64_t count(LinkClass c) const;
  Value to_value() const;
  /// Canonical single-line form, newline-terminated.
  std::string to_structured() const;
  std::string to_table() const;
};

struct ScenarioRun {
  ScenarioReport report;
  std::string ledger_log;
  /// Measured-phase messages; setup traffic is only counted in metrics.
  std::vector<ScenarioMessage> messages;
  /// Unique tokens planted in credential claims, for privacy scans.
  std::vector<std::string> planted_sentinels;
  /// Ledger size when the measured phase began and ended.
  std::size_t ledger_size_before_access = 0;
  std::size_t ledger_size_after_access = 0;

  std::string message_log() const;
};

ScenarioRun run_roaming_access(const ScenarioConfig& config);
ScenarioRun run_baseline_centralized(const ScenarioConfig& config);
ScenarioRun run_nf_authorization(const ScenarioConfig& config);
ScenarioRun run_ipx_alteration(const ScenarioConfig& config);
ScenarioRun run_key_rotation_roaming(const ScenarioConfig& config);
ScenarioRun run_location_attestation(const ScenarioConfig& config);

/// Dispatches on config.scenario; unknown names raise ConfigError.
ScenarioRun run_scenario(const ScenarioConfig& config);

}  // namespace sim6g::scenario
