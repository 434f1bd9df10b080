#include <gtest/gtest.h>

#include "sim6g/errors.hpp"
#include "sim6g/scenarios.hpp"

using namespace sim6g;
using namespace sim6g::scenario;

namespace {

ScenarioConfig with(std::string_view name, Value params) {
  auto c = default_config(name);
  c.params = std::move(params);
  return c;
}

}  // namespace

TEST(Scenarios, EveryDefaultConfigSucceeds) {
  for (auto name : scenario_names()) {
    auto run = run_scenario(default_config(name));
    EXPECT_EQ(run.report.outcome, Outcome::Success) << name << ": " << run.report.failure_reason;
    EXPECT_EQ(run.report.scenario_name, name);
  }
}

TEST(Scenarios, RoamingAccessStaysAtTheEdge) {
  auto run = run_roaming_access(with("roaming_access", {{"subscribers", 5}}));
  EXPECT_EQ(run.report.count(LinkClass::VisitedHome), 0u);
  EXPECT_EQ(run.report.count(LinkClass::TerminalVisited), 15u);
  EXPECT_EQ(run.report.metrics["visited_home_reduction_percent"], 100);
  EXPECT_EQ(run.ledger_size_before_access, run.ledger_size_after_access);
  auto base = run_baseline_centralized(with("baseline_centralized", {{"subscribers", 5}}));
  EXPECT_EQ(base.report.count(LinkClass::VisitedHome), 10u);
}

TEST(Scenarios, RoamingRevocationDeniesAfterDelivery) {
  auto run = run_roaming_access(with("roaming_access", {{"revoke_at_tick", 8}}));
  EXPECT_EQ(run.report.outcome, Outcome::ExpectedDenial) << run.report.failure_reason;
  EXPECT_EQ(run.report.metrics["revocation_commit_tick"], 8);
  EXPECT_EQ(run.report.metrics["first_denial_tick"], 10);  // visited delay 2
  auto before = run_roaming_access(with("roaming_access", {{"revoke_before_access", true}}));
  EXPECT_EQ(before.report.outcome, Outcome::ExpectedDenial);
}

TEST(Scenarios, KeyRotationBranches) {
  auto keep = run_key_rotation_roaming(with("key_rotation_roaming", {{"keep_old_assertion_key", true}}));
  EXPECT_EQ(keep.report.outcome, Outcome::Success) << keep.report.failure_reason;
  auto drop = run_key_rotation_roaming(with("key_rotation_roaming", {{"keep_old_assertion_key", false}}));
  EXPECT_EQ(drop.report.outcome, Outcome::ExpectedDenial) << drop.report.failure_reason;
  auto commit = drop.report.metrics["rotation_commit_tick"].get<std::uint64_t>();
  EXPECT_EQ(drop.report.metrics["first_denial_tick"], commit + 2);
  EXPECT_EQ(drop.report.metrics["visited_resolved_endpoint"], "sim://mno-h/gate2");
  for (const auto& entry : drop.report.metrics["old_key_ownership"]) EXPECT_NE(entry["verdict"], "accept");
}

TEST(Scenarios, NfVariants) {
  EXPECT_EQ(run_nf_authorization(default_config("nf_authorization")).report.outcome, Outcome::Success);
  for (auto v : {"wrong_producer", "expired", "revoked"}) {
    auto run = run_nf_authorization(with("nf_authorization", {{"variant", v}}));
    EXPECT_EQ(run.report.outcome, Outcome::ExpectedDenial) << v << ": " << run.report.failure_reason;
    EXPECT_EQ(run.report.count(LinkClass::VisitedHome), 0u);
  }
  EXPECT_THROW(run_nf_authorization(with("nf_authorization", {{"variant", "nope"}})), ConfigError);
}

TEST(Scenarios, IpxVariants) {
  auto denied = run_ipx_alteration(with("ipx_alteration", {{"permissions", {{"ipx-2", {"charging_info"}}}}}));
  EXPECT_EQ(denied.report.outcome, Outcome::ExpectedDenial) << denied.report.failure_reason;
  auto revoked = run_ipx_alteration(with("ipx_alteration", {{"revoke_ipx", "ipx-1"}}));
  EXPECT_EQ(revoked.report.outcome, Outcome::ExpectedDenial) << revoked.report.failure_reason;
  EXPECT_THROW(run_ipx_alteration(with("ipx_alteration", {{"revoke_ipx", "ipx-9"}})), ConfigError);
}

TEST(Scenarios, LocationVariants) {
  auto stale = run_location_attestation(with("location_attestation", {{"variant", "stale"}}));
  EXPECT_EQ(stale.report.outcome, Outcome::ExpectedDenial) << stale.report.failure_reason;
  auto kyc = run_location_attestation(with("location_attestation", {{"variant", "onboarding"}}));
  EXPECT_EQ(kyc.report.outcome, Outcome::Success) << kyc.report.failure_reason;
}

TEST(Scenarios, ValidationNamesTheProblem) {
  auto c = default_config("roaming_access");
  c.actors[2].node = "node-mars";
  try {
    validate(c);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("subscriber"), std::string::npos) << e.what();
  }
  c = default_config("roaming_access");
  c.actors[1].key_seed_hex = c.actors[0].key_seed_hex;
  EXPECT_THROW(validate(c), ConfigError);
  c = default_config("roaming_access");
  c.actors[0].key_seed_hex = "ABCD";
  EXPECT_THROW(validate(c), ConfigError);
  c = default_config("roaming_access");
  c.scenario = "teleport";
  EXPECT_THROW(validate(c), ConfigError);
  EXPECT_THROW(run_scenario(c), ConfigError);
  EXPECT_THROW(run_roaming_access(with("roaming_access", {{"bogus", 1}})), ConfigError);
  EXPECT_THROW(role_from_string("Pirate"), ConfigError);
}

TEST(Scenarios, TickBudgetEnforced) {
  auto c = with("roaming_access", {{"revoke_at_tick", 8}});
  c.max_ticks = 3;
  EXPECT_THROW(run_roaming_access(c), ConfigError);
}

TEST(Scenarios, DeterministicAndSeedSensitive) {
  for (auto name : scenario_names()) {
    auto a = run_scenario(default_config(name));
    auto b = run_scenario(default_config(name));
    EXPECT_EQ(a.report.to_structured(), b.report.to_structured()) << name;
    EXPECT_EQ(a.ledger_log, b.ledger_log) << name;
    EXPECT_EQ(a.message_log(), b.message_log()) << name;
  }
  auto c = default_config("roaming_access");
  auto a = run_scenario(c);
  c.seed = 8;
  EXPECT_NE(run_scenario(c).report.to_structured(), a.report.to_structured());
}

TEST(Scenarios, ReportFormats) {
  auto run = run_scenario(default_config("nf_authorization"));
  auto s = run.report.to_structured();
  EXPECT_EQ(s.back(), '\n');
  EXPECT_NO_THROW(parse_canonical(s.substr(0, s.size() - 1)));
  auto t = run.report.to_table();
  EXPECT_NE(t.find("intra_core"), std::string::npos);
  EXPECT_NE(t.find("outcome"), std::string::npos);
}

TEST(Scenarios, SentinelsStayOffLedger) {
  for (auto name : scenario_names()) {
    auto run = run_scenario(default_config(name));
    for (const auto& s : run.planted_sentinels) EXPECT_EQ(run.ledger_log.find(s), std::string::npos) << name;
  }
}
