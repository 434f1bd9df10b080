#include <algorithm>

#include "harness.hpp"
#include "sim6g/errors.hpp"

namespace sim6g::scenario {
namespace {

using detail::Actor;
using detail::Attempt;
using detail::Harness;
using detail::Params;

// Centralized flow: authentication-material fetch plus confirmation.
constexpr std::uint64_t kBaselineHomeMessagesPerAccess = 2;

const std::initializer_list<std::string_view> kRoamingParams{
    "subscribers", "revoke_before_access", "revoke_at_tick", "access_rounds", "credential_validity_ticks"};

Role terminal_role(Harness& h) { return h.has(Role::Subscriber) ? Role::Subscriber : Role::IoTDevice; }

Value access_claims(Harness& h, const Actor& home) {
  return Value{{"service_profile", "data"}, {"home_operator", home.id()}, {"privacy_probe", h.plant_sentinel()}};
}

std::uint64_t count_visited_home(const std::vector<ScenarioMessage>& messages) {
  return static_cast<std::uint64_t>(std::count_if(messages.begin(), messages.end(), [](const ScenarioMessage& m) {
    return m.link_class == LinkClass::VisitedHome;
  }));
}

}  // namespace

ScenarioRun run_roaming_access(const ScenarioConfig& config) {
  Params p(config.params, kRoamingParams);
  Harness h(config, "roaming_access");
  Actor& home = h.one(Role::HomeMNO);
  Actor& visited = h.one(Role::VisitedMNO);
  auto terminals = h.expand(terminal_role(h), p.uint("subscribers", 1));
  const bool revoke_before = p.flag("revoke_before_access", false);
  const auto revoke_at = p.optional_uint("revoke_at_tick");
  const auto validity = p.uint("credential_validity_ticks", 1000);
  const auto rounds = p.uint("access_rounds", 1);
  if (revoke_before && revoke_at) throw ConfigError("revoke_before_access and revoke_at_tick are exclusive");
  if (rounds < 1) throw ConfigError("access_rounds must be at least 1");

  // Setup: identities, then home issues permissions directly to terminals.
  h.create_dids();
  h.sync();
  std::vector<vc::Credential> creds;
  creds.reserve(terminals.size());
  for (Actor* t : terminals) {
    creds.push_back(vc::issue(h.net(), home.node(), home.wallet,
                              {t->did(), std::string(vc::schema::kAccessPermission), access_claims(h, home),
                               h.now(), h.now() + validity, true}));
    t->wallet.store(creds.back());
    h.send(home, *t, LinkClass::TerminalVisited, "credential_issuance");
  }
  h.sync();
  auto revoke_all = [&] {
    for (const auto& c : creds) vc::revoke(h.net(), home.node(), home.wallet, *c.status);
  };
  if (revoke_before) {
    revoke_all();
    h.sync();
  }
  const auto access_start = h.now();
  if (revoke_at && *revoke_at < access_start) {
    throw ConfigError("revoke_at_tick must be >= " + std::to_string(access_start) + " (end of setup)");
  }

  // Access: decided at the visited edge from the visited node's view only.
  h.begin_access();
  std::vector<Attempt> attempts;
  std::optional<ledger::Tick> revocation_commit;
  for (std::uint64_t round = 0;; ++round) {
    if (revoke_at && !revocation_commit && h.now() == *revoke_at) {
      revoke_all();
      revocation_commit = h.now();
    }
    bool all_denied = true;
    for (std::size_t i = 0; i < terminals.size(); ++i) {
      attempts.push_back(detail::edge_access(h, visited, *terminals[i], creds[i], LinkClass::TerminalVisited, "access"));
      all_denied = all_denied && !attempts.back().accepted;
    }
    const bool done = revoke_at ? (revocation_commit && all_denied) : round + 1 >= rounds;
    if (done || !h.can_advance()) break;
    h.advance();
  }
  h.end_access();

  std::optional<ledger::Tick> first_denial;
  for (const auto& a : attempts) {
    if (!a.accepted) {
      first_denial = a.tick;
      break;
    }
  }
  h.metrics()["subscribers"] = terminals.size();
  h.metrics()["access_start_tick"] = access_start;
  h.metrics()["first_denial_tick"] = first_denial ? Value(*first_denial) : Value(nullptr);
  h.metrics()["revocation_commit_tick"] = revocation_commit ? Value(*revocation_commit) : Value(nullptr);

  Outcome outcome = Outcome::Success;
  std::string reason;
  if (revoke_before) {
    reason = detail::check_denial_law(attempts, access_start, {vc::Check::Status});
    outcome = reason.empty() ? Outcome::ExpectedDenial : Outcome::Failure;
  } else if (revoke_at) {
    if (!revocation_commit) {
      reason = "tick budget ended before revoke_at_tick";
    } else {
      reason = detail::check_denial_law(attempts, *revocation_commit + h.net().delay(visited.node()),
                                        {vc::Check::Status});
    }
    outcome = reason.empty() ? Outcome::ExpectedDenial : Outcome::Failure;
  } else {
    for (const auto& a : attempts) {
      if (!a.accepted) {
        outcome = Outcome::Failure;
        reason = "access denied at tick " + std::to_string(a.tick) + " (" + a.reason + ")";
        break;
      }
    }
  }

  auto run = h.finish(outcome, reason);
  auto visited_home = count_visited_home(run.messages);
  const std::uint64_t baseline = kBaselineHomeMessagesPerAccess * attempts.size();
  run.report.metrics["access_attempts"] = attempts.size();
  run.report.metrics["baseline_visited_home"] = baseline;
  run.report.metrics["visited_home_reduction_percent"] =
      baseline == 0 ? Value(nullptr) : Value((baseline - visited_home) * 100 / baseline);
  return run;
}

ScenarioRun run_baseline_centralized(const ScenarioConfig& config) {
  Params p(config.params, kRoamingParams);
  Harness h(config, "baseline_centralized", false);
  Actor& home = h.one(Role::HomeMNO);
  Actor& visited = h.one(Role::VisitedMNO);
  auto terminals = h.expand(terminal_role(h), p.uint("subscribers", 1));
  const auto rounds = p.uint("access_rounds", 1);
  if (rounds < 1) throw ConfigError("access_rounds must be at least 1");

  // Today's flow: every attach triggers a round trip to the home network.
  h.begin_access();
  std::uint64_t attempts = 0;
  for (std::uint64_t round = 0; round < rounds; ++round) {
    for (Actor* t : terminals) {
      h.send(*t, visited, LinkClass::TerminalVisited, "attach_request");
      h.send(visited, home, LinkClass::VisitedHome, "auth_material_request");
      h.send(home, visited, LinkClass::VisitedHome, "auth_material_response");
      h.send(visited, *t, LinkClass::TerminalVisited, "access_decision");
      ++attempts;
    }
    if (round + 1 < rounds) h.advance();
  }
  h.metrics()["subscribers"] = terminals.size();
  h.metrics()["access_attempts"] = attempts;
  h.metrics()["visited_home_per_access"] = kBaselineHomeMessagesPerAccess;
  return h.finish(Outcome::Success);
}

ScenarioRun run_key_rotation_roaming(const ScenarioConfig& config) {
  Params p(config.params, {"rotate_at_tick", "keep_old_assertion_key", "new_endpoint", "access_rounds",
                           "credential_validity_ticks"});
  Harness h(config, "key_rotation_roaming");
  Actor& home = h.one(Role::HomeMNO);
  Actor& visited = h.one(Role::VisitedMNO);
  Actor& sub = h.one(terminal_role(h));
  const bool keep_old = p.flag("keep_old_assertion_key", true);
  const auto new_endpoint = p.string("new_endpoint", "sim://mno-h/gate2");
  const auto validity = p.uint("credential_validity_ticks", 1000);
  const std::string gate_id = "#roaming-gate";

  h.create_dids();
  h.sync();
  {
    auto doc = h.resolve_at(home, home.did());
    doc.services.push_back({gate_id, "RoamingSignalingGate", "sim://mno-h/gate1"});
    did::update_document(h.net(), home.node(), home.did(), doc,
                         *home.wallet.signer_for(did::Purpose::Authentication, &doc));
  }
  h.sync();
  auto cred = vc::issue(h.net(), home.node(), home.wallet,
                        {sub.did(), std::string(vc::schema::kAccessPermission), access_claims(h, home), h.now(),
                         h.now() + validity, true});
  sub.wallet.store(cred);
  h.send(home, sub, LinkClass::TerminalVisited, "credential_issuance");
  h.sync();

  const auto access_start = h.now();
  const auto rotate_at = p.uint("rotate_at_tick", access_start + 1);
  if (rotate_at < access_start) {
    throw ConfigError("rotate_at_tick must be >= " + std::to_string(access_start) + " (end of setup)");
  }
  const auto rounds = p.uint("access_rounds", rotate_at - access_start + h.net().max_delay() + 2);
  if (rounds < 1) throw ConfigError("access_rounds must be at least 1");

  const crypto::KeyPair old_key = home.key;
  const auto new_key = crypto::generate_keypair(
      crypto::content_id(to_bytes(home.spec.key_seed_hex + "/rotation-1")).bytes);

  h.begin_access();
  std::vector<Attempt> attempts;
  std::optional<ledger::Tick> rotation_commit;
  std::optional<ledger::Tick> endpoint_seen;
  std::string last_endpoint;
  for (std::uint64_t round = 0; round < rounds; ++round) {
    if (h.now() == rotate_at) {
      auto doc = h.resolve_at(home, home.did());
      auto signer = *home.wallet.signer_for(did::Purpose::Authentication, &doc);
      did::DidDocument next = doc;
      next.verification_methods.clear();
      next.verification_methods.push_back(
          {"#key-1", new_key.suite_id, new_key.public_key, {did::Purpose::Authentication, did::Purpose::Assertion}});
      if (keep_old) {
        next.verification_methods.push_back(
            {std::string(did::kInitialKeyFragment), old_key.suite_id, old_key.public_key, {did::Purpose::Assertion}});
      }
      for (auto& s : next.services) {
        if (s.id == gate_id) s.endpoint = new_endpoint;
      }
      did::update_document(h.net(), home.node(), home.did(), next, signer);
      rotation_commit = h.now();
      home.wallet.remove_key(did::kInitialKeyFragment);
      home.wallet.add_key("#key-1", new_key, {did::Purpose::Authentication, did::Purpose::Assertion});
      if (keep_old) home.wallet.add_key(std::string(did::kInitialKeyFragment), old_key, {did::Purpose::Assertion});
    }

    attempts.push_back(detail::edge_access(h, visited, sub, cred, LinkClass::TerminalVisited, "access"));

    // The visited operator reads the home gate from its own node.
    auto home_doc = h.resolve_at(visited, home.did());
    h.ledger_reads(visited, 1, "gate_lookup");
    if (const auto* gate = home_doc.find_service(gate_id)) {
      last_endpoint = gate->endpoint;
      if (!endpoint_seen && gate->endpoint == new_endpoint) endpoint_seen = h.now();
    }
    if (round + 1 < rounds) h.advance();
  }

  // Ownership proofs with the rotated-out key, checked on every node.
  did::ChallengeBook book(visited.did());
  Value ownership = Value::array();
  bool old_key_rejected_everywhere = true;
  for (const auto& node : h.net().nodes()) {
    auto challenge = book.make_challenge(home.did(), h.now(), 1, h.next_rng());
    h.send(visited, home, LinkClass::VisitedHome, "ownership_challenge");
    auto response = did::respond_to_challenge(old_key, did::kInitialKeyFragment, challenge);
    h.send(home, visited, LinkClass::VisitedHome, "ownership_response");
    auto verdict = book.verify_ownership(h.net(), node.id, home.did(), challenge, response);
    const bool delivered = rotation_commit && h.now() >= *rotation_commit + node.delay;
    if (delivered && verdict == did::OwnershipVerdict::Accept) old_key_rejected_everywhere = false;
    ownership.push_back(Value{{"node", node.id}, {"verdict", std::string(did::to_string(verdict))}});
  }
  h.end_access();

  std::optional<ledger::Tick> first_denial;
  for (const auto& a : attempts) {
    if (!a.accepted) {
      first_denial = a.tick;
      break;
    }
  }
  h.metrics()["keep_old_assertion_key"] = keep_old;
  h.metrics()["rotation_commit_tick"] = rotation_commit ? Value(*rotation_commit) : Value(nullptr);
  h.metrics()["first_denial_tick"] = first_denial ? Value(*first_denial) : Value(nullptr);
  h.metrics()["endpoint_seen_tick"] = endpoint_seen ? Value(*endpoint_seen) : Value(nullptr);
  h.metrics()["visited_resolved_endpoint"] = last_endpoint;
  h.metrics()["old_key_ownership"] = ownership;

  std::string reason;
  if (!rotation_commit) {
    reason = "run ended before rotate_at_tick";
  } else if (!old_key_rejected_everywhere) {
    reason = "rotated-out key still proves ownership";
  } else if (keep_old) {
    for (const auto& a : attempts) {
      if (!a.accepted) {
        reason = "access denied at tick " + std::to_string(a.tick) + " (" + a.reason + ")";
        break;
      }
    }
  } else {
    reason = detail::check_denial_law(attempts, *rotation_commit + h.net().delay(visited.node()),
                                      {vc::Check::IssuerSignature});
  }
  if (reason.empty() && (!endpoint_seen || last_endpoint != new_endpoint)) {
    reason = "visited operator never observed the new gate endpoint";
  }
  Outcome outcome = !reason.empty() ? Outcome::Failure : keep_old ? Outcome::Success : Outcome::ExpectedDenial;
  return h.finish(outcome, reason);
}

}  // namespace sim6g::scenario
