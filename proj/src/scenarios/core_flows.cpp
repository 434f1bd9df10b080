#include <algorithm>
#include <map>

#include "harness.hpp"
#include "sim6g/errors.hpp"
#include "sim6g/interconnect.hpp"

namespace sim6g::scenario {
namespace {

using detail::Actor;
using detail::Attempt;
using detail::Harness;
using detail::Params;

std::optional<ledger::Tick> first_denial_of(const std::vector<Attempt>& attempts) {
  for (const auto& a : attempts) {
    if (!a.accepted) return a.tick;
  }
  return std::nullopt;
}

std::string first_unexpected_denial(const std::vector<Attempt>& attempts) {
  for (const auto& a : attempts) {
    if (!a.accepted) return "denied at tick " + std::to_string(a.tick) + " (" + a.reason + ")";
  }
  return {};
}

}  // namespace

// NF-to-NF authorization with NRF-issued credentials -------------------------------

ScenarioRun run_nf_authorization(const ScenarioConfig& config) {
  Params p(config.params, {"variant", "service_name", "validity_ticks"});
  Harness h(config, "nf_authorization");
  const auto variant = p.string("variant", "happy");
  if (variant != "happy" && variant != "wrong_producer" && variant != "expired" && variant != "revoked") {
    throw ConfigError("unknown nf_authorization variant '" + variant + "'");
  }
  Actor& nrf = h.one(Role::NRF);
  Actor& consumer = h.one(Role::NF_Consumer);
  auto producers = h.all(Role::NF_Producer);
  if (producers.empty()) throw ConfigError("nf_authorization needs an NF_Producer");
  if (variant == "wrong_producer" && producers.size() < 2) {
    throw ConfigError("variant wrong_producer needs two NF_Producer actors");
  }
  const auto service = p.string("service_name", "nudm-sdm");
  const auto validity = p.uint("validity_ticks", variant == "expired" ? 1 : 100);

  h.create_dids();
  h.sync();
  Value claims{{"producer", producers[0]->did().str()},
               {"service", service},
               {"privacy_probe", h.plant_sentinel()}};
  auto token = vc::issue(h.net(), nrf.node(), nrf.wallet,
                         {consumer.did(), std::string(vc::schema::kNetworkAuthorization), claims, h.now(),
                          h.now() + validity, true});
  consumer.wallet.store(token);
  h.send(nrf, consumer, LinkClass::IntraCore, "token_issuance");
  h.sync();

  Actor& target = variant == "wrong_producer" ? *producers[1] : *producers[0];
  if (variant == "expired") {
    while (h.now() <= token.valid_until_tick) h.advance();
  }

  h.begin_access();
  std::optional<ledger::Tick> revocation_commit;
  if (variant == "revoked") {
    vc::revoke(h.net(), nrf.node(), nrf.wallet, *token.status);
    revocation_commit = h.now();
  }

  std::vector<Attempt> attempts;
  bool claims_mismatch = false;
  for (;;) {
    auto a = detail::edge_access(h, target, consumer, token, LinkClass::IntraCore, "nf_request");
    // The producer also checks that the grant names it and the service.
    const bool grant_matches = token.schema == vc::schema::kNetworkAuthorization &&
                               token.claims.value("producer", "") == target.did().str() &&
                               token.claims.value("service", "") == service;
    if (a.accepted && !grant_matches) {
      a.accepted = false;
      a.reason = "claims_mismatch";
      claims_mismatch = true;
    }
    attempts.push_back(a);
    const bool done = variant != "revoked" || !attempts.back().accepted;
    if (done || !h.can_advance()) break;
    h.advance();
  }
  h.end_access();

  auto first_denial = first_denial_of(attempts);
  h.metrics()["variant"] = variant;
  h.metrics()["producer"] = target.id();
  h.metrics()["first_denial_tick"] = first_denial ? Value(*first_denial) : Value(nullptr);
  h.metrics()["revocation_commit_tick"] = revocation_commit ? Value(*revocation_commit) : Value(nullptr);

  std::string reason;
  Outcome outcome = Outcome::ExpectedDenial;
  if (variant == "happy") {
    reason = first_unexpected_denial(attempts);
    outcome = Outcome::Success;
  } else if (variant == "wrong_producer") {
    if (!claims_mismatch) reason = "grant for another producer was not refused on its claims";
  } else if (variant == "expired") {
    reason = detail::check_denial_law(attempts, 0, {vc::Check::TimeWindow});
  } else {
    reason = detail::check_denial_law(attempts, *revocation_commit + h.net().delay(target.node()),
                                      {vc::Check::Status});
  }
  return h.finish(reason.empty() ? outcome : Outcome::Failure, reason);
}

// Interconnect message alteration by IPX providers ----------------------------------------

ScenarioRun run_ipx_alteration(const ScenarioConfig& config) {
  Params p(config.params, {"elements", "permissions", "patches", "revoke_ipx", "revoke_at_tick"});
  Harness h(config, "ipx_alteration");
  Actor& origin = h.one(Role::HomeMNO);
  Actor& receiver = h.one(Role::VisitedMNO);
  auto ipxs = h.all(Role::IPX);
  if (ipxs.empty()) throw ConfigError("ipx_alteration needs at least one IPX actor");
  std::map<std::string, Actor*> by_id;
  for (Actor* a : ipxs) by_id[a->id()] = a;

  Value elements{{"route_header", "plmn-h/gw1"}, {"charging_info", "tariff-a"}, {"subscriber_ref", "opaque-1"}};
  if (const Value* e = p.raw("elements")) {
    if (!e->is_object()) throw ConfigError("elements must be a map");
    elements = *e;
  }

  std::map<std::string, std::vector<std::string>> permissions;
  for (Actor* a : ipxs) permissions[a->id()] = {"route_header"};
  if (const Value* perms = p.raw("permissions")) {
    if (!perms->is_object()) throw ConfigError("permissions must be a map");
    for (const auto& [id, list] : perms->items()) {
      if (!by_id.contains(id)) throw ConfigError("permissions name unknown IPX '" + id + "'");
      if (!list.is_array()) throw ConfigError("permissions for '" + id + "' must be a list");
      auto& out = permissions[id];
      out.clear();
      for (const auto& el : list) {
        if (!el.is_string()) throw ConfigError("permitted element names are strings");
        out.push_back(el.get<std::string>());
      }
    }
  }

  struct PlannedPatch {
    Actor* ipx;
    std::string element;
    Value value;
  };
  std::vector<PlannedPatch> plan;
  if (const Value* patches = p.raw("patches")) {
    if (!patches->is_array()) throw ConfigError("patches must be a list");
    for (const auto& entry : *patches) {
      if (!entry.is_object() || !entry.contains("ipx") || !entry.contains("element") || !entry.contains("value") ||
          !entry["ipx"].is_string() || !entry["element"].is_string()) {
        throw ConfigError("each patch needs string 'ipx', string 'element' and a 'value'");
      }
      auto id = entry["ipx"].get<std::string>();
      if (!by_id.contains(id)) throw ConfigError("patch names unknown IPX '" + id + "'");
      plan.push_back({by_id[id], entry["element"].get<std::string>(), entry["value"]});
    }
  } else {
    for (Actor* a : ipxs) plan.push_back({a, "route_header", a->id() + "/gw"});
  }
  // Patches are applied hop by hop, in IPX declaration order.
  std::stable_sort(plan.begin(), plan.end(), [&](const PlannedPatch& a, const PlannedPatch& b) {
    return std::find(ipxs.begin(), ipxs.end(), a.ipx) < std::find(ipxs.begin(), ipxs.end(), b.ipx);
  });

  std::optional<std::size_t> expected_offense;
  {
    Value state = elements;
    for (std::size_t i = 0; i < plan.size() && !expected_offense; ++i) {
      const auto& allowed = permissions[plan[i].ipx->id()];
      if (!state.contains(plan[i].element) ||
          std::find(allowed.begin(), allowed.end(), plan[i].element) == allowed.end()) {
        expected_offense = i;
      }
      state[plan[i].element] = plan[i].value;
    }
  }

  const auto revoke_ipx = p.string("revoke_ipx", "");
  std::optional<std::size_t> revoked_patch;
  if (!revoke_ipx.empty()) {
    if (!by_id.contains(revoke_ipx)) throw ConfigError("revoke_ipx names unknown IPX '" + revoke_ipx + "'");
    for (std::size_t i = 0; i < plan.size(); ++i) {
      if (plan[i].ipx->id() == revoke_ipx) {
        revoked_patch = i;
        break;
      }
    }
    if (!revoked_patch) throw ConfigError("revoke_ipx '" + revoke_ipx + "' applies no patch");
    if (expected_offense) throw ConfigError("revocation variant needs an otherwise authorized patch chain");
  }

  h.create_dids();
  h.sync();
  std::map<std::string, vc::Credential> grants;
  for (Actor* a : ipxs) {
    Value permitted = Value::array();
    for (const auto& el : permissions[a->id()]) permitted.push_back(el);
    Value claims{{"permitted_elements", permitted},
                 {"principal", origin.did().str()},
                 {"privacy_probe", h.plant_sentinel()}};
    grants[a->id()] = vc::issue(h.net(), origin.node(), origin.wallet,
                                {a->did(), std::string(vc::schema::kAlterationPermission), claims, h.now(),
                                 h.now() + config.max_ticks, true});
    a->wallet.store(grants[a->id()]);
    h.send(origin, *a, LinkClass::VisitedHome, "alteration_grant");
  }
  h.sync();
  const auto access_start = h.now();
  const auto revoke_at = p.uint("revoke_at_tick", access_start);
  if (revoked_patch && revoke_at < access_start) {
    throw ConfigError("revoke_at_tick must be >= " + std::to_string(access_start) + " (end of setup)");
  }

  h.begin_access();
  std::optional<ledger::Tick> revocation_commit;
  struct Delivery {
    ledger::Tick tick;
    interconnect::InterconnectVerdict verdict;
  };
  std::vector<Delivery> deliveries;
  for (;;) {
    if (revoked_patch && !revocation_commit && h.now() == revoke_at) {
      vc::revoke(h.net(), origin.node(), origin.wallet, *grants[revoke_ipx].status);
      revocation_commit = h.now();
    }
    auto message = interconnect::originate(origin.wallet, h.resolve_at(origin, origin.did()), elements);
    const Actor* holder = &origin;
    for (Actor* ipx : ipxs) {
      h.send(*holder, *ipx, LinkClass::VisitedHome, "interconnect_message");
      holder = ipx;
      auto own_doc = h.resolve_at(*ipx, ipx->did());
      for (const auto& step : plan) {
        if (step.ipx != ipx) continue;
        interconnect::apply_patch(message, ipx->wallet, own_doc, step.element, step.value, grants[ipx->id()]);
      }
    }
    h.send(*holder, receiver, LinkClass::VisitedHome, "interconnect_message");

    auto verdict = interconnect::verify_message(h.net().view(receiver.node()), message);
    h.ledger_reads(receiver, verdict.ledger_reads, "interconnect_lookup");
    h.add_report(receiver, origin, "interconnect", verdict.to_value());
    const bool accepted = verdict.accepted;
    deliveries.push_back({h.now(), std::move(verdict)});

    const bool done = !revoked_patch || (revocation_commit && !accepted);
    if (done || !h.can_advance()) break;
    h.advance();
  }
  h.end_access();

  std::optional<ledger::Tick> first_denial;
  for (const auto& d : deliveries) {
    if (!d.verdict.accepted) {
      first_denial = d.tick;
      break;
    }
  }
  const auto& last = deliveries.back().verdict;
  h.metrics()["patches"] = plan.size();
  h.metrics()["offending_patch"] = last.offending_patch ? Value(*last.offending_patch) : Value(nullptr);
  h.metrics()["denial_reason"] = last.reason;
  h.metrics()["first_denial_tick"] = first_denial ? Value(*first_denial) : Value(nullptr);
  h.metrics()["revocation_commit_tick"] = revocation_commit ? Value(*revocation_commit) : Value(nullptr);

  std::string reason;
  Outcome outcome = Outcome::Success;
  if (expected_offense) {
    outcome = Outcome::ExpectedDenial;
    if (last.accepted || last.offending_patch != expected_offense ||
        (last.reason != "element-not-permitted" && last.reason != "unknown-element")) {
      reason = "expected denial at patch " + std::to_string(*expected_offense) + ", got " + last.reason;
    }
  } else if (revoked_patch) {
    outcome = Outcome::ExpectedDenial;
    if (!revocation_commit) {
      reason = "run ended before revoke_at_tick";
    } else {
      const auto boundary = *revocation_commit + h.net().delay(receiver.node());
      for (const auto& d : deliveries) {
        const bool should_deny = d.tick >= boundary;
        if (should_deny != !d.verdict.accepted) {
          reason = "delivery at tick " + std::to_string(d.tick) + " contradicts revocation boundary " +
                   std::to_string(boundary);
          break;
        }
        if (should_deny && (d.verdict.offending_patch != revoked_patch || d.verdict.reason != "alteration-vc-invalid")) {
          reason = "denial did not point at the revoked patcher";
          break;
        }
      }
      if (reason.empty() && !first_denial) reason = "no denial observed";
    }
  } else {
    for (const auto& d : deliveries) {
      if (!d.verdict.accepted) {
        reason = "message rejected: " + d.verdict.reason;
        break;
      }
    }
  }
  return h.finish(reason.empty() ? outcome : Outcome::Failure, reason);
}

// Operator-attested location and KYC onboarding -------------------------------------------

ScenarioRun run_location_attestation(const ScenarioConfig& config) {
  Params p(config.params, {"variant", "validity_ticks", "cell_area"});
  Harness h(config, "location_attestation");
  const auto variant = p.string("variant", "in_window");
  if (variant != "in_window" && variant != "stale" && variant != "onboarding") {
    throw ConfigError("unknown location_attestation variant '" + variant + "'");
  }
  const auto validity = p.uint("validity_ticks", 10);
  Actor& mno = h.one(Role::HomeMNO);
  Actor& sub = h.one(Role::Subscriber);

  h.create_dids();
  h.sync();

  std::vector<Attempt> attempts;
  Outcome outcome = Outcome::Success;
  std::string reason;
  if (variant == "onboarding") {
    // Role reversal: the operator verifies a government-issued credential.
    Actor& gov = h.one(Role::Government);
    auto ssn = vc::issue(h.net(), gov.node(), gov.wallet,
                         {sub.did(), std::string(vc::schema::kSocialSecurityNumber),
                          Value{{"ssn", h.plant_sentinel()}}, h.now(), h.now() + validity, true});
    sub.wallet.store(ssn);
    h.send(gov, sub, LinkClass::OttLink, "credential_issuance");
    h.sync();
    h.begin_access();
    attempts.push_back(detail::edge_access(h, mno, sub, ssn, LinkClass::TerminalVisited, "onboarding"));
    reason = first_unexpected_denial(attempts);
  } else {
    Actor& ott = h.one(Role::OTTService);
    Value claims{{"cell_area", p.string("cell_area", "cell-4711")},
                 {"attested_tick", h.now()},
                 {"privacy_probe", h.plant_sentinel()}};
    auto attestation = vc::issue(h.net(), mno.node(), mno.wallet,
                                 {sub.did(), std::string(vc::schema::kLocationAttestation), claims, h.now(),
                                  h.now() + validity, true});
    sub.wallet.store(attestation);
    h.send(mno, sub, LinkClass::TerminalVisited, "credential_issuance");
    h.sync();
    if (variant == "stale") {
      while (h.now() <= attestation.valid_until_tick) h.advance();
    } else if (h.now() > attestation.valid_until_tick) {
      throw ConfigError("validity_ticks shorter than ledger synchronisation; raise validity_ticks");
    }
    h.begin_access();
    attempts.push_back(detail::edge_access(h, ott, sub, attestation, LinkClass::OttLink, "location"));
    if (variant == "stale") {
      outcome = Outcome::ExpectedDenial;
      reason = detail::check_denial_law(attempts, 0, {vc::Check::TimeWindow});
    } else {
      reason = first_unexpected_denial(attempts);
    }
  }
  h.end_access();
  h.metrics()["variant"] = variant;
  return h.finish(reason.empty() ? outcome : Outcome::Failure, reason);
}

}  // namespace sim6g::scenario
