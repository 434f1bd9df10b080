#include "sim6g/scenarios.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

#include "sim6g/errors.hpp"

namespace sim6g::scenario {
namespace {

constexpr std::array<std::pair<Role, std::string_view>, 10> kRoleNames{{
    {Role::HomeMNO, "HomeMNO"},
    {Role::VisitedMNO, "VisitedMNO"},
    {Role::Subscriber, "Subscriber"},
    {Role::IoTDevice, "IoTDevice"},
    {Role::NF_Consumer, "NF_Consumer"},
    {Role::NF_Producer, "NF_Producer"},
    {Role::NRF, "NRF"},
    {Role::IPX, "IPX"},
    {Role::OTTService, "OTTService"},
    {Role::Government, "Government"},
}};

std::string default_seed(std::string_view actor_id) {
  return crypto::content_id(to_bytes("sim6g-default-" + std::string(actor_id))).hex();
}

ActorSpec actor(std::string id, Role role, std::string node) {
  auto seed = default_seed(id);
  return ActorSpec{std::move(id), role, std::move(node), std::move(seed)};
}

}  // namespace

std::string_view to_string(Role r) {
  for (const auto& [role, name] : kRoleNames) {
    if (role == r) return name;
  }
  return "?";
}

Role role_from_string(std::string_view s) {
  for (const auto& [role, name] : kRoleNames) {
    if (name == s) return role;
  }
  throw ConfigError("unknown role '" + std::string(s) + "'");
}

std::string_view to_string(LinkClass c) {
  switch (c) {
    case LinkClass::TerminalVisited: return "terminal_visited";
    case LinkClass::VisitedHome: return "visited_home";
    case LinkClass::IntraCore: return "intra_core";
    case LinkClass::LedgerLocalRead: return "ledger_local_read";
    case LinkClass::OttLink: return "ott_link";
  }
  return "?";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::ExpectedDenial: return "expected_denial";
    case Outcome::Failure: return "failure";
  }
  return "?";
}

const std::vector<std::string_view>& scenario_names() {
  static const std::vector<std::string_view> names{
      "roaming_access",       "baseline_centralized",  "nf_authorization",
      "ipx_alteration",       "key_rotation_roaming",  "location_attestation",
  };
  return names;
}

void validate(const ScenarioConfig& config) {
  if (config.nodes.empty()) throw ConfigError("config declares no nodes");
  std::set<std::string> node_ids;
  for (const auto& n : config.nodes) {
    if (n.id.empty()) throw ConfigError("node with empty node_id");
    if (!node_ids.insert(n.id).second) throw ConfigError("duplicate node_id '" + n.id + "'");
  }
  std::set<std::string> actor_ids;
  std::set<std::string> seeds;
  for (const auto& a : config.actors) {
    if (a.actor_id.empty()) throw ConfigError("actor with empty actor_id");
    if (!actor_ids.insert(a.actor_id).second) throw ConfigError("duplicate actor_id '" + a.actor_id + "'");
    if (!node_ids.contains(a.node)) {
      throw ConfigError("actor '" + a.actor_id + "' references undeclared node '" + a.node + "'");
    }
    try {
      if (hex_decode(a.key_seed_hex).size() != crypto::kSeedSize) throw InputError("length");
    } catch (const InputError&) {
      throw ConfigError("actor '" + a.actor_id + "' key_seed must be 32 bytes of lowercase hex");
    }
    if (!seeds.insert(a.key_seed_hex).second) {
      throw ConfigError("actor '" + a.actor_id + "' reuses another actor's key_seed");
    }
  }
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), config.scenario) == names.end()) {
    throw ConfigError("unknown scenario '" + config.scenario + "'");
  }
  if (!config.params.is_object()) throw ConfigError("scenario params must be a map");
  if (config.max_ticks < 1) throw ConfigError("max_ticks must be at least 1");
  if (!config.expect.empty() && config.expect != "success" && config.expect != "expected_denial") {
    throw ConfigError("expect must be 'success' or 'expected_denial'");
  }
}

ScenarioConfig default_config(std::string_view scenario_name) {
  ScenarioConfig c;
  c.scenario = std::string(scenario_name);
  c.seed = 7;
  c.nodes = {{"node-home", 0}, {"node-visited", 2}, {"node-third", 3}};
  if (scenario_name == "roaming_access" || scenario_name == "baseline_centralized" ||
      scenario_name == "key_rotation_roaming") {
    c.actors = {actor("home", Role::HomeMNO, "node-home"), actor("visited", Role::VisitedMNO, "node-visited"),
                actor("subscriber", Role::Subscriber, "node-visited")};
  } else if (scenario_name == "nf_authorization") {
    c.actors = {actor("nrf", Role::NRF, "node-home"), actor("consumer", Role::NF_Consumer, "node-visited"),
                actor("producer-1", Role::NF_Producer, "node-visited"),
                actor("producer-2", Role::NF_Producer, "node-third")};
  } else if (scenario_name == "ipx_alteration") {
    c.actors = {actor("home", Role::HomeMNO, "node-home"), actor("visited", Role::VisitedMNO, "node-visited"),
                actor("ipx-1", Role::IPX, "node-third"), actor("ipx-2", Role::IPX, "node-third")};
  } else if (scenario_name == "location_attestation") {
    c.actors = {actor("home", Role::HomeMNO, "node-home"), actor("subscriber", Role::Subscriber, "node-visited"),
                actor("ott", Role::OTTService, "node-third"), actor("government", Role::Government, "node-home")};
  } else {
    throw ConfigError("unknown scenario '" + std::string(scenario_name) + "'");
  }
  return c;
}

Value ScenarioMessage::to_value() const {
  return Value{{"from", from},
               {"to", to},
               {"link_class", std::string(scenario::to_string(link_class))},
               {"payload_kind", payload_kind},
               {"tick", tick}};
}

std::uint64_t ScenarioReport::count(LinkClass c) const {
  auto it = message_counts.find(c);
  return it == message_counts.end() ? 0 : it->second;
}

Value ScenarioReport::to_value() const {
  Value counts = Value::object();
  for (const auto& [c, n] : message_counts) counts[std::string(to_string(c))] = n;
  return Value{{"scenario_name", scenario_name},
               {"outcome", std::string(to_string(outcome))},
               {"failure_reason", failure_reason},
               {"message_counts", counts},
               {"ticks_elapsed", ticks_elapsed},
               {"seed", seed},
               {"verification_reports", verification_reports},
               {"metrics", metrics}};
}

std::string ScenarioReport::to_structured() const { return canonicalize(to_value()) + "\n"; }

std::string ScenarioReport::to_table() const {
  std::ostringstream out;
  out << "scenario      " << scenario_name << "\n";
  out << "outcome       " << to_string(outcome);
  if (!failure_reason.empty()) out << " (" << failure_reason << ")";
  out << "\n";
  out << "seed          " << seed << "\n";
  out << "ticks         " << ticks_elapsed << "\n";
  out << "verifications " << verification_reports.size() << "\n";
  out << "link class          messages\n";
  for (const auto& [c, n] : message_counts) {
    std::string name(to_string(c));
    out << name << std::string(20 - std::min<std::size_t>(20, name.size()), ' ') << n << "\n";
  }
  for (const auto& [k, v] : metrics.items()) out << "metric " << k << " = " << canonicalize(v) << "\n";
  return out.str();
}

std::string ScenarioRun::message_log() const {
  std::string out;
  for (const auto& m : messages) {
    out += canonicalize(m.to_value());
    out.push_back('\n');
  }
  return out;
}

ScenarioRun run_scenario(const ScenarioConfig& config) {
  validate(config);
  const auto& s = config.scenario;
  if (s == "roaming_access") return run_roaming_access(config);
  if (s == "baseline_centralized") return run_baseline_centralized(config);
  if (s == "nf_authorization") return run_nf_authorization(config);
  if (s == "ipx_alteration") return run_ipx_alteration(config);
  if (s == "key_rotation_roaming") return run_key_rotation_roaming(config);
  if (s == "location_attestation") return run_location_attestation(config);
  throw ConfigError("unknown scenario '" + s + "'");
}

}  // namespace sim6g::scenario
