#include "sim6g/cli.hpp"

#include <algorithm>

#include "sim6g/errors.hpp"

namespace sim6g::cli {
namespace {

const Value& field(const Value& obj, const char* name, const std::string& where) {
  if (!obj.is_object() || !obj.contains(name)) throw ConfigError(where + ": missing '" + name + "'");
  return obj.at(name);
}

std::string string_field(const Value& obj, const char* name, const std::string& where) {
  const auto& v = field(obj, name, where);
  if (!v.is_string()) throw ConfigError(where + ": '" + name + "' must be a string");
  return v.get<std::string>();
}

std::uint64_t uint_field(const Value& obj, const char* name, const std::string& where) {
  const auto& v = field(obj, name, where);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  throw ConfigError(where + ": '" + name + "' must be a non-negative integer");
}

void only_keys(const Value& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown field '" + key + "'");
    }
  }
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  Value root;
  try {
    root = parse_value(text);
  } catch (const InputError& e) {
    throw ConfigError(std::string("config is not valid: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a map");
  only_keys(root, {"config_version", "seed", "max_ticks", "nodes", "actors", "scenario", "output"}, "config");

  const auto& version = field(root, "config_version", "config");
  if (!version.is_number_integer() || version.get<std::int64_t>() != kConfigVersion) {
    throw ConfigError("config_version must be " + std::to_string(kConfigVersion));
  }

  RunConfig rc;
  auto& sc = rc.scenario;
  sc.seed = uint_field(root, "seed", "config");
  if (root.contains("max_ticks")) sc.max_ticks = uint_field(root, "max_ticks", "config");

  const auto& nodes = field(root, "nodes", "config");
  if (!nodes.is_array()) throw ConfigError("config: 'nodes' must be a list");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    only_keys(nodes[i], {"node_id", "delay_ticks"}, where);
    sc.nodes.push_back({string_field(nodes[i], "node_id", where), uint_field(nodes[i], "delay_ticks", where)});
  }

  const auto& actors = field(root, "actors", "config");
  if (!actors.is_array()) throw ConfigError("config: 'actors' must be a list");
  for (std::size_t i = 0; i < actors.size(); ++i) {
    std::string where = "actors[" + std::to_string(i) + "]";
    if (actors[i].is_object() && actors[i].contains("actor_id") && actors[i]["actor_id"].is_string()) {
      where = "actor '" + actors[i]["actor_id"].get<std::string>() + "'";
    }
    only_keys(actors[i], {"actor_id", "role", "node_id", "key_seed"}, where);
    scenario::ActorSpec a;
    a.actor_id = string_field(actors[i], "actor_id", where);
    a.role = scenario::role_from_string(string_field(actors[i], "role", where));
    a.node = string_field(actors[i], "node_id", where);
    a.key_seed_hex = string_field(actors[i], "key_seed", where);
    sc.actors.push_back(std::move(a));
  }

  const auto& scen = field(root, "scenario", "config");
  only_keys(scen, {"name", "params", "expect"}, "scenario");
  sc.scenario = string_field(scen, "name", "scenario");
  if (scen.contains("params")) sc.params = scen.at("params");
  if (scen.contains("expect")) sc.expect = string_field(scen, "expect", "scenario");

  if (root.contains("output")) {
    const auto& out = root.at("output");
    only_keys(out, {"path", "format"}, "output");
    if (out.contains("path")) rc.output.path = string_field(out, "path", "output");
    if (out.contains("format")) rc.output.format = string_field(out, "format", "output");
    if (rc.output.format != "structured" && rc.output.format != "table") {
      throw ConfigError("output: format must be 'structured' or 'table'");
    }
  }

  scenario::validate(sc);
  return rc;
}

std::string format_run_config(const RunConfig& rc) {
  const auto& sc = rc.scenario;
  Value nodes = Value::array();
  for (const auto& n : sc.nodes) nodes.push_back({{"node_id", n.id}, {"delay_ticks", n.delay}});
  Value actors = Value::array();
  for (const auto& a : sc.actors) {
    actors.push_back({{"actor_id", a.actor_id},
                      {"role", std::string(scenario::to_string(a.role))},
                      {"node_id", a.node},
                      {"key_seed", a.key_seed_hex}});
  }
  Value scen{{"name", sc.scenario}, {"params", sc.params}};
  if (!sc.expect.empty()) scen["expect"] = sc.expect;
  Value root{{"config_version", kConfigVersion},
             {"seed", sc.seed},
             {"max_ticks", sc.max_ticks},
             {"nodes", nodes},
             {"actors", actors},
             {"scenario", scen}};
  if (!rc.output.path.empty()) root["output"] = {{"path", rc.output.path}, {"format", rc.output.format}};
  return canonicalize(root);
}

}  // namespace sim6g::cli
