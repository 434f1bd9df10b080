#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "sim6g/cli.hpp"
#include "sim6g/did.hpp"
#include "sim6g/errors.hpp"
#include "sim6g/ledger.hpp"
#include "sim6g/vc.hpp"

namespace sim6g::cli {
namespace {

namespace fs = std::filesystem;

/// Verification rejected; carries the report to print.
struct Rejected {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << data;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

crypto::KeyPair seed_flag(const std::string& flag, const std::string& hex) {
  try {
    return crypto::keypair_from_hex(hex);
  } catch (const InputError& e) {
    throw InputError(flag + ": " + e.what() + " (expected 32 bytes of lowercase hex)");
  }
}

did::Nonce nonce_flag(const std::string& hex) {
  Bytes bytes;
  try {
    bytes = hex_decode(hex);
  } catch (const InputError& e) {
    throw InputError(std::string("--nonce: ") + e.what());
  }
  if (bytes.size() != did::kNonceSize) throw InputError("--nonce: must be 16 bytes of hex");
  did::Nonce n{};
  std::copy(bytes.begin(), bytes.end(), n.begin());
  return n;
}

std::vector<ledger::NodeConfig> default_nodes() { return {{"node-0", 0}}; }

// Ledger state for did/vc commands: ephemeral, or persisted in a run
// directory as canonical text (state.json, ledger.log, wallets.json).
class Session {
 public:
  Session(const std::string& state_dir, const std::string& config_path)
      : net_(load_nodes(state_dir, config_path), 0) {
    did::install_validators(net_);
    vc::install_validators(net_);
    if (!state_dir.empty()) dir_ = fs::path(state_dir);
    if (dir_ && fs::exists(*dir_ / "state.json")) {
      auto state = parse_canonical(trim(read_file((*dir_ / "state.json").string())));
      net_.restore(read_file((*dir_ / "ledger.log").string()), require_uint(state, "clock"));
      wallets_ = parse_canonical(trim(read_file((*dir_ / "wallets.json").string())));
    }
  }

  ledger::LedgerNetwork& net() { return net_; }

  ledger::NodeId node_or_default(const std::string& node) const {
    if (node.empty()) return net_.nodes().front().id;
    if (!net_.has_node(node)) throw InputError("--node: unknown node '" + node + "'");
    return node;
  }

  vc::Wallet wallet(const crypto::KeyPair& key, const std::string& did_text, const std::string& fragment) {
    vc::Wallet w(did_text.empty() ? did::Did::from_public_key(key.public_key) : did::Did::parse(did_text));
    w.add_key(fragment, key, {did::Purpose::Authentication, did::Purpose::Assertion});
    auto it = wallets_.find(w.did().str());
    if (it != wallets_.end()) w.set_next_status_index(require_uint(*it, "next_status_index"));
    return w;
  }

  void remember(const vc::Wallet& w) { wallets_[w.did().str()] = Value{{"next_status_index", w.next_status_index()}}; }

  void save() {
    if (!dir_) return;
    fs::create_directories(*dir_);
    Value nodes = Value::array();
    for (const auto& n : net_.nodes()) nodes.push_back({{"node_id", n.id}, {"delay_ticks", n.delay}});
    write_file(*dir_ / "state.json",
               canonicalize(Value{{"config_version", kConfigVersion}, {"nodes", nodes}, {"clock", net_.clock()}}) + "\n");
    write_file(*dir_ / "ledger.log", net_.export_log());
    write_file(*dir_ / "wallets.json", canonicalize(wallets_) + "\n");
  }

 private:
  static std::vector<ledger::NodeConfig> load_nodes(const std::string& state_dir, const std::string& config_path) {
    if (!state_dir.empty() && fs::exists(fs::path(state_dir) / "state.json")) {
      auto state = parse_canonical(trim(read_file((fs::path(state_dir) / "state.json").string())));
      std::vector<ledger::NodeConfig> nodes;
      for (const auto& n : require_field(state, "nodes")) {
        nodes.push_back({require_string(n, "node_id"), require_uint(n, "delay_ticks")});
      }
      return nodes;
    }
    if (!config_path.empty()) return parse_run_config(read_file(config_path)).scenario.nodes;
    return default_nodes();
  }

  ledger::LedgerNetwork net_;
  std::optional<fs::path> dir_;
  Value wallets_ = Value::object();
};

void print(std::ostream& out, const Value& v) { out << canonicalize(v) << "\n"; }

Value receipt_value(const ledger::Receipt& r) { return Value{{"seq", r.seq}, {"commit_tick", r.commit_tick}}; }

std::string summary_line(const scenario::ScenarioReport& r) {
  std::ostringstream s;
  s << "scenario=" << r.scenario_name << " outcome=" << scenario::to_string(r.outcome);
  for (const auto& [c, n] : r.message_counts) s << " " << scenario::to_string(c) << "=" << n;
  s << " ticks=" << r.ticks_elapsed;
  if (!r.failure_reason.empty()) s << " reason=\"" << r.failure_reason << "\"";
  return s.str();
}

struct Options {
  // shared
  std::string state_dir, config, node, seed, did, signer_seed, signer_key = "#key-0";
  // did update
  std::string doc_file;
  // tick
  std::uint64_t ticks = 1;
  // vc
  std::string issuer_seed, issuer_did, issuer_key = "#key-0", subject, schema, claims = "{}";
  std::uint64_t valid_from = 0, valid_until = 0, index = 0;
  bool with_status = false;
  std::string credential_file, presentation_file, nonce, audience, holder_seed, holder_did, holder_key = "#key-0",
      registry;
  std::vector<std::string> credential_files;
  // scenario
  std::optional<std::uint64_t> run_seed, max_ticks;
  std::string out_path, format, ledger_out, messages_out, scenario_name;
};

int cmd_keygen(const Options& o, std::ostream& out) {
  auto kp = seed_flag("--seed", o.seed);
  print(out, Value{{"public_key", hex_encode(kp.public_key)}, {"suite_id", kp.suite_id}});
  return kExitOk;
}

int cmd_did(const std::string& sub, const Options& o, std::ostream& out) {
  Session s(o.state_dir, o.config);
  auto node = s.node_or_default(o.node);
  if (sub == "create") {
    auto kp = seed_flag("--seed", o.seed);
    auto created = did::create_did(s.net(), node, kp);
    s.save();
    print(out, Value{{"did", created.did.str()},
                     {"document", created.document.to_value()},
                     {"receipt", receipt_value(created.receipt)}});
    return kExitOk;
  }
  auto subject = did::Did::parse(o.did);
  if (sub == "resolve") {
    auto r = did::resolve(s.net(), node, subject);
    if (!r) throw NotFoundError("not-found: " + subject.str() + " at node " + node);
    print(out, Value{{"document", r->document.to_value()},
                     {"metadata", {{"version", r->version}, {"deactivated", r->deactivated}, {"as_of_tick", r->as_of_tick},
                                   {"node", node}}}});
    return kExitOk;
  }
  auto signer_kp = seed_flag("--signer-seed", o.signer_seed);
  std::string ref = o.signer_key.find('#') == 0 ? subject.str() + o.signer_key : o.signer_key;
  did::Signer signer{did::MethodRef::parse(ref), signer_kp.private_key};
  ledger::Receipt receipt;
  if (sub == "update") {
    auto body = did::DidDocument::from_value(parse_value(read_file(o.doc_file)));
    receipt = did::update_document(s.net(), node, subject, body, signer);
  } else {
    receipt = did::deactivate(s.net(), node, subject, signer);
  }
  s.save();
  print(out, Value{{"did", subject.str()}, {"receipt", receipt_value(receipt)}});
  return kExitOk;
}

int cmd_tick(const Options& o, std::ostream& out) {
  Session s(o.state_dir, o.config);
  s.net().tick(o.ticks);
  s.save();
  print(out, Value{{"clock", s.net().clock()}});
  return kExitOk;
}

int cmd_vc(const std::string& sub, const Options& o, std::ostream& out, std::ostream& err) {
  Session s(o.state_dir, o.config);
  auto node = s.node_or_default(o.node);
  if (sub == "issue") {
    auto wallet = s.wallet(seed_flag("--issuer-seed", o.issuer_seed), o.issuer_did, o.issuer_key);
    auto claims = parse_value(o.claims);
    auto c = vc::issue(s.net(), node, wallet,
                       {did::Did::parse(o.subject), o.schema, claims, o.valid_from, o.valid_until, o.with_status});
    s.remember(wallet);
    s.save();
    out << c.serialize() << "\n";
    return kExitOk;
  }
  if (sub == "revoke") {
    auto wallet = s.wallet(seed_flag("--issuer-seed", o.issuer_seed), o.issuer_did, o.issuer_key);
    auto registry = o.registry.empty() ? vc::registry_id_for(wallet.did()) : o.registry;
    auto receipt = vc::revoke(s.net(), node, wallet, {registry, o.index});
    s.save();
    print(out, Value{{"registry_id", registry}, {"index", o.index}, {"receipt", receipt_value(receipt)}});
    return kExitOk;
  }
  if (sub == "present") {
    auto wallet = s.wallet(seed_flag("--holder-seed", o.holder_seed), o.holder_did, o.holder_key);
    std::vector<vc::Credential> creds;
    for (const auto& f : o.credential_files) creds.push_back(vc::Credential::parse(trim(read_file(f))));
    auto p = vc::present(wallet, std::move(creds), nonce_flag(o.nonce), did::Did::parse(o.audience));
    out << p.serialize() << "\n";
    return kExitOk;
  }
  // verify: a credential or a presentation
  vc::VerificationReport report;
  if (!o.presentation_file.empty()) {
    auto p = vc::Presentation::parse(trim(read_file(o.presentation_file)));
    report = vc::verify_presentation(s.net(), node, p, nonce_flag(o.nonce), did::Did::parse(o.audience));
  } else {
    if (o.credential_files.size() != 1) throw InputError("verify takes exactly one --credential or a --presentation");
    auto c = vc::Credential::parse(trim(read_file(o.credential_files.front())));
    std::optional<did::Did> expected;
    if (!o.subject.empty()) expected = did::Did::parse(o.subject);
    report = vc::verify_credential(s.net(), node, c, expected);
  }
  print(out, report.to_value());
  if (!report.accepted) {
    std::string failed;
    for (auto c : report.failed_checks()) failed += (failed.empty() ? "" : ",") + std::string("checks.") +
                                                    std::string(vc::to_string(c)) + " = fail";
    err << "verification rejected: " << failed << "\n";
    return kExitRejected;
  }
  return kExitOk;
}

int cmd_scenario_run(const Options& o, std::ostream& out, std::ostream& err) {
  auto rc = parse_run_config(read_file(o.config));
  if (o.run_seed) rc.scenario.seed = *o.run_seed;
  if (o.max_ticks) rc.scenario.max_ticks = *o.max_ticks;
  if (!o.out_path.empty()) rc.output.path = o.out_path;
  if (!o.format.empty()) rc.output.format = o.format;
  if (rc.output.format != "structured" && rc.output.format != "table") {
    throw ConfigError("--format must be 'structured' or 'table'");
  }

  auto run = scenario::run_scenario(rc.scenario);
  const auto& report = run.report;
  const std::string rendered = rc.output.format == "table" ? report.to_table() : report.to_structured();
  if (rc.output.path.empty()) {
    out << rendered;
  } else {
    write_file(rc.output.path, rendered);
  }
  if (!o.ledger_out.empty()) write_file(o.ledger_out, run.ledger_log);
  if (!o.messages_out.empty()) write_file(o.messages_out, run.message_log());
  out << summary_line(report) << "\n";

  if (report.outcome == scenario::Outcome::Failure) {
    err << "unexpected outcome: " << report.failure_reason << "\n";
    return kExitRejected;
  }
  const auto& expect = rc.scenario.expect;
  if (!expect.empty() && expect != scenario::to_string(report.outcome)) {
    err << "outcome " << scenario::to_string(report.outcome) << " does not match expected " << expect << "\n";
    return kExitRejected;
  }
  return kExitOk;
}

int cmd_scenario_template(const Options& o, std::ostream& out) {
  RunConfig rc;
  rc.scenario = scenario::default_config(o.scenario_name);
  out << format_run_config(rc) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sim6g: decentralized identity and credential toolkit with a simulated multi-operator ledger"};
  app.require_subcommand(1);
  Options o;

  auto* keygen = app.add_subcommand("keygen", "Derive a key pair from a 32-byte hex seed");
  keygen->add_option("--seed", o.seed, "32-byte seed, lowercase hex")->required();

  auto add_session = [&](CLI::App* c) {
    c->add_option("--state-dir", o.state_dir, "Persistent run directory");
    c->add_option("--config", o.config, "Run configuration providing the ledger nodes");
    c->add_option("--node", o.node, "Ledger node to act on (default: first node)");
  };

  auto* did_cmd = app.add_subcommand("did", "DID lifecycle operations");
  did_cmd->require_subcommand(1);
  auto* did_create = did_cmd->add_subcommand("create", "Create a DID from a key seed");
  auto* did_resolve = did_cmd->add_subcommand("resolve", "Resolve a DID at a node");
  auto* did_update = did_cmd->add_subcommand("update", "Commit a replacement document");
  auto* did_deactivate = did_cmd->add_subcommand("deactivate", "Deactivate a DID");
  for (auto* c : {did_create, did_resolve, did_update, did_deactivate}) add_session(c);
  did_create->add_option("--seed", o.seed, "32-byte key seed, hex")->required();
  for (auto* c : {did_resolve, did_update, did_deactivate}) c->add_option("--did", o.did, "Subject DID")->required();
  for (auto* c : {did_update, did_deactivate}) {
    c->add_option("--signer-seed", o.signer_seed, "Seed of the signing key")->required();
    c->add_option("--signer-key", o.signer_key, "Signer method reference or '#fragment'");
  }
  did_update->add_option("--doc", o.doc_file, "Replacement document (JSON)")->required();

  auto* tick_cmd = app.add_subcommand("tick", "Advance the simulated clock of a run directory");
  add_session(tick_cmd);
  tick_cmd->add_option("--n", o.ticks, "Number of ticks")->check(CLI::PositiveNumber);

  auto* vc_cmd = app.add_subcommand("vc", "Verifiable credential operations");
  vc_cmd->require_subcommand(1);
  auto* vc_issue = vc_cmd->add_subcommand("issue", "Issue a credential");
  auto* vc_verify = vc_cmd->add_subcommand("verify", "Verify a credential or presentation");
  auto* vc_present = vc_cmd->add_subcommand("present", "Build a presentation");
  auto* vc_revoke = vc_cmd->add_subcommand("revoke", "Revoke a status index");
  for (auto* c : {vc_issue, vc_verify, vc_present, vc_revoke}) add_session(c);
  for (auto* c : {vc_issue, vc_revoke}) {
    c->add_option("--issuer-seed", o.issuer_seed, "Issuer key seed")->required();
    c->add_option("--issuer-did", o.issuer_did, "Issuer DID (default: derived from the seed)");
    c->add_option("--issuer-key", o.issuer_key, "Issuer key fragment");
  }
  vc_issue->add_option("--subject", o.subject, "Subject DID")->required();
  vc_issue->add_option("--schema", o.schema, "Schema label")->required();
  vc_issue->add_option("--claims", o.claims, "Claims map as JSON");
  vc_issue->add_option("--from", o.valid_from, "valid_from_tick");
  vc_issue->add_option("--until", o.valid_until, "valid_until_tick")->required();
  vc_issue->add_flag("--with-status", o.with_status, "Allocate a revocation status entry");
  vc_revoke->add_option("--registry", o.registry, "Registry id (default: the issuer's)");
  vc_revoke->add_option("--index", o.index, "Status index")->required();
  vc_present->add_option("--holder-seed", o.holder_seed, "Holder key seed")->required();
  vc_present->add_option("--holder-did", o.holder_did, "Holder DID (default: derived from the seed)");
  vc_present->add_option("--holder-key", o.holder_key, "Holder key fragment");
  vc_present->add_option("--credential", o.credential_files, "Credential file(s)")->required();
  vc_present->add_option("--nonce", o.nonce, "16-byte challenge nonce, hex")->required();
  vc_present->add_option("--audience", o.audience, "Verifier DID")->required();
  vc_verify->add_option("--credential", o.credential_files, "Credential file");
  vc_verify->add_option("--presentation", o.presentation_file, "Presentation file");
  vc_verify->add_option("--subject", o.subject, "Expected subject DID");
  vc_verify->add_option("--nonce", o.nonce, "Expected nonce (presentations)");
  vc_verify->add_option("--audience", o.audience, "Expected audience (presentations)");

  auto* scen = app.add_subcommand("scenario", "Run the operator flows");
  scen->require_subcommand(1);
  auto* scen_run = scen->add_subcommand("run", "Run a scenario from a config file");
  scen_run->add_option("--config", o.config, "Run configuration")->required();
  scen_run->add_option("--seed", o.run_seed, "Override the config seed");
  scen_run->add_option("--ticks", o.max_ticks, "Tick budget");
  scen_run->add_option("--out", o.out_path, "Report path (default: stdout)");
  scen_run->add_option("--format", o.format, "structured | table");
  scen_run->add_option("--ledger-out", o.ledger_out, "Write the exported ledger log here");
  scen_run->add_option("--messages-out", o.messages_out, "Write the message log here");
  auto* scen_template = scen->add_subcommand("template", "Print a default config for a scenario");
  scen_template->add_option("--name", o.scenario_name, "Scenario name")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (keygen->parsed()) return cmd_keygen(o, out);
    if (did_cmd->parsed()) {
      for (auto* c : {did_create, did_resolve, did_update, did_deactivate}) {
        if (c->parsed()) return cmd_did(c->get_name(), o, out);
      }
    }
    if (tick_cmd->parsed()) return cmd_tick(o, out);
    if (vc_cmd->parsed()) {
      for (auto* c : {vc_issue, vc_verify, vc_present, vc_revoke}) {
        if (c->parsed()) return cmd_vc(c->get_name(), o, out, err);
      }
    }
    if (scen_run->parsed()) return cmd_scenario_run(o, out, err);
    if (scen_template->parsed()) return cmd_scenario_template(o, out);
  } catch (const AuthorizationError& e) {
    err << "authorization error: " << e.what() << "\n";
    return kExitRejected;
  } catch (const LifecycleError& e) {
    err << "lifecycle error: " << e.what() << "\n";
    return kExitRejected;
  } catch (const ConflictError& e) {
    err << "conflict error: " << e.what() << "\n";
    return kExitRejected;
  } catch (const NotFoundError& e) {
    err << e.what() << "\n";
    return kExitRejected;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace sim6g::cli
