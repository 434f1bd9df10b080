#include "harness.hpp"

#include <algorithm>

#include "sim6g/errors.hpp"

namespace sim6g::scenario::detail {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string clone_seed(const std::string& template_seed_hex, std::uint64_t index) {
  Bytes buf = hex_decode(template_seed_hex);
  for (int b = 0; b < 8; ++b) buf.push_back(static_cast<std::uint8_t>(index >> (8 * b)));
  return crypto::content_id(buf).hex();
}

}  // namespace

Params::Params(const Value& params, std::initializer_list<std::string_view> allowed) : params_(params) {
  if (!params_.is_object()) throw ConfigError("scenario params must be a map");
  for (const auto& [key, _] : params_.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown scenario parameter '" + key + "'");
    }
  }
}

const Value* Params::raw(std::string_view key) const {
  auto it = params_.find(std::string(key));
  return it == params_.end() ? nullptr : &*it;
}

std::uint64_t Params::uint(std::string_view key, std::uint64_t fallback) const {
  return optional_uint(key).value_or(fallback);
}

std::optional<std::uint64_t> Params::optional_uint(std::string_view key) const {
  const Value* v = raw(key);
  if (v == nullptr || v->is_null()) return std::nullopt;
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_number_integer() && v->get<std::int64_t>() >= 0) return v->get<std::uint64_t>();
  throw ConfigError("parameter '" + std::string(key) + "' must be a non-negative integer");
}

bool Params::flag(std::string_view key, bool fallback) const {
  const Value* v = raw(key);
  if (v == nullptr) return fallback;
  if (!v->is_boolean()) throw ConfigError("parameter '" + std::string(key) + "' must be a boolean");
  return v->get<bool>();
}

std::string Params::string(std::string_view key, std::string_view fallback) const {
  const Value* v = raw(key);
  if (v == nullptr) return std::string(fallback);
  if (!v->is_string()) throw ConfigError("parameter '" + std::string(key) + "' must be a string");
  return v->get<std::string>();
}

Harness::Harness(const ScenarioConfig& config, std::string_view scenario_name, bool with_ledger)
    : config_(config), name_(scenario_name), net_(config.nodes, config.seed) {
  validate(config_);
  if (with_ledger) {
    did::install_validators(net_);
    vc::install_validators(net_);
  }
  for (const auto& spec : config_.actors) {
    Actor a;
    a.spec = spec;
    a.key = crypto::keypair_from_hex(spec.key_seed_hex);
    a.wallet.set_did(did::Did::from_public_key(a.key.public_key));
    a.wallet.add_key(std::string(did::kInitialKeyFragment), a.key,
                     {did::Purpose::Authentication, did::Purpose::Assertion});
    actors_.push_back(std::move(a));
  }
}

bool Harness::has(Role role) const {
  return std::any_of(actors_.begin(), actors_.end(), [&](const Actor& a) { return a.spec.role == role; });
}

Actor& Harness::one(Role role) {
  for (auto& a : actors_) {
    if (a.spec.role == role) return a;
  }
  throw ConfigError("scenario " + name_ + " needs an actor with role " + std::string(to_string(role)));
}

std::vector<Actor*> Harness::all(Role role) {
  std::vector<Actor*> out;
  for (auto& a : actors_) {
    if (a.spec.role == role) out.push_back(&a);
  }
  return out;
}

std::vector<Actor*> Harness::expand(Role role, std::uint64_t count) {
  if (count < 1) throw ConfigError("actor count for " + std::string(to_string(role)) + " must be at least 1");
  Actor& tmpl = one(role);
  std::vector<Actor*> out{&tmpl};
  const ActorSpec base = tmpl.spec;
  for (std::uint64_t i = 1; i < count; ++i) {
    Actor a;
    a.spec = base;
    a.spec.actor_id = base.actor_id + "-" + std::to_string(i);
    a.spec.key_seed_hex = clone_seed(base.key_seed_hex, i);
    a.key = crypto::keypair_from_hex(a.spec.key_seed_hex);
    a.wallet.set_did(did::Did::from_public_key(a.key.public_key));
    a.wallet.add_key(std::string(did::kInitialKeyFragment), a.key,
                     {did::Purpose::Authentication, did::Purpose::Assertion});
    actors_.push_back(std::move(a));
    out.push_back(&actors_.back());
  }
  return out;
}

void Harness::create_did(Actor& actor) {
  try {
    did::create_did(net_, actor.node(), actor.key);
  } catch (const ConflictError&) {
    throw ConfigError("actor " + actor.id() + " reuses another actor's key seed");
  }
}

void Harness::create_dids() {
  for (auto& a : actors_) create_did(a);
}

bool Harness::can_advance(ledger::Tick n) const { return net_.clock() + n <= config_.max_ticks; }

void Harness::advance(ledger::Tick n) {
  if (!can_advance(n)) {
    throw ConfigError("tick budget of " + std::to_string(config_.max_ticks) + " exhausted");
  }
  net_.tick(n);
}

void Harness::sync() {
  if (auto d = net_.max_delay(); d > 0) advance(d);
}

void Harness::send(const Actor& from, const Actor& to, LinkClass link, std::string payload_kind) {
  if (!measuring_) {
    ++setup_messages_;
    return;
  }
  messages_.push_back({from.id(), to.id(), link, std::move(payload_kind), net_.clock()});
}

void Harness::ledger_reads(const Actor& reader, std::size_t count, std::string_view payload_kind) {
  if (!measuring_) return;
  for (std::size_t i = 0; i < count; ++i) {
    messages_.push_back({reader.id(), "ledger:" + reader.node(), LinkClass::LedgerLocalRead,
                         std::string(payload_kind), net_.clock()});
  }
}

void Harness::begin_access() {
  measuring_ = true;
  size_before_ = net_.log_size();
}

void Harness::end_access() {
  measuring_ = false;
  size_after_ = net_.log_size();
}

std::string Harness::plant_sentinel() {
  Value seed_material{{"scenario", name_}, {"seed", config_.seed}, {"n", sentinels_.size()}};
  auto token = "sentinel-" + canonical_digest(seed_material).hex().substr(0, 20);
  sentinels_.push_back(token);
  return token;
}

std::uint64_t Harness::next_rng() { return splitmix64(config_.seed ^ splitmix64(++rng_counter_)); }

did::DidDocument Harness::resolve_at(const Actor& reader, const did::Did& subject) {
  auto r = did::resolve(net_, reader.node(), subject);
  if (!r) throw ConfigError(subject.str() + " is not resolvable at node " + reader.node());
  return std::move(r->document);
}

void Harness::add_report(const Actor& verifier, const Actor& subject, std::string_view kind, Value report) {
  reports_.push_back(Value{{"verifier", verifier.id()},
                           {"subject", subject.id()},
                           {"kind", std::string(kind)},
                           {"tick", net_.clock()},
                           {"report", std::move(report)}});
}

ScenarioRun Harness::finish(Outcome outcome, std::string failure_reason) {
  if (measuring_) end_access();
  ScenarioRun run;
  auto& r = run.report;
  r.scenario_name = name_;
  r.outcome = outcome;
  r.failure_reason = std::move(failure_reason);
  for (auto c : {LinkClass::TerminalVisited, LinkClass::VisitedHome, LinkClass::IntraCore,
                 LinkClass::LedgerLocalRead, LinkClass::OttLink}) {
    r.message_counts[c] = 0;
  }
  for (const auto& m : messages_) ++r.message_counts[m.link_class];
  r.ticks_elapsed = net_.clock();
  r.seed = config_.seed;
  r.verification_reports = std::move(reports_);
  metrics_["setup_messages"] = setup_messages_;
  metrics_["ledger_transactions"] = net_.log_size();
  r.metrics = std::move(metrics_);

  run.ledger_log = net_.export_log();
  run.messages = std::move(messages_);
  run.planted_sentinels = std::move(sentinels_);
  run.ledger_size_before_access = size_before_;
  run.ledger_size_after_access = size_after_;
  return run;
}

Attempt edge_access(Harness& h, Actor& verifier, Actor& holder, const vc::Credential& credential,
                    LinkClass link, std::string_view kind) {
  const std::string k(kind);
  auto nonce = did::nonce_from_seed(h.next_rng());
  h.send(verifier, holder, link, k + "_challenge");
  auto presentation = vc::present(holder.wallet, {credential}, nonce, verifier.did());
  h.send(holder, verifier, link, k + "_presentation");

  auto report = vc::verify_presentation(h.net(), verifier.node(), presentation, nonce, verifier.did());
  h.ledger_reads(verifier, report.ledger_reads, k + "_lookup");
  h.send(verifier, holder, link, k + "_decision");

  Attempt a;
  a.tick = h.now();
  a.accepted = report.accepted;
  a.failed = report.failed_checks();
  a.reason = describe(a.failed);
  h.add_report(verifier, holder, kind, report.to_value());
  return a;
}

std::string describe(const std::vector<vc::Check>& failed) {
  std::string out;
  for (auto c : failed) {
    if (!out.empty()) out += ",";
    out += std::string(vc::to_string(c));
  }
  return out;
}

std::string check_denial_law(const std::vector<Attempt>& attempts, ledger::Tick boundary,
                             const std::vector<vc::Check>& expected_failure) {
  bool denied = false;
  for (const auto& a : attempts) {
    if (a.tick < boundary && !a.accepted) {
      return "denied at tick " + std::to_string(a.tick) + " before boundary " + std::to_string(boundary) +
             " (" + a.reason + ")";
    }
    if (a.tick >= boundary) {
      if (a.accepted) return "accepted at tick " + std::to_string(a.tick) + " after boundary";
      if (a.failed != expected_failure) {
        return "denied for '" + a.reason + "' instead of '" + describe(expected_failure) + "'";
      }
      denied = true;
    }
  }
  if (!denied) return "no denial observed by tick " + std::to_string(attempts.empty() ? 0 : attempts.back().tick);
  return {};
}

}  // namespace sim6g::scenario::detail
