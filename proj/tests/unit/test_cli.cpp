#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sim6g/cli.hpp"
#include "sim6g/errors.hpp"

using namespace sim6g;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string seed(char c) { return std::string(64, c); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sim6g-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }
  std::string state() const { return path("state"); }

  std::string did_of(char c) {
    auto r = invoke({"did", "create", "--state-dir", state(), "--seed", seed(c)});
    EXPECT_EQ(r.code, 0) << r.err;
    return parse_value(r.out)["did"].get<std::string>();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, KeygenAndSeedErrors) {
  auto r = invoke({"keygen", "--seed", std::string(64, '0')});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out,
            "{\"public_key\":\"3b6a27bcceb6a42d62a3a8d02a6f0d73653215771de243a63ac048a18b59da29\","
            "\"suite_id\":\"Ed25519Sim6g\"}\n");
  auto bad = invoke({"keygen", "--seed", "abc"});
  EXPECT_EQ(bad.code, cli::kExitInput);
  EXPECT_NE(bad.err.find("--seed"), std::string::npos);
  EXPECT_EQ(invoke({"frobnicate"}).code, cli::kExitInput);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(Cli, DidLifecycleThroughStateDir) {
  auto d = did_of('1');
  auto r = invoke({"did", "resolve", "--state-dir", state(), "--did", d});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = parse_value(r.out)["document"];
  doc["services"] = Value::array({{{"id", "#gate"}, {"type", "RoamingGate"}, {"endpoint", "sim://x"}}});
  auto file = write("doc.json", doc.dump());
  r = invoke({"did", "update", "--state-dir", state(), "--did", d, "--doc", file, "--signer-seed", seed('2')});
  EXPECT_EQ(r.code, cli::kExitRejected);
  EXPECT_NE(r.err.find("authorization"), std::string::npos);
  r = invoke({"did", "update", "--state-dir", state(), "--did", d, "--doc", file, "--signer-seed", seed('1')});
  EXPECT_EQ(r.code, 0) << r.err;
  r = invoke({"did", "deactivate", "--state-dir", state(), "--did", d, "--signer-seed", seed('1')});
  EXPECT_EQ(r.code, 0) << r.err;
  r = invoke({"did", "deactivate", "--state-dir", state(), "--did", d, "--signer-seed", seed('1')});
  EXPECT_EQ(r.code, cli::kExitRejected);
  r = invoke({"did", "resolve", "--state-dir", state(), "--did", d});
  EXPECT_EQ(parse_value(r.out)["metadata"]["version"], 2);
  EXPECT_EQ(invoke({"did", "create", "--state-dir", state(), "--seed", seed('1')}).code, cli::kExitRejected);
  EXPECT_EQ(invoke({"did", "resolve", "--did", "not-a-did"}).code, cli::kExitInput);
}

TEST_F(Cli, DelayedNodeViaConfigAndTick) {
  auto tmpl = invoke({"scenario", "template", "--name", "roaming_access"});
  auto cfg = write("cfg.json", tmpl.out);
  auto r = invoke({"did", "create", "--state-dir", state(), "--config", cfg, "--seed", seed('1')});
  ASSERT_EQ(r.code, 0) << r.err;
  auto d = parse_value(r.out)["did"].get<std::string>();
  r = invoke({"did", "resolve", "--state-dir", state(), "--node", "node-visited", "--did", d});
  EXPECT_EQ(r.code, cli::kExitRejected);
  EXPECT_NE(r.err.find("not-found"), std::string::npos);
  EXPECT_EQ(invoke({"tick", "--state-dir", state(), "--n", "2"}).code, 0);
  EXPECT_EQ(invoke({"did", "resolve", "--state-dir", state(), "--node", "node-visited", "--did", d}).code, 0);
}

TEST_F(Cli, CredentialIssueVerifyRevoke) {
  did_of('1');
  auto holder = did_of('2');
  auto verifier = did_of('3');
  auto r = invoke({"vc", "issue", "--state-dir", state(), "--issuer-seed", seed('1'), "--subject", holder, "--schema",
                "AccessPermission", "--claims", R"({"plmn":"001-01"})", "--until", "50", "--with-status"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto cred = write("cred.json", r.out);
  r = invoke({"vc", "verify", "--state-dir", state(), "--credential", cred});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_value(r.out)["outcome"], "accept");

  const std::string nonce(32, 'a');
  r = invoke({"vc", "present", "--state-dir", state(), "--holder-seed", seed('2'), "--credential", cred, "--nonce",
           nonce, "--audience", verifier});
  ASSERT_EQ(r.code, 0) << r.err;
  auto pres = write("pres.json", r.out);
  EXPECT_EQ(invoke({"vc", "verify", "--state-dir", state(), "--presentation", pres, "--nonce", nonce, "--audience",
                 verifier})
                .code,
            0);
  r = invoke({"vc", "verify", "--state-dir", state(), "--presentation", pres, "--nonce", std::string(32, 'b'),
           "--audience", verifier});
  EXPECT_EQ(r.code, cli::kExitRejected);
  EXPECT_NE(r.err.find("holder_binding"), std::string::npos);

  r = invoke({"vc", "revoke", "--state-dir", state(), "--issuer-seed", seed('1'), "--index", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  r = invoke({"vc", "verify", "--state-dir", state(), "--credential", cred});
  EXPECT_EQ(r.code, cli::kExitRejected);
  EXPECT_NE(r.err.find("checks.status = fail"), std::string::npos);

  // Status indices persist across invocations.
  r = invoke({"vc", "issue", "--state-dir", state(), "--issuer-seed", seed('1'), "--subject", holder, "--schema",
           "AccessPermission", "--until", "50", "--with-status"});
  EXPECT_EQ(parse_value(r.out)["status"]["index"], 1);
  EXPECT_EQ(invoke({"vc", "issue", "--state-dir", state(), "--issuer-seed", seed('1'), "--subject", holder,
                 "--schema", "X", "--from", "9", "--until", "5"})
                .code,
            cli::kExitInput);
}

TEST_F(Cli, ScenarioRunOutputs) {
  auto cfg = write("cfg.json", invoke({"scenario", "template", "--name", "ipx_alteration"}).out);
  auto r = invoke({"scenario", "run", "--config", cfg, "--out", path("report.json"), "--ledger-out", path("ledger.log"),
                "--messages-out", path("messages.log")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("outcome=success"), std::string::npos);
  EXPECT_TRUE(fs::file_size(path("report.json")) > 0);
  EXPECT_TRUE(fs::file_size(path("ledger.log")) > 0);
  EXPECT_TRUE(fs::file_size(path("messages.log")) > 0);
  r = invoke({"scenario", "run", "--config", cfg, "--format", "table"});
  EXPECT_NE(r.out.find("link class"), std::string::npos);
  EXPECT_EQ(invoke({"scenario", "run", "--config", cfg, "--format", "xml"}).code, cli::kExitInput);
  EXPECT_EQ(invoke({"scenario", "run", "--config", path("missing.json")}).code, cli::kExitInput);
}

TEST_F(Cli, ExpectMismatchExitsOne) {
  auto rc = cli::parse_run_config(invoke({"scenario", "template", "--name", "nf_authorization"}).out);
  rc.scenario.params = {{"variant", "expired"}};
  rc.scenario.expect = "success";
  auto cfg = write("cfg.json", cli::format_run_config(rc));
  auto r = invoke({"scenario", "run", "--config", cfg});
  EXPECT_EQ(r.code, cli::kExitRejected);
  rc.scenario.expect = "expected_denial";
  cfg = write("cfg.json", cli::format_run_config(rc));
  EXPECT_EQ(invoke({"scenario", "run", "--config", cfg}).code, 0);
}

TEST_F(Cli, ConfigErrorsNameTheOffender) {
  auto v = parse_value(invoke({"scenario", "template", "--name", "roaming_access"}).out);
  v["actors"][2]["node_id"] = "node-mars";
  auto r = invoke({"scenario", "run", "--config", write("cfg.json", v.dump())});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("subscriber"), std::string::npos) << r.err;
  v = parse_value(invoke({"scenario", "template", "--name", "roaming_access"}).out);
  v["config_version"] = 99;
  EXPECT_EQ(invoke({"scenario", "run", "--config", write("cfg.json", v.dump())}).code, cli::kExitInput);
  v = parse_value(invoke({"scenario", "template", "--name", "roaming_access"}).out);
  v["surprise"] = 1;
  EXPECT_EQ(invoke({"scenario", "run", "--config", write("cfg.json", v.dump())}).code, cli::kExitInput);
}

TEST_F(Cli, ConfigRoundTrip) {
  for (auto name : {"roaming_access", "location_attestation"}) {
    auto text = invoke({"scenario", "template", "--name", name}).out;
    auto rc = cli::parse_run_config(text);
    EXPECT_EQ(cli::format_run_config(rc) + "\n", text);
  }
}

TEST_F(Cli, MalformedConfigsAlwaysExitTwo) {
  const auto text = invoke({"scenario", "template", "--name", "roaming_access"}).out;
  std::mt19937_64 rng(17);
  int parsed_ok = 0;
  for (int i = 0; i < 300; ++i) {
    auto mutated = text;
    switch (i % 3) {
      case 0: mutated[rng() % mutated.size()] = static_cast<char>(rng() % 128); break;
      case 1: mutated.erase(rng() % mutated.size(), 1 + rng() % 20); break;
      default: mutated.insert(rng() % mutated.size(), std::string(1, "{}[],:\"0a-"[rng() % 10])); break;
    }
    auto cfg = write("fuzz.json", mutated);
    auto r = invoke({"scenario", "run", "--config", cfg});
    if (r.code == 0) {
      ++parsed_ok;
      continue;
    }
    ASSERT_TRUE(r.code == cli::kExitInput || r.code == cli::kExitRejected) << r.err;
    if (r.code == cli::kExitRejected) {
      // Only a config that still parsed may yield a scenario-level outcome.
      EXPECT_NO_THROW(cli::parse_run_config(mutated));
    }
  }
  EXPECT_LT(parsed_ok, 300);
}
