#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "sim6g/errors.hpp"

using namespace sim6g;
using namespace sim6g::test;
using vc::Check;
using vc::CheckResult;

namespace {

struct World {
  ledger::LedgerNetwork net = network();
  vc::Wallet issuer = wallet(keypair(1));
  vc::Wallet holder = wallet(keypair(2));
  vc::Wallet verifier = wallet(keypair(3));

  World() {
    for (auto* w : {&issuer, &holder, &verifier}) did::create_did(net, "a", w->key("#key-0")->keypair);
    net.tick(5);
  }

  vc::Credential issue(bool with_status = true, ledger::Tick from = 0, ledger::Tick until = 100) {
    return vc::issue(net, "a", issuer,
                     {holder.did(), std::string(vc::schema::kAccessPermission), Value{{"plmn", "001-01"}}, from,
                      until, with_status});
  }
};

std::vector<Check> failed(const vc::VerificationReport& r) { return r.failed_checks(); }

}  // namespace

TEST(Vc, IssueAndVerify) {
  World w;
  auto c = w.issue();
  EXPECT_EQ(c.credential_id, vc::credential_id_of(c));
  EXPECT_EQ(c.status->registry_id, vc::registry_id_for(w.issuer.did()));
  EXPECT_EQ(c.status->index, 0u);
  EXPECT_EQ(w.issue().status->index, 1u);
  auto r = vc::verify_credential(w.net, "a", c, w.holder.did());
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(r.check(Check::HolderBinding), CheckResult::Skipped);
  EXPECT_EQ(r.check(Check::Status), CheckResult::Pass);
  EXPECT_EQ(r.ledger_reads, 2u);
  EXPECT_EQ(r.to_value()["outcome"], "accept");
}

TEST(Vc, SerializationRoundTrip) {
  World w;
  auto c = w.issue();
  EXPECT_EQ(vc::Credential::parse(c.serialize()), c);
  auto p = vc::present(w.holder, {c}, did::nonce_from_seed(1), w.verifier.did());
  EXPECT_EQ(vc::Presentation::parse(p.serialize()).serialize(), p.serialize());
  EXPECT_THROW(vc::present(w.holder, {}, did::nonce_from_seed(1), w.verifier.did()), InputError);
}

TEST(Vc, ClaimsNeverReachLedger) {
  World w;
  auto c = vc::issue(w.net, "a", w.issuer,
                     {w.holder.did(), "LocationAttestation", Value{{"cell", "secret-cell-77"}}, 0, 10, true});
  EXPECT_EQ(w.net.export_log().find("secret-cell-77"), std::string::npos);
  EXPECT_EQ(w.net.export_log().find(c.credential_id), std::string::npos);
}

TEST(Vc, IssueRejectsBadRequests) {
  World w;
  EXPECT_THROW(w.issue(true, 10, 5), InputError);
  vc::Wallet stranger(w.issuer.did());
  stranger.add_key("#key-0", keypair(9), {did::Purpose::Assertion});
  EXPECT_ANY_THROW(vc::issue(w.net, "a", stranger, {w.holder.did(), "X", Value::object(), 0, 1, false}));
}

TEST(Vc, TamperedCredentialFailsIssuerSignature) {
  World w;
  auto c = w.issue();
  c.claims["plmn"] = "999-99";
  EXPECT_EQ(failed(vc::verify_credential(w.net, "a", c)), std::vector<Check>{Check::IssuerSignature});
  c = w.issue();
  c.valid_until_tick = 1000;
  EXPECT_EQ(failed(vc::verify_credential(w.net, "a", c)), std::vector<Check>{Check::IssuerSignature});
}

TEST(Vc, TimeWindowIsInclusive) {
  World w;
  auto c = w.issue(false, w.net.clock(), w.net.clock() + 2);
  EXPECT_TRUE(vc::verify_credential(w.net, "a", c).accepted);
  w.net.tick(2);
  EXPECT_TRUE(vc::verify_credential(w.net, "a", c).accepted);
  w.net.tick();
  EXPECT_EQ(failed(vc::verify_credential(w.net, "a", c)), std::vector<Check>{Check::TimeWindow});
  auto future = w.issue(false, w.net.clock() + 5, w.net.clock() + 9);
  EXPECT_EQ(failed(vc::verify_credential(w.net, "a", future)), std::vector<Check>{Check::TimeWindow});
}

TEST(Vc, RevocationPropagatesPerNode) {
  World w;
  auto c = w.issue();
  w.net.tick(5);
  auto r = vc::revoke(w.net, "a", w.issuer, *c.status);
  EXPECT_EQ(vc::check_status(w.net, "a", *c.status), vc::StatusResult::Revoked);
  EXPECT_EQ(vc::check_status(w.net, "c", *c.status), vc::StatusResult::Active);
  EXPECT_TRUE(vc::verify_credential(w.net, "c", c).accepted);
  w.net.tick(5);
  EXPECT_EQ(w.net.clock(), r.commit_tick + 5);
  EXPECT_EQ(failed(vc::verify_credential(w.net, "c", c)), std::vector<Check>{Check::Status});
  EXPECT_THROW(vc::revoke(w.net, "a", w.issuer, *c.status), ConflictError);
  auto state = vc::registry_state(w.net.view("a"), c.status->registry_id);
  ASSERT_TRUE(state);
  EXPECT_EQ(state->revoked, std::vector<std::uint64_t>{0});
}

TEST(Vc, RegistryRules) {
  World w;
  auto c = w.issue();
  EXPECT_THROW(vc::revoke(w.net, "a", w.holder, *c.status), AuthorizationError);
  EXPECT_THROW(vc::revoke(w.net, "a", w.holder, {vc::registry_id_for(w.holder.did()), 0}), InputError);
  EXPECT_EQ(vc::check_status(w.net, "a", {"did:sim6g:none/revocation", 0}), vc::StatusResult::UnknownRegistry);
}

TEST(Vc, PresentationChecks) {
  World w;
  auto c = w.issue();
  auto nonce = did::nonce_from_seed(7);
  auto p = vc::present(w.holder, {c}, nonce, w.verifier.did());
  auto ok = vc::verify_presentation(w.net, "a", p, nonce, w.verifier.did());
  EXPECT_TRUE(ok.accepted);
  EXPECT_EQ(ok.check(Check::HolderBinding), CheckResult::Pass);
  EXPECT_EQ(ok.check(Check::SubjectMatch), CheckResult::Pass);
  EXPECT_EQ(ok.credentials.size(), 1u);

  auto wrong_nonce = vc::verify_presentation(w.net, "a", p, did::nonce_from_seed(8), w.verifier.did());
  EXPECT_EQ(failed(wrong_nonce), std::vector<Check>{Check::HolderBinding});
  EXPECT_EQ(wrong_nonce.check(Check::IssuerSignature), CheckResult::Skipped);
  auto wrong_aud = vc::verify_presentation(w.net, "a", p, nonce, w.issuer.did());
  EXPECT_EQ(failed(wrong_aud), std::vector<Check>{Check::HolderBinding});

  // Someone else's credential presented by a valid holder.
  auto other = vc::present(w.verifier, {c}, nonce, w.issuer.did());
  EXPECT_EQ(failed(vc::verify_presentation(w.net, "a", other, nonce, w.issuer.did())),
            std::vector<Check>{Check::SubjectMatch});
}

TEST(Vc, DeactivatedIssuerFailsOnlyIssuerActive) {
  World w;
  auto c = w.issue(false);
  did::deactivate(w.net, "a", w.issuer.did(), signer(w.issuer));
  EXPECT_EQ(failed(vc::verify_credential(w.net, "a", c)), std::vector<Check>{Check::IssuerActive});
  EXPECT_TRUE(vc::verify_credential(w.net, "c", c).accepted);
}

TEST(Vc, WalletSignerFollowsDocument) {
  World w;
  auto doc = did::resolve(w.net, "a", w.issuer.did())->document;
  EXPECT_TRUE(w.issuer.signer_for(did::Purpose::Assertion, &doc));
  doc.verification_methods[0].purposes = {did::Purpose::Authentication};
  EXPECT_FALSE(w.issuer.signer_for(did::Purpose::Assertion, &doc));
}
