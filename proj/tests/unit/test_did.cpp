#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "sim6g/errors.hpp"

using namespace sim6g;
using namespace sim6g::test;
using did::Did;
using did::OwnershipVerdict;

TEST(Did, ParseIsStrict) {
  auto d = Did::from_public_key(keypair(1).public_key);
  EXPECT_EQ(Did::parse(d.str()), d);
  EXPECT_THROW(Did::parse("did:other:abc"), InputError);
  EXPECT_THROW(Did::parse("did:sim6g:"), InputError);
  EXPECT_THROW(Did::parse(d.str() + "1"), InputError);
  EXPECT_THROW(Did::parse("did:sim6g:0OIl"), InputError);
  auto ref = did::MethodRef::parse(d.str() + "#key-0");
  EXPECT_EQ(ref.did, d);
  EXPECT_EQ(ref.fragment, "#key-0");
  EXPECT_THROW(did::MethodRef::parse(d.str()), InputError);
}

TEST(Did, CreateAndResolveRespectsDelay) {
  auto net = network();
  auto kp = keypair(1);
  auto created = did::create_did(net, "a", kp);
  EXPECT_EQ(created.did, Did::from_public_key(kp.public_key));
  EXPECT_EQ(created.document.version, 0u);
  ASSERT_TRUE(did::resolve(net, "a", created.did));
  EXPECT_FALSE(did::resolve(net, "b", created.did));
  net.tick(2);
  auto r = did::resolve(net, "b", created.did);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->document, created.document);
  EXPECT_FALSE(did::resolve(net, "c", created.did));
  EXPECT_THROW(did::create_did(net, "a", kp), ConflictError);
}

TEST(Did, DocumentRoundTrip) {
  auto net = network();
  auto doc = did::create_did(net, "a", keypair(1)).document;
  doc.services.push_back({"#gate", "RoamingGate", "sim://x"});
  auto v = doc.to_value();
  EXPECT_EQ(did::DidDocument::from_value(v), doc);
  auto extra = v;
  extra["name"] = "Alice";
  EXPECT_THROW(did::DidDocument::from_value(extra), InputError);
}

TEST(Did, UpdateRequiresAuthorizedSigner) {
  auto net = network();
  auto owner = wallet(keypair(1));
  auto stranger = wallet(keypair(2));
  auto doc = did::create_did(net, "a", owner.key("#key-0")->keypair).document;
  did::create_did(net, "a", stranger.key("#key-0")->keypair);

  auto body = doc;
  body.services.push_back({"#gate", "RoamingGate", "sim://x"});
  did::Signer forged{did::MethodRef{owner.did(), "#key-0"}, stranger.key("#key-0")->keypair.private_key};
  EXPECT_THROW(did::update_document(net, "a", owner.did(), body, forged), AuthorizationError);
  EXPECT_THROW(did::update_document(net, "a", owner.did(), body, signer(stranger)), AuthorizationError);

  auto r = did::update_document(net, "a", owner.did(), body, signer(owner));
  EXPECT_EQ(r.seq, 2u);
  auto res = did::resolve(net, "a", owner.did());
  EXPECT_EQ(res->version, 1u);
  EXPECT_EQ(res->document.services.size(), 1u);
  EXPECT_EQ(did::history(net.view("a"), owner.did()).size(), 2u);
}

TEST(Did, ControllerMayUpdate) {
  auto net = network();
  auto owner = wallet(keypair(1));
  auto ctl = wallet(keypair(2));
  auto doc = did::create_did(net, "a", owner.key("#key-0")->keypair).document;
  did::create_did(net, "a", ctl.key("#key-0")->keypair);
  doc.controller = ctl.did();
  did::update_document(net, "a", owner.did(), doc, signer(owner));
  auto next = did::resolve(net, "a", owner.did())->document;
  next.services.push_back({"#s", "T", "sim://y"});
  EXPECT_NO_THROW(did::update_document(net, "a", owner.did(), next, signer(ctl)));
}

TEST(Did, UpdateRejectsInvalidBodies) {
  auto net = network();
  auto owner = wallet(keypair(1));
  auto doc = did::create_did(net, "a", owner.key("#key-0")->keypair).document;
  auto no_auth = doc;
  no_auth.verification_methods[0].purposes = {did::Purpose::Assertion};
  EXPECT_THROW(did::update_document(net, "a", owner.did(), no_auth, signer(owner)), InputError);
  auto dup = doc;
  dup.verification_methods.push_back(dup.verification_methods[0]);
  EXPECT_THROW(did::update_document(net, "a", owner.did(), dup, signer(owner)), InputError);
  EXPECT_THROW(did::update_document(net, "a", Did::from_public_key(keypair(9).public_key), doc, signer(owner)),
               NotFoundError);
}

TEST(Did, DeactivationIsTerminal) {
  auto net = network();
  auto owner = wallet(keypair(1));
  auto doc = did::create_did(net, "a", owner.key("#key-0")->keypair).document;
  did::deactivate(net, "a", owner.did(), signer(owner));
  auto r = did::resolve(net, "a", owner.did());
  EXPECT_TRUE(r->deactivated);
  EXPECT_EQ(r->version, 1u);
  EXPECT_THROW(did::update_document(net, "a", owner.did(), doc, signer(owner)), LifecycleError);
  EXPECT_THROW(did::deactivate(net, "a", owner.did(), signer(owner)), LifecycleError);
}

TEST(Did, OwnershipChallengeVerdicts) {
  auto net = network();
  auto subject = wallet(keypair(1));
  auto verifier = wallet(keypair(2));
  auto subj_kp = subject.key("#key-0")->keypair;
  did::create_did(net, "a", subj_kp);
  did::ChallengeBook book(verifier.did());

  auto ch = book.make_challenge(subject.did(), net.clock(), 3, 42);
  auto resp = did::respond_to_challenge(subj_kp, "#key-0", ch);
  EXPECT_EQ(book.verify_ownership(net, "a", subject.did(), ch, resp), OwnershipVerdict::Accept);
  EXPECT_EQ(book.verify_ownership(net, "a", subject.did(), ch, resp), OwnershipVerdict::Replayed);

  ch = book.make_challenge(subject.did(), net.clock(), 3, 43);
  resp = did::respond_to_challenge(keypair(7), "#key-0", ch);
  EXPECT_EQ(book.verify_ownership(net, "a", subject.did(), ch, resp), OwnershipVerdict::BadSignature);

  ch = book.make_challenge(subject.did(), net.clock(), 3, 44);
  resp = did::respond_to_challenge(subj_kp, "#key-9", ch);
  EXPECT_EQ(book.verify_ownership(net, "a", subject.did(), ch, resp), OwnershipVerdict::NoMatchingKey);

  ch = book.make_challenge(subject.did(), net.clock(), 2, 45);
  resp = did::respond_to_challenge(subj_kp, "#key-0", ch);
  net.tick(2);
  EXPECT_EQ(book.verify_ownership(net, "a", subject.did(), ch, resp), OwnershipVerdict::Expired);

  ch = book.make_challenge(subject.did(), net.clock(), 3, 46);
  resp = did::respond_to_challenge(subj_kp, "#key-0", ch);
  EXPECT_EQ(book.verify_ownership(net, "c", subject.did(), ch, resp), OwnershipVerdict::UnknownDid);

  did::deactivate(net, "a", subject.did(), signer(subject));
  ch = book.make_challenge(subject.did(), net.clock(), 3, 47);
  resp = did::respond_to_challenge(subj_kp, "#key-0", ch);
  EXPECT_EQ(book.verify_ownership(net, "a", subject.did(), ch, resp), OwnershipVerdict::Deactivated);

  EXPECT_THROW(book.make_challenge(subject.did(), 0, 0, 1), InputError);
  EXPECT_EQ(did::to_string(OwnershipVerdict::NoMatchingKey), "no-matching-key");
}

TEST(Did, ChallengeBoundToAudience) {
  auto net = network();
  auto subject = wallet(keypair(1));
  auto subj_kp = subject.key("#key-0")->keypair;
  did::create_did(net, "a", subj_kp);
  did::ChallengeBook mine(Did::from_public_key(keypair(2).public_key));
  did::ChallengeBook theirs(Did::from_public_key(keypair(3).public_key));
  auto ch = theirs.make_challenge(subject.did(), 0, 5, 1);
  auto resp = did::respond_to_challenge(subj_kp, "#key-0", ch);
  EXPECT_EQ(mine.verify_ownership(net, "a", subject.did(), ch, resp), OwnershipVerdict::Replayed);
  EXPECT_EQ(theirs.verify_ownership(net, "a", subject.did(), ch, resp), OwnershipVerdict::Accept);
}
