#pragma once

#include <cstdint>
#include <string>

#include "sim6g/crypto.hpp"
#include "sim6g/did.hpp"
#include "sim6g/ledger.hpp"
#include "sim6g/vc.hpp"

namespace sim6g::test {

/// Seed bytes i, i+1, ... (mod 256).
inline crypto::KeyPair keypair(std::uint8_t i) {
  Bytes seed(crypto::kSeedSize);
  for (std::size_t k = 0; k < seed.size(); ++k) seed[k] = static_cast<std::uint8_t>(i + k);
  return crypto::generate_keypair(seed);
}

inline ledger::LedgerNetwork network(std::vector<ledger::NodeConfig> nodes = {{"a", 0}, {"b", 2}, {"c", 5}}) {
  ledger::LedgerNetwork net(std::move(nodes), 1);
  did::install_validators(net);
  vc::install_validators(net);
  return net;
}

/// Wallet holding `kp` as #key-0 with both purposes.
inline vc::Wallet wallet(const crypto::KeyPair& kp) {
  vc::Wallet w(did::Did::from_public_key(kp.public_key));
  w.add_key("#key-0", kp, {did::Purpose::Authentication, did::Purpose::Assertion});
  return w;
}

inline did::Signer signer(const vc::Wallet& w, std::string fragment = "#key-0") {
  return {did::MethodRef{w.did(), fragment}, w.key(fragment)->keypair.private_key};
}

}  // namespace sim6g::test
