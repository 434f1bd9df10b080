#!/usr/bin/env python3
"""Independent oracle for the crypto and did tests.

Uses the `cryptography` package (OpenSSL Ed25519) and hashlib, never the
C++ code under test. Regenerates tests/data/ed25519_vectors.txt and prints
the frozen values embedded in the unit tests.
"""
import hashlib
import json
import os
import sys

from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey
from cryptography.hazmat.primitives import serialization

B58 = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"

RFC8032 = [
    ("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60", "",
     "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e065224901555fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b"),
    ("4ccd089b28ff96da9db6c346ec114e0f5b8a319f35aba624da8cf6ed4fb8a6fb", "72",
     "92a009a9f0d4cab8720e820b5f642540a2b27b5416503f8fb3762223ebdb69da085ac1e43e15996e458f3613d0f11d8c387b2eaeb4302aeeb00d291612bb0c00"),
    ("c5aa8df43f9f837bedb7442f31dcb7b166d38535076f094b85ce3a2e0b4458f7", "af82",
     "6291d657deec24024827e69c3abe01a30ce548a284743a445e3680d7db5ac3ac18ff9b538d16f290ae67f760984dc6594a7c15e9716ed28dc027beceea1ec40a"),
]


def b58(data: bytes) -> str:
    n = int.from_bytes(data, "big")
    out = ""
    while n:
        n, r = divmod(n, 58)
        out = B58[r] + out
    zeros = len(data) - len(data.lstrip(b"\0"))
    return "1" * zeros + out


def pub(seed: bytes) -> bytes:
    return Ed25519PrivateKey.from_private_bytes(seed).public_key().public_bytes(
        serialization.Encoding.Raw, serialization.PublicFormat.Raw)


def sign(seed: bytes, msg: bytes) -> bytes:
    return Ed25519PrivateKey.from_private_bytes(seed).sign(msg)


def canonical(v) -> bytes:
    return json.dumps(v, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode()


def main():
    out_path = os.path.join(os.path.dirname(__file__), "..", "data", "ed25519_vectors.txt")
    lines = []
    for seed_hex, msg_hex, sig_hex in RFC8032:
        got = sign(bytes.fromhex(seed_hex), bytes.fromhex(msg_hex)).hex()
        assert got == sig_hex, "RFC 8032 vector mismatch"
        lines.append(f"{seed_hex}\t{msg_hex}\t{sig_hex}")
    rng_state = hashlib.sha256(b"sim6g-vectors").digest()
    for i in range(29):
        rng_state = hashlib.sha256(rng_state).digest()
        seed = rng_state
        msg = hashlib.sha512(rng_state + b"msg").digest()[: (i * 7) % 64]
        lines.append(f"{seed.hex()}\t{msg.hex()}\t{sign(seed, msg).hex()}")
    with open(out_path, "w") as f:
        f.write("# seed_hex<TAB>message_hex<TAB>signature_hex\n")
        f.write("\n".join(lines) + "\n")

    zero = bytes(32)
    one = bytes(31) + b"\x01"
    print("pub(seed0) =", pub(zero).hex())
    print("pub(seed1) =", pub(one).hex())
    print("did(seed0) = did:sim6g:" + b58(hashlib.sha256(pub(zero)).digest()[:16]))
    print("sha256('') =", hashlib.sha256(b"").hexdigest())
    print("sha256('abc') =", hashlib.sha256(b"abc").hexdigest())
    corpus = [
        {"b": 1, "a": 2},
        {},
        {"id": "did:sim6g:x", "verification_methods": [{"id": "#key-0", "purposes": ["authentication", "assertion"]}],
         "services": [], "controller": None, "version": 3, "deactivated": False},
        {"z": [1, -2, {"y": "café", "x": "tab\there"}], "emoji": "\U0001F4F6", "ctl": "\u0001", "q": "a\"b\\c/"},
    ]
    for doc in corpus:
        c = canonical(doc)
        print("canon", c.decode(), "sha256", hashlib.sha256(c).hexdigest())


if __name__ == "__main__":
    sys.exit(main())
