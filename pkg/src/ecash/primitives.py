"""Pedersen commitments, the Dodis-Yampolskiy PRF, random-oracle digests,
nonces, and the ordinary digital signature used for promises and receipts.

Byte layouts: ``ro`` digests and nonces are 32 bytes. Scalars are fixed
width big-endian (see ``Group.encode_scalar``).
"""

from __future__ import annotations

import hashlib
import os
import secrets
from dataclasses import dataclass

from cryptography.exceptions import InvalidSignature as _CryptoInvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey, Ed25519PublicKey
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

from .errors import DegenerateInput, EntropyUnavailable, TooManyMessages
from .group import GeneratorSet, Group, GroupElement, _lp

DIGEST_SIZE = 32
NONCE_SIZE = 32

_system_rng = secrets.SystemRandom()


def default_rng():
    return _system_rng


@dataclass(frozen=True)
class Opening:
    messages: tuple
    blinding: int


def commit(messages, blinding: int, gens: GeneratorSet) -> GroupElement:
    """g_1^m_1 ... g_n^m_n * g'^blinding"""
    messages = tuple(messages)
    if len(messages) > gens.count:
        raise TooManyMessages(f"{len(messages)} messages but only {gens.count} generators")
    group = gens.gprime.group
    return group.multiexp((*gens.gs[: len(messages)], gens.gprime), (*messages, blinding))


def commit_opening(opening: Opening, gens: GeneratorSet) -> GroupElement:
    return commit(opening.messages, opening.blinding, gens)


def verify_opening(c: GroupElement, opening: Opening, gens: GeneratorSet) -> bool:
    try:
        return commit_opening(opening, gens) == c
    except TooManyMessages:
        return False


def random_opening(group: Group, messages, rng) -> Opening:
    return Opening(tuple(m % group.order for m in messages), group.random_scalar(rng))


def dy_prf(g: GroupElement, key: int, x: int) -> GroupElement:
    """Dodis-Yampolskiy PRF: g^(1 / (1 + key + x))."""
    p = g.group.order
    denom = (1 + key + x) % p
    if denom == 0:
        raise DegenerateInput("1 + k + x == 0 mod p")
    return g ** pow(denom, -1, p)


def ro(domain: bytes, msg: bytes) -> bytes:
    """Random-oracle digest to 2*lambda = 256 bits."""
    return hashlib.sha256(b"ecash/ro" + _lp(domain) + msg).digest()


def gen_nonce(rng=None) -> bytes:
    rng = rng or _system_rng
    try:
        return rng.randbytes(NONCE_SIZE)
    except NotImplementedError as exc:  # os.urandom without an entropy source
        raise EntropyUnavailable(str(exc)) from exc


def concat(*parts: bytes) -> bytes:
    """Length-prefixed concatenation for hashing structured inputs."""
    return b"".join(_lp(bytes(p)) for p in parts)


class SigningKey:
    """Ed25519 key for promises (ATM) and receipts (user)."""

    def __init__(self, seed: bytes):
        self._key = Ed25519PrivateKey.from_private_bytes(seed)
        self.public_bytes = self._key.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)

    @classmethod
    def generate(cls, rng=None) -> SigningKey:
        rng = rng or _system_rng
        return cls(rng.randbytes(32) if rng is not _system_rng else os.urandom(32))

    def sign(self, msg: bytes) -> bytes:
        return self._key.sign(msg)


def sig_verify(public_bytes: bytes, msg: bytes, signature: bytes) -> bool:
    try:
        Ed25519PublicKey.from_public_bytes(bytes(public_bytes)).verify(bytes(signature), msg)
    except (_CryptoInvalidSignature, ValueError):
        return False
    return True
