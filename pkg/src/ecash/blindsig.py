"""Full-domain-hash RSA blind signatures.

The bank signs the 32-byte coin digest H(C1, C2, Q) without seeing it. The
message is always that digest, never raw data.
"""

from __future__ import annotations

import hashlib
from abc import ABC, abstractmethod
from dataclasses import dataclass
from math import gcd

import gmpy2

from .errors import InvalidSignature

E = 65537


class BlindScheme(ABC):
    """What the rest of the package needs from a blind signature."""

    @abstractmethod
    def blinding_factor(self, rng): ...

    @abstractmethod
    def blind(self, m: bytes, r): ...

    @abstractmethod
    def unblind(self, blinded_sig: bytes, r) -> bytes: ...

    @abstractmethod
    def verify(self, m: bytes, sig: bytes) -> bool: ...


@dataclass(frozen=True)
class RsaPublicKey(BlindScheme):
    n: int
    e: int = E

    @property
    def size(self) -> int:
        return (self.n.bit_length() + 7) // 8

    def fdh(self, m: bytes) -> int:
        # expand past |n| by 16 bytes so the reduction bias is negligible
        stream = hashlib.shake_256(b"ecash/rsa-fdh" + self.n.to_bytes(self.size, "big") + m)
        return int.from_bytes(stream.digest(self.size + 16), "big") % self.n

    def blinding_factor(self, rng) -> int:
        while True:
            r = rng.randrange(2, self.n - 1)
            if gcd(r, self.n) == 1:
                return r

    def blind(self, m: bytes, r: int) -> bytes:
        K = self.fdh(m) * pow(r, self.e, self.n) % self.n
        return K.to_bytes(self.size, "big")

    def unblind(self, blinded_sig: bytes, r: int) -> bytes:
        s = self._decode(blinded_sig)
        return (s * pow(r, -1, self.n) % self.n).to_bytes(self.size, "big")

    def verify(self, m: bytes, sig: bytes) -> bool:
        try:
            s = self._decode(sig)
        except InvalidSignature:
            return False
        return pow(s, self.e, self.n) == self.fdh(m)

    def _decode(self, data: bytes) -> int:
        if len(data) != self.size:
            raise InvalidSignature("wrong signature length")
        x = int.from_bytes(data, "big")
        if x >= self.n:
            raise InvalidSignature("signature not reduced mod n")
        return x

    def to_bytes(self) -> bytes:
        return self.n.to_bytes(self.size, "big")


@dataclass(frozen=True, repr=False)
class RsaSecretKey:
    p: int
    q: int
    d: int
    public: RsaPublicKey

    def sign_blinded(self, K: bytes) -> bytes:
        pk = self.public
        k = pk._decode(K)
        # CRT
        sp = pow(k, self.d % (self.p - 1), self.p)
        sq = pow(k, self.d % (self.q - 1), self.q)
        h = (sp - sq) * pow(self.q, -1, self.p) % self.p
        s = sq + h * self.q
        return s.to_bytes(pk.size, "big")

    def sign(self, m: bytes) -> bytes:
        """Direct (unblinded) signature; used only for self-tests."""
        return self.sign_blinded(self.public.fdh(m).to_bytes(self.public.size, "big"))


def _prime(bits: int, rng) -> int:
    while True:
        start = rng.getrandbits(bits) | (3 << (bits - 2)) | 1
        p = int(gmpy2.next_prime(start))
        if p.bit_length() == bits and gcd(E, p - 1) == 1:
            return p


def generate_rsa(bits: int, rng) -> RsaSecretKey:
    while True:
        p, q = _prime(bits // 2, rng), _prime(bits - bits // 2, rng)
        if p == q:
            continue
        n = p * q
        if n.bit_length() != bits:
            continue
        d = pow(E, -1, (p - 1) * (q - 1) // gcd(p - 1, q - 1))
        return RsaSecretKey(p, q, d, RsaPublicKey(n))
