"""Bilinear maps e: G1 x G2 -> GT over the main group.

The credential signatures only need three things from a pairing: a G2
generator, scalar multiplication / addition in G2, and an equality test
between two pairing products.

``ToyPairing`` takes G2 = (Z_p, +) and defines e(P, b) = P^b. That map is
bilinear and non-degenerate but publishes secret keys in the clear; it lets
the toy profile run the same credential code paths.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from functools import lru_cache

from py_arkworks_bls12381 import G2Point, GT, Scalar

from .errors import NonCanonical
from .group import Group, GroupElement, bls12_381, toy_group


class Pairing(ABC):
    group: Group
    g2_size: int

    @abstractmethod
    def g2(self): ...

    @abstractmethod
    def g2_exp(self, a, k: int): ...

    @abstractmethod
    def g2_mul(self, a, b): ...

    @abstractmethod
    def encode_g2(self, a) -> bytes: ...

    @abstractmethod
    def decode_g2(self, data: bytes): ...

    @abstractmethod
    def pairing_eq(self, p1: GroupElement, q1, p2: GroupElement, q2) -> bool:
        """e(p1, q1) == e(p2, q2)"""


class Bls12381Pairing(Pairing):
    g2_size = 96

    def __init__(self):
        self.group = bls12_381()

    def g2(self):
        return G2Point()

    def g2_exp(self, a, k):
        return a * Scalar(k % self.group.order)

    def g2_mul(self, a, b):
        return a + b

    def encode_g2(self, a):
        return bytes(a.to_compressed_bytes())

    def decode_g2(self, data):
        if len(data) != self.g2_size:
            raise NonCanonical("bad G2 length")
        try:
            point = G2Point.from_compressed_bytes(bytes(data))
        except (ValueError, TypeError) as exc:
            raise NonCanonical(str(exc)) from exc
        if self.encode_g2(point) != bytes(data):
            raise NonCanonical("non-canonical G2 encoding")
        return point

    def pairing_eq(self, p1, q1, p2, q2):
        return GT.pairing(p1.value, q1) == GT.pairing(p2.value, q2)


class ToyPairing(Pairing):
    def __init__(self):
        self.group = toy_group()
        self.g2_size = self.group.scalar_size

    def g2(self):
        return 1

    def g2_exp(self, a, k):
        return a * k % self.group.order

    def g2_mul(self, a, b):
        return (a + b) % self.group.order

    def encode_g2(self, a):
        return self.group.encode_scalar(a)

    def decode_g2(self, data):
        return self.group.decode_scalar(bytes(data))

    def pairing_eq(self, p1, q1, p2, q2):
        return p1 ** q1 == p2 ** q2


@lru_cache(maxsize=None)
def bls12_381_pairing() -> Bls12381Pairing:
    return Bls12381Pairing()


@lru_cache(maxsize=None)
def toy_pairing() -> ToyPairing:
    return ToyPairing()
