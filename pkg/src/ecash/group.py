"""Prime-order groups and scalar-field helpers.

Two backends share one interface:

- ``Bls12381G1``: the G1 subgroup of BLS12-381 (order r, 255 bits). This is the
  production group; its scalar field is also the scalar field of the pairing
  used by the credential signatures, so signed values can be used directly as
  exponents here.
- ``ToySchnorrGroup``: the order-p subgroup of Z_q^* for a 61-bit safe prime
  q = 2p + 1. Insecure on purpose; it exists so tests can brute force.

Elements are written multiplicatively: ``a * b``, ``a / b``, ``a ** k``.
Scalars are plain Python ints reduced mod ``group.order``.
"""

from __future__ import annotations

import hashlib
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache

from py_arkworks_bls12381 import G1Point, Scalar

from .errors import NonCanonical, ZeroInverse


def _lp(data: bytes) -> bytes:
    return len(data).to_bytes(4, "big") + data


def scalar_invert(x: int, order: int) -> int:
    x %= order
    if x == 0:
        raise ZeroInverse("0 has no inverse mod the group order")
    return pow(x, -1, order)


class GroupElement:
    """An element of a prime-order group; immutable."""

    __slots__ = ("group", "value", "_enc")

    def __init__(self, group: Group, value):
        self.group = group
        self.value = value
        self._enc = None

    def __mul__(self, other: GroupElement) -> GroupElement:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return GroupElement(self.group, self.group._op(self.value, other.value))

    def __truediv__(self, other: GroupElement) -> GroupElement:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, e: int) -> GroupElement:
        return GroupElement(self.group, self.group._exp(self.value, e % self.group.order))

    def inverse(self) -> GroupElement:
        return GroupElement(self.group, self.group._inv(self.value))

    __invert__ = inverse

    def is_identity(self) -> bool:
        return self == self.group.identity()

    def __bytes__(self) -> bytes:
        if self._enc is None:
            self._enc = self.group._encode(self.value)
        return self._enc

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.group is other.group and bytes(self) == bytes(other)

    def __hash__(self) -> int:
        return hash(bytes(self))

    def __repr__(self) -> str:
        return f"<{self.group.name} {bytes(self).hex()[:16]}…>"


class Group(ABC):
    name: str
    order: int
    element_size: int
    scalar_size: int

    # backend hooks
    @abstractmethod
    def _op(self, a, b): ...

    @abstractmethod
    def _exp(self, a, e: int): ...

    @abstractmethod
    def _inv(self, a): ...

    @abstractmethod
    def _encode(self, a) -> bytes: ...

    @abstractmethod
    def _decode(self, data: bytes): ...

    @abstractmethod
    def _generator(self): ...

    @abstractmethod
    def _identity(self): ...

    @abstractmethod
    def _map_candidate(self, digest: bytes):
        """Return a subgroup element derived from ``digest`` or None to retry."""

    def generator(self) -> GroupElement:
        return GroupElement(self, self._generator())

    def identity(self) -> GroupElement:
        return GroupElement(self, self._identity())

    def encode(self, el: GroupElement) -> bytes:
        return bytes(el)

    def decode(self, data: bytes) -> GroupElement:
        """Decode and validate group membership; rejects non-canonical bytes."""
        data = bytes(data)
        if len(data) != self.element_size:
            raise NonCanonical(f"expected {self.element_size} bytes, got {len(data)}")
        value = self._decode(data)
        el = GroupElement(self, value)
        if bytes(el) != data:
            raise NonCanonical("non-canonical point encoding")
        return el

    def exp(self, base: GroupElement, e: int) -> GroupElement:
        return base ** e

    def multiexp(self, bases, exps) -> GroupElement:
        acc = self._identity()
        for b, e in zip(bases, exps, strict=True):
            acc = self._op(acc, self._exp(b.value, e % self.order))
        return GroupElement(self, acc)

    def hash_to_group(self, domain: bytes, msg: bytes) -> GroupElement:
        """Try-and-increment map into the prime-order subgroup."""
        prefix = b"ecash/h2g" + _lp(domain) + _lp(msg)
        for ctr in range(1 << 16):
            digest = hashlib.sha512(prefix + ctr.to_bytes(4, "big")).digest()
            value = self._map_candidate(digest)
            if value is not None:
                el = GroupElement(self, value)
                if not el.is_identity():
                    return el
        raise RuntimeError("hash_to_group exhausted its counter")  # pragma: no cover

    # scalars
    def hash_to_scalar(self, domain: bytes, msg: bytes) -> int:
        digest = hashlib.sha512(b"ecash/h2s" + _lp(domain) + msg).digest()
        return int.from_bytes(digest, "big") % self.order

    def random_scalar(self, rng, nonzero: bool = False) -> int:
        return rng.randrange(1 if nonzero else 0, self.order)

    def invert(self, x: int) -> int:
        return scalar_invert(x, self.order)

    def encode_scalar(self, x: int) -> bytes:
        return (x % self.order).to_bytes(self.scalar_size, "big")

    def decode_scalar(self, data: bytes) -> int:
        if len(data) != self.scalar_size:
            raise NonCanonical(f"expected {self.scalar_size}-byte scalar")
        x = int.from_bytes(data, "big")
        if x >= self.order:
            raise NonCanonical("scalar not reduced mod the group order")
        return x

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


BLS12_381_R = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001
BLS12_381_Q = int(
    "1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f6241eabfffeb153ffffb9feffffffffaaab", 16
)
BLS12_381_G1_COFACTOR = 0x396C8C005555E1568C00AAAB0000AAAB


class Bls12381G1(Group):
    name = "bls12-381-g1"
    order = BLS12_381_R
    element_size = 48
    scalar_size = 32

    def _op(self, a, b):
        return a + b

    def _exp(self, a, e):
        return a * Scalar(e)

    def _inv(self, a):
        return -a

    def _encode(self, a):
        return bytes(a.to_compressed_bytes())

    def _decode(self, data):
        try:
            return G1Point.from_compressed_bytes(data)
        except (ValueError, TypeError) as exc:
            raise NonCanonical(str(exc)) from exc

    def _generator(self):
        return G1Point()

    def _identity(self):
        return G1Point.identity()

    def _map_candidate(self, digest):
        x = int.from_bytes(digest, "big") % BLS12_381_Q
        enc = bytearray(x.to_bytes(48, "big"))
        enc[0] |= 0x80 | (0x20 if digest[0] & 1 else 0)
        try:
            point = G1Point.from_compressed_bytes_unchecked(bytes(enc))
        except (ValueError, TypeError):
            return None  # x has no square root on the curve
        return point * Scalar(BLS12_381_G1_COFACTOR)


TOY_P = 1729382256910271363
TOY_Q = 2 * TOY_P + 1


class ToySchnorrGroup(Group):
    """Quadratic residues mod a 62-bit safe prime. Test-only."""

    name = "toy-schnorr-61"
    order = TOY_P
    modulus = TOY_Q
    element_size = 8
    scalar_size = 8

    def _op(self, a, b):
        return a * b % TOY_Q

    def _exp(self, a, e):
        return pow(a, e, TOY_Q)

    def _inv(self, a):
        return pow(a, -1, TOY_Q)

    def _encode(self, a):
        return a.to_bytes(8, "big")

    def _decode(self, data):
        x = int.from_bytes(data, "big")
        if not 1 <= x < TOY_Q or pow(x, TOY_P, TOY_Q) != 1:
            raise NonCanonical("not an element of the order-p subgroup")
        return x

    def _generator(self):
        return 4

    def _identity(self):
        return 1

    def _map_candidate(self, digest):
        x = int.from_bytes(digest, "big") % TOY_Q
        return x * x % TOY_Q if x else None


@lru_cache(maxsize=None)
def bls12_381() -> Bls12381G1:
    return Bls12381G1()


@lru_cache(maxsize=None)
def toy_group() -> ToySchnorrGroup:
    return ToySchnorrGroup()


@dataclass(frozen=True)
class GeneratorSet:
    """n + 1 independent generators (g_1..g_n, g') plus the base generator g."""

    g: GroupElement
    gs: tuple
    gprime: GroupElement

    @property
    def count(self) -> int:
        return len(self.gs)

    def __iter__(self):
        return iter((*self.gs, self.gprime))


def derive_generators(group: Group, seed: bytes, count: int) -> GeneratorSet:
    if count < 1:
        raise ValueError("count must be >= 1")
    gs = tuple(group.hash_to_group(b"pedersen/" + seed, i.to_bytes(4, "big")) for i in range(count))
    gprime = group.hash_to_group(b"pedersen-blinding/" + seed, b"")
    return GeneratorSet(group.generator(), gs, gprime)
