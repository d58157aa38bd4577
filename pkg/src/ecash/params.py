"""Parameter profiles.

``production`` is the real instantiation (BLS12-381, 2048-bit RSA blind
signatures). ``toy`` runs the identical code over a 61-bit group and 512-bit
RSA so brute-force oracles are feasible in tests; never use it for anything
else.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .group import GeneratorSet, Group, GroupElement, bls12_381, derive_generators, toy_group
from .pairing import Pairing, bls12_381_pairing, toy_pairing

SEED = b"multi-issuer-ecash/v1"
PEDERSEN_SLOTS = 2


@dataclass(frozen=True)
class Params:
    name: str
    group: Group
    pairing: Pairing
    gens: GeneratorSet
    bbs_base: GroupElement
    rsa_bits: int

    @property
    def g(self) -> GroupElement:
        return self.gens.g

    @property
    def p(self) -> int:
        return self.group.order

    @property
    def is_toy(self) -> bool:
        return self.name == "toy"


def _build(name, group, pairing, rsa_bits):
    gens = derive_generators(group, SEED, PEDERSEN_SLOTS)
    bbs_base = group.hash_to_group(b"bbs-base/" + SEED, b"")
    return Params(name, group, pairing, gens, bbs_base, rsa_bits)


@lru_cache(maxsize=None)
def production() -> Params:
    return _build("production", bls12_381(), bls12_381_pairing(), 2048)


@lru_cache(maxsize=None)
def toy() -> Params:
    return _build("toy", toy_group(), toy_pairing(), 512)


def get_profile(name: str) -> Params:
    try:
        return {"production": production, "toy": toy}[name]()
    except KeyError:
        raise ValueError(f"unknown parameter profile {name!r}") from None
