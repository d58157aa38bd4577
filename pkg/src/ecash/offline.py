"""Low-balance Bloom filter for fully offline withdrawals.

The bank periodically broadcasts the set of accounts below the minimum
withdrawal balance; an offline ATM refuses any user whose key is (or appears
to be) in the set. Sizing follows the standard formulas

    m = ceil(-n ln(eps) / ln(2)^2),     h = ceil((m / n) ln 2)

and the h probe positions come from double hashing two sha256 digests.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

from .wire import BYTES, U64, wire_type

DEFAULT_EPSILON = 1e-3


def filter_size(n_max: int, epsilon: float) -> tuple:
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    n = max(1, n_max)
    m = math.ceil(-n * math.log(epsilon) / math.log(2) ** 2)
    h = max(1, math.ceil(m / n * math.log(2)))
    return m, h


def expected_fpr(m: int, h: int, n: int) -> float:
    return (1 - math.exp(-h * n / m)) ** h


@wire_type(0x19, ("epoch", U64), ("m", U64), ("h", U64), ("insert_count", U64), ("bits", BYTES))
@dataclass(frozen=True)
class LowBalanceFilter:
    epoch: int
    m: int
    h: int
    insert_count: int
    bits: bytes

    def _positions(self, key: bytes):
        d = hashlib.sha256(b"bloom" + bytes(key)).digest()
        a = int.from_bytes(d[:16], "big")
        b = int.from_bytes(d[16:], "big") | 1
        return ((a + i * b) % self.m for i in range(self.h))

    def contains(self, key) -> bool:
        key = bytes(key)
        return all(self.bits[i >> 3] >> (i & 7) & 1 for i in self._positions(key))

    __contains__ = contains


def build_filter(keys, epsilon: float = DEFAULT_EPSILON, n_max: int = 10_000, epoch: int = 0) -> LowBalanceFilter:
    m, h = filter_size(n_max, epsilon)
    bits = bytearray((m + 7) // 8)
    shell = LowBalanceFilter(epoch, m, h, 0, b"")
    count = 0
    for key in keys:
        for i in shell._positions(bytes(key)):
            bits[i >> 3] |= 1 << (i & 7)
        count += 1
    return LowBalanceFilter(epoch, m, h, count, bytes(bits))


def contains(f: LowBalanceFilter, pk) -> bool:
    return f.contains(pk)
