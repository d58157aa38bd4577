"""Canonical byte formats for every protocol object.

Top-level layout: MAGIC | VERSION | record, where a record is

    tag (1 byte) | length (4 bytes, big endian) | body

and a body is the record's fields in declaration order, each framed as
length (4 bytes) | value. Group elements use the group's compressed encoding,
scalars are 32-byte big-endian, nested records and proofs are framed the same
way. Decoding is strict: exact lengths, no trailing bytes, canonical points
and reduced scalars only.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .errors import Malformed, NonCanonical, UnknownTag
from .nizk.sigma import Proof
from .primitives import DIGEST_SIZE, ro

MAGIC = b"ECSH"
VERSION = 1
SCALAR_SIZE = 32

# field kinds
EL = "el"  # group element
SC = "sc"  # scalar mod p
DIGEST = "digest"  # 32 raw bytes
BYTES = "bytes"  # variable length
PROOF = "proof"
REC = "rec"  # any registered record
U64 = "u64"
FLAG = "flag"

_REGISTRY: dict = {}


def wire_type(tag: int, *schema):
    """Class decorator: register ``cls`` under ``tag`` with ``schema``, a
    sequence of (field_name, kind) pairs in wire order."""

    def deco(cls):
        if tag in _REGISTRY:
            raise ValueError(f"wire tag {tag:#x} already taken by {_REGISTRY[tag].__name__}")
        cls._wire_tag = tag
        cls._wire_schema = tuple(schema)
        _REGISTRY[tag] = cls
        return cls

    return deco


# -- protocol objects -----------------------------------------------------------


@wire_type(0x10, ("C1", EL), ("C2", EL), ("Q", EL), ("sigma_c", BYTES))
@dataclass(frozen=True)
class Coin:
    C1: object
    C2: object
    Q: object
    sigma_c: bytes

    def digest(self) -> bytes:
        """H(C1, C2, Q): the message the bank blind-signs."""
        return coin_digest(self.C1, self.C2, self.Q)


@wire_type(
    0x11,
    ("P", EL),
    ("pi_skU", PROOF),
    ("X", EL),
    ("Y", EL),
    ("pi_cid", PROOF),
    ("pi_skA", PROOF),
    ("r_c", SC),
)
@dataclass(frozen=True)
class Voucher:
    P: object
    pi_skU: Proof
    X: object
    Y: object
    pi_cid: Proof
    pi_skA: Proof
    r_c: int


@wire_type(0x12, ("Z", EL), ("pi_T", PROOF), ("r_v", DIGEST), ("r_t", SC))
@dataclass(frozen=True)
class Transaction:
    Z: object
    pi_T: Proof
    r_v: bytes
    r_t: int


@wire_type(0x13, ("Sigma", BYTES), ("I", DIGEST), ("V", REC), ("nonce", DIGEST))
@dataclass(frozen=True)
class Promise:
    Sigma: bytes
    I: bytes
    V: object
    nonce: bytes


@wire_type(0x14, ("sig", BYTES))
@dataclass(frozen=True)
class Receipt:
    sig: bytes


@wire_type(
    0x15,
    ("Sigma", BYTES),
    ("I", DIGEST),
    ("V", REC),
    ("nonce", DIGEST),
    ("pk_U", EL),
    ("pk_A", EL),
)
@dataclass(frozen=True)
class AbortRecord:
    Sigma: bytes
    I: bytes
    V: object
    nonce: bytes
    pk_U: object
    pk_A: object


@wire_type(
    0x16,
    ("C1", EL),
    ("C2", EL),
    ("Q", EL),
    ("pi_k1", PROOF),
    ("pi_k2", PROOF),
    ("pi_skA", PROOF),
    ("sigma_c", BYTES),
)
@dataclass(frozen=True)
class CompactCoin:
    C1: object
    C2: object
    Q: object
    pi_k1: Proof
    pi_k2: Proof
    pi_skA: Proof
    sigma_c: bytes

    def digest(self) -> bytes:
        return coin_digest(self.C1, self.C2, self.Q)


@wire_type(
    0x17,
    ("J", EL),
    ("P", EL),
    ("pi_skU", PROOF),
    ("X", EL),
    ("Y", EL),
    ("pi_ctr", PROOF),
    ("pi_cid", PROOF),
    ("r_c", SC),
)
@dataclass(frozen=True)
class CompactVoucher:
    J: object
    P: object
    pi_skU: Proof
    X: object
    Y: object
    pi_ctr: Proof
    pi_cid: Proof
    r_c: int


@wire_type(
    0x18,
    ("C", DIGEST),
    ("cid", SC),
    ("Y", EL),
    ("Z", EL),
    ("r_c", SC),
    ("r_t", SC),
    ("X", EL),
)
@dataclass(frozen=True)
class SpentEntry:
    """One deposited coin. X is kept for audit and for the compact-mode index."""

    C: bytes
    cid: int
    Y: object
    Z: object
    r_c: int
    r_t: int
    X: object


@wire_type(
    0x1A,
    ("C1", EL),
    ("C2", EL),
    ("Q", EL),
    ("k1", SC),
    ("b1", SC),
    ("k2", SC),
    ("b2", SC),
    ("q_blind", SC),
    ("sigma_c", BYTES),
)
@dataclass(frozen=True)
class KSRecord:
    """An unissued coin in an ATM's store, with the openings it needs."""

    C1: object
    C2: object
    Q: object
    k1: int
    b1: int
    k2: int
    b2: int
    q_blind: int
    sigma_c: bytes

    @property
    def coin(self) -> Coin:
        return Coin(self.C1, self.C2, self.Q, self.sigma_c)


@wire_type(0x1B, ("coin", REC), ("voucher", REC), ("blinding", SC), ("spent", FLAG))
@dataclass(frozen=True)
class PurseRecord:
    coin: object
    voucher: object
    blinding: int  # opening of the voucher's P
    spent: bool


@wire_type(0x1C, ("pk", EL), ("kind", U64), ("balance", U64), ("sig_pk", BYTES))
@dataclass(frozen=True)
class IdentityRecord:
    pk: object
    kind: int  # 0 user, 1 atm
    balance: int
    sig_pk: bytes


@wire_type(0x1D, ("pk_U", EL), ("pk_A", EL), ("nonce", DIGEST))
@dataclass(frozen=True)
class DebitRecord:
    """A withdrawal the bank has debited; needed to replay balances and
    to refund on a later abort."""

    pk_U: object
    pk_A: object
    nonce: bytes


def coin_digest(C1, C2, Q) -> bytes:
    return ro(b"coin", bytes(C1) + bytes(C2) + bytes(Q))


# -- encoding -------------------------------------------------------------------


def _frame(data: bytes) -> bytes:
    return struct.pack(">I", len(data)) + data


def _encode_proof(proof: Proof) -> bytes:
    out = [bytes([proof.tag])]
    for seq in (proof.elements, proof.commitments):
        out.append(struct.pack(">I", len(seq)))
        out += [bytes(e) for e in seq]
    out.append(_scalar(proof.challenge))
    out.append(struct.pack(">I", len(proof.responses)))
    out += [_scalar(z) for z in proof.responses]
    return b"".join(out)


def _scalar(x: int) -> bytes:
    return int(x).to_bytes(SCALAR_SIZE, "big")


def _encode_value(kind: str, value) -> bytes:
    if kind == EL:
        return bytes(value)
    if kind == SC:
        return _scalar(value)
    if kind == DIGEST:
        if len(value) != DIGEST_SIZE:
            raise Malformed(f"digest must be {DIGEST_SIZE} bytes")
        return bytes(value)
    if kind == BYTES:
        return bytes(value)
    if kind == PROOF:
        return _encode_proof(value)
    if kind == REC:
        return _encode_record(value)
    if kind == U64:
        return struct.pack(">Q", value)
    if kind == FLAG:
        return b"\x01" if value else b"\x00"
    raise AssertionError(kind)


def _encode_record(obj) -> bytes:
    try:
        tag, schema = obj._wire_tag, obj._wire_schema
    except AttributeError:
        raise UnknownTag(f"{type(obj).__name__} has no wire format") from None
    body = b"".join(_frame(_encode_value(kind, getattr(obj, name))) for name, kind in schema)
    return bytes([tag]) + _frame(body)


def encode(obj) -> bytes:
    return MAGIC + bytes([VERSION]) + _encode_record(obj)


def encode_hex(obj) -> str:
    return encode(obj).hex()


# -- decoding -------------------------------------------------------------------


class _Reader:
    def __init__(self, data: bytes):
        self.data = memoryview(bytes(data))
        self.pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise Malformed("truncated input")
        out = bytes(self.data[self.pos : self.pos + n])
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def framed(self) -> bytes:
        return self.take(self.u32())

    def done(self) -> None:
        if self.pos != len(self.data):
            raise Malformed(f"{len(self.data) - self.pos} trailing bytes")


def _decode_element(params, data: bytes):
    try:
        return params.group.decode(data)
    except Malformed:
        raise
    except Exception as exc:  # backend parse errors
        raise NonCanonical(f"not a group element: {exc}") from None


def _decode_scalar(params, data: bytes) -> int:
    if len(data) != SCALAR_SIZE:
        raise Malformed(f"scalar must be {SCALAR_SIZE} bytes")
    x = int.from_bytes(data, "big")
    if x >= params.p:
        raise NonCanonical("scalar not reduced")
    return x


def _decode_proof(params, data: bytes) -> Proof:
    r = _Reader(data)
    tag = r.take(1)[0]
    el_size = params.group.element_size
    seqs = []
    for _ in range(2):
        count = r.u32()
        if count * el_size > len(data):
            raise Malformed("element count exceeds buffer")
        seqs.append(tuple(_decode_element(params, r.take(el_size)) for _ in range(count)))
    c = _decode_scalar(params, r.take(SCALAR_SIZE))
    count = r.u32()
    if count * SCALAR_SIZE > len(data):
        raise Malformed("response count exceeds buffer")
    responses = tuple(_decode_scalar(params, r.take(SCALAR_SIZE)) for _ in range(count))
    r.done()
    return Proof(tag, seqs[0], seqs[1], c, responses)


def _decode_value(params, kind: str, data: bytes):
    if kind == EL:
        return _decode_element(params, data)
    if kind == SC:
        return _decode_scalar(params, data)
    if kind == DIGEST:
        if len(data) != DIGEST_SIZE:
            raise Malformed(f"digest must be {DIGEST_SIZE} bytes")
        return data
    if kind == BYTES:
        return data
    if kind == PROOF:
        return _decode_proof(params, data)
    if kind == REC:
        r = _Reader(data)
        obj = _decode_record(params, r)
        r.done()
        return obj
    if kind == U64:
        if len(data) != 8:
            raise Malformed("u64 must be 8 bytes")
        return struct.unpack(">Q", data)[0]
    if kind == FLAG:
        if data not in (b"\x00", b"\x01"):
            raise NonCanonical("flag must be 0 or 1")
        return data == b"\x01"
    raise AssertionError(kind)


def _decode_record(params, r: _Reader):
    tag = r.take(1)[0]
    cls = _REGISTRY.get(tag)
    if cls is None:
        raise UnknownTag(f"unknown record tag {tag:#x}")
    body = _Reader(r.framed())
    values = {name: _decode_value(params, kind, body.framed()) for name, kind in cls._wire_schema}
    body.done()
    return cls(**values)


def decode(data: bytes, params, expect: type | None = None):
    """Parse one top-level object. ``expect`` optionally pins the type."""
    r = _Reader(data)
    if r.take(len(MAGIC)) != MAGIC:
        raise Malformed("bad magic")
    version = r.take(1)[0]
    if version != VERSION:
        raise Malformed(f"unsupported version {version}")
    obj = _decode_record(params, r)
    r.done()
    if expect is not None and not isinstance(obj, expect):
        raise UnknownTag(f"expected {expect.__name__}, got {type(obj).__name__}")
    return obj


def decode_hex(text: str, params, expect: type | None = None):
    try:
        data = bytes.fromhex(text.strip())
    except ValueError as exc:
        raise Malformed(str(exc)) from None
    return decode(data, params, expect)


def field_spans(data: bytes) -> list:
    """(name, start, end) byte ranges of each top-level field value inside an
    encoded object; used by the tamper tests and the harness."""
    r = _Reader(data)
    r.take(len(MAGIC) + 1)
    tag = r.take(1)[0]
    cls = _REGISTRY.get(tag)
    if cls is None:
        raise UnknownTag(f"unknown record tag {tag:#x}")
    r.u32()
    spans = []
    for name, _ in cls._wire_schema:
        n = r.u32()
        spans.append((name, r.pos, r.pos + n))
        r.take(n)
    return spans


def registered_types() -> dict:
    return {cls.__name__: cls for cls in _REGISTRY.values()}


__all__ = [
    "AbortRecord",
    "Coin",
    "CompactCoin",
    "CompactVoucher",
    "DebitRecord",
    "IdentityRecord",
    "KSRecord",
    "MAGIC",
    "Promise",
    "PurseRecord",
    "Receipt",
    "SpentEntry",
    "Transaction",
    "VERSION",
    "Voucher",
    "coin_digest",
    "decode",
    "decode_hex",
    "encode",
    "encode_hex",
    "field_spans",
    "wire_type",
]
