import random

import pytest

import ecash.offline  # noqa: F401  registers LowBalanceFilter
from ecash import wire
from ecash.errors import Malformed, NonCanonical, UnknownTag
from ecash.nizk.sigma import Proof


def random_value(params, kind, rng, depth=0):
    grp = params.group
    if kind == wire.EL:
        return params.g ** grp.random_scalar(rng, nonzero=True)
    if kind == wire.SC:
        return grp.random_scalar(rng)
    if kind == wire.DIGEST:
        return rng.randbytes(32)
    if kind == wire.BYTES:
        return rng.randbytes(rng.randrange(0, 300))
    if kind == wire.PROOF:
        return Proof(
            rng.randrange(256),
            tuple(params.g ** grp.random_scalar(rng) for _ in range(rng.randrange(4))),
            tuple(params.g ** grp.random_scalar(rng) for _ in range(rng.randrange(1, 6))),
            grp.random_scalar(rng),
            tuple(grp.random_scalar(rng) for _ in range(rng.randrange(1, 8))),
        )
    if kind == wire.REC:
        return random_object(params, wire.Coin, rng)
    if kind == wire.U64:
        return rng.getrandbits(64)
    if kind == wire.FLAG:
        return rng.random() < 0.5
    raise AssertionError(kind)


def random_object(params, cls, rng):
    return cls(**{name: random_value(params, kind, rng) for name, kind in cls._wire_schema})


ALL_TYPES = sorted(wire.registered_types())


@pytest.mark.parametrize("name", ALL_TYPES)
def test_round_trip_toy(toy_params, name):
    cls = wire.registered_types()[name]
    rng = random.Random(name)
    for _ in range(1000):
        obj = random_object(toy_params, cls, rng)
        data = wire.encode(obj)
        assert wire.decode(data, toy_params) == obj
        assert wire.decode_hex(data.hex(), toy_params, expect=cls) == obj


@pytest.mark.parametrize("name", ["Coin", "Voucher", "Transaction", "CompactCoin", "CompactVoucher"])
def test_round_trip_production(prod_params, name):
    cls = wire.registered_types()[name]
    rng = random.Random(name)
    for _ in range(20):
        obj = random_object(prod_params, cls, rng)
        assert wire.decode(wire.encode(obj), prod_params) == obj


def test_registry_covers_protocol_types():
    names = set(wire.registered_types())
    assert {"Coin", "Voucher", "Transaction", "Promise", "Receipt", "AbortRecord"} <= names
    tags = [cls._wire_tag for cls in wire.registered_types().values()]
    assert len(tags) == len(set(tags))


def test_duplicate_tag_rejected():
    with pytest.raises(ValueError):
        wire.wire_type(0x10, ("x", wire.U64))(type("Dup", (), {}))


def test_header_and_framing(toy_params, rng):
    obj = random_object(toy_params, wire.Receipt, rng)
    data = wire.encode(obj)
    assert data[:4] == b"ECSH" and data[4] == 1 and data[5] == 0x14
    assert int.from_bytes(data[6:10], "big") == len(data) - 10


def test_truncation_rejected(toy_params, rng):
    for cls in (wire.Coin, wire.Voucher, wire.Transaction, wire.Promise):
        data = wire.encode(random_object(toy_params, cls, rng))
        for cut in range(0, len(data), max(1, len(data) // 60)):
            with pytest.raises(Malformed):
                wire.decode(data[:cut], toy_params)


def test_trailing_bytes_rejected(toy_params, rng):
    data = wire.encode(random_object(toy_params, wire.Coin, rng))
    with pytest.raises(Malformed):
        wire.decode(data + b"\x00", toy_params)


def test_bad_magic_version_tag(toy_params, rng):
    data = wire.encode(random_object(toy_params, wire.Coin, rng))
    with pytest.raises(Malformed):
        wire.decode(b"XXXX" + data[4:], toy_params)
    with pytest.raises(Malformed):
        wire.decode(data[:4] + b"\x02" + data[5:], toy_params)
    with pytest.raises(UnknownTag):
        wire.decode(data[:5] + b"\x7f" + data[6:], toy_params)
    with pytest.raises(UnknownTag):
        wire.decode(data, toy_params, expect=wire.Voucher)
    with pytest.raises(UnknownTag):
        wire.encode(object())
    with pytest.raises(Malformed):
        wire.decode_hex("zz", toy_params)


def test_non_canonical_point_and_scalar(toy_params, rng):
    tx = random_object(toy_params, wire.Transaction, rng)
    data = bytearray(wire.encode(tx))
    spans = {n: (a, b) for n, a, b in wire.field_spans(bytes(data))}
    a, b = spans["Z"]
    data[a:b] = b"\x00" * (b - a)
    with pytest.raises(NonCanonical):
        wire.decode(bytes(data), toy_params)
    data = bytearray(wire.encode(tx))
    a, b = spans["r_t"]
    data[a:b] = b"\xff" * (b - a)
    with pytest.raises(NonCanonical):
        wire.decode(bytes(data), toy_params)


def test_non_canonical_production_point(prod_params, rng):
    tx = random_object(prod_params, wire.Transaction, rng)
    data = bytearray(wire.encode(tx))
    a, b = dict((n, (s, e)) for n, s, e in wire.field_spans(bytes(data)))["Z"]
    data[a:b] = b"\xff" * (b - a)
    with pytest.raises(NonCanonical):
        wire.decode(bytes(data), prod_params)


def test_field_spans_cover_every_field(toy_params, rng):
    v = random_object(toy_params, wire.Voucher, rng)
    data = wire.encode(v)
    spans = wire.field_spans(data)
    assert [s[0] for s in spans] == [n for n, _ in wire.Voucher._wire_schema]
    assert spans[-1][2] == len(data)
    assert data[spans[0][1] : spans[0][2]] == bytes(v.P)


def test_encoding_is_deterministic(toy_params):
    a = random_object(toy_params, wire.Voucher, random.Random(9))
    b = random_object(toy_params, wire.Voucher, random.Random(9))
    assert wire.encode(a) == wire.encode(b)


def test_scalars_are_fixed_width(toy_params):
    tx = wire.Transaction(toy_params.g, Proof(3, (), (toy_params.g,), 1, (2,)), b"\x00" * 32, 5)
    spans = {n: (a, b) for n, a, b in wire.field_spans(wire.encode(tx))}
    a, b = spans["r_t"]
    assert b - a == 32


def test_coin_digest_matches_ro(toy_params, rng):
    c = random_object(toy_params, wire.Coin, rng)
    assert c.digest() == wire.coin_digest(c.C1, c.C2, c.Q)
    assert len(c.digest()) == 32
