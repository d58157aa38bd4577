import random

import pytest

from ecash.blindsig import generate_rsa
from ecash.errors import InvalidSignature
from ecash.primitives import ro


@pytest.fixture(scope="module")
def toy_key():
    return generate_rsa(512, random.Random(3))


def test_key_shape(toy_key):
    pk = toy_key.public
    assert pk.n.bit_length() == 512
    assert pk.n == toy_key.p * toy_key.q
    assert pk.e == 65537
    assert pk.verify(b"self-test", toy_key.sign(b"self-test"))


def test_blind_round_trip(toy_key, rng):
    pk = toy_key.public
    m = ro(b"coin", b"payload")
    r = pk.blinding_factor(rng)
    K = pk.blind(m, r)
    sig = pk.unblind(toy_key.sign_blinded(K), r)
    assert pk.verify(m, sig)
    assert not pk.verify(ro(b"coin", b"other"), sig)
    assert sig == toy_key.sign(m)


def test_blinding_is_fresh(toy_key, rng):
    pk = toy_key.public
    m = ro(b"coin", b"x")
    assert pk.blind(m, pk.blinding_factor(rng)) != pk.blind(m, pk.blinding_factor(rng))


def test_blinded_message_reveals_no_digest_substring(toy_key, rng):
    pk = toy_key.public
    for i in range(1000):
        m = ro(b"coin", i.to_bytes(4, "big"))
        K = pk.blind(m, pk.blinding_factor(rng))
        for j in range(0, len(m) - 7):
            assert m[j : j + 8] not in K


def test_signature_mutation_rejected(toy_key, rng):
    pk = toy_key.public
    m = ro(b"coin", b"y")
    sig = toy_key.sign(m)
    for _ in range(50):
        bad = bytearray(sig)
        bad[rng.randrange(len(bad))] ^= 1 << rng.randrange(8)
        assert not pk.verify(m, bytes(bad))
    assert not pk.verify(m, sig[:-1])
    assert not pk.verify(m, b"\xff" * pk.size)


def test_sign_blinded_rejects_unreduced(toy_key):
    with pytest.raises(InvalidSignature):
        toy_key.sign_blinded(b"\xff" * toy_key.public.size)


def test_production_modulus_size(prod_world):
    pk = prod_world.bank.public.blind_pk
    assert pk.n.bit_length() == 2048
