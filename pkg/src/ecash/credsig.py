"""BBS+ signatures with proofs of knowledge ("zsgn").

The issuer signs the opening of a Pedersen commitment without learning it:
the BBS+ message generators are the Pedersen generators, so a commitment
com = g1^m1 ... gn^mn * g'^b is already the blinded part of a BBS+ base

    B = h * g1^m1 ... gn^mn * g'^s,      A = B^(1/(x+e)).

Presentations re-randomise the signature (A' = A^r1, Abar = A'^x, d) and
prove, under one challenge, knowledge of (e, r2, r3, s', m_i, b) such that
the signature is valid on exactly the messages inside ``com``. Messages are
main-group scalars, so they double as exponents elsewhere in the protocol.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidSignature, MalformedProof, WitnessMismatch
from .nizk.sigma import Equation, LinearStatement, Proof
from .nizk.statements import TAG_CREDENTIAL
from .params import Params
from .primitives import Opening, commit


@dataclass(frozen=True)
class CredPublicKey:
    params: Params
    W: object  # g2^x
    n_messages: int

    def to_bytes(self) -> bytes:
        return self.params.pairing.encode_g2(self.W)


@dataclass(frozen=True, repr=False)
class CredSecretKey:
    x: int
    public: CredPublicKey


@dataclass(frozen=True)
class Credential:
    """(A, e, s): a BBS+ signature. Issued credentials carry only the issuer's
    share of s until the holder folds in its commitment blinding."""

    A: object
    e: int
    s: int


def keygen(params: Params, n_messages: int, rng) -> CredSecretKey:
    x = params.group.random_scalar(rng, nonzero=True)
    W = params.pairing.g2_exp(params.pairing.g2(), x)
    return CredSecretKey(x, CredPublicKey(params, W, n_messages))


def _base(params: Params, messages, s: int):
    return params.bbs_base * commit(messages, s, params.gens)


def zsign(sk: CredSecretKey, com, rng) -> Credential:
    """Sign the values inside ``com``. The caller has already checked the
    registrant's proof of opening."""
    params = sk.public.params
    p = params.p
    while True:
        e = params.group.random_scalar(rng)
        if (sk.x + e) % p:
            break
    s_issuer = params.group.random_scalar(rng)
    A = (params.bbs_base * com * params.gens.gprime ** s_issuer) ** pow((sk.x + e) % p, -1, p)
    return Credential(A, e, s_issuer)


def finalize(pk: CredPublicKey, issued: Credential, opening: Opening) -> Credential:
    """Holder side: fold the commitment blinding into s and check the result."""
    p = pk.params.p
    cred = Credential(issued.A, issued.e, (issued.s + opening.blinding) % p)
    if not verify_signature(pk, opening.messages, cred):
        raise InvalidSignature("issuer returned an invalid credential")
    return cred


def verify_signature(pk: CredPublicKey, messages, cred: Credential) -> bool:
    pairing = pk.params.pairing
    if cred.A.is_identity():
        return False
    rhs_key = pairing.g2_mul(pk.W, pairing.g2_exp(pairing.g2(), cred.e))
    return pairing.pairing_eq(cred.A, rhs_key, _base(pk.params, messages, cred.s), pairing.g2())


def _statement(pk: CredPublicKey, com, A_prime, A_bar, d) -> LinearStatement:
    params = pk.params
    gp = params.gens.gprime
    hs = params.gens.gs[: pk.n_messages]
    names = [f"m{i}" for i in range(pk.n_messages)]
    k2 = [(d, "r3"), (gp.inverse(), "s'")] + [(h.inverse(), n) for h, n in zip(hs, names)]
    k3 = [(h, n) for h, n in zip(hs, names)] + [(gp, "b")]
    return LinearStatement(
        params.group,
        TAG_CREDENTIAL,
        b"credential",
        [
            Equation(A_bar / d, ((A_prime.inverse(), "e"), (gp, "r2"))),
            Equation(params.bbs_base, tuple(k2)),
            Equation(com, tuple(k3)),
        ],
        context=pk.to_bytes(),
        elements=(A_prime, A_bar, d),
    )


def presentation(pk: CredPublicKey, com, opening: Opening, cred: Credential, rng):
    """A re-randomised presentation statement and its witness."""
    params = pk.params
    grp, p = params.group, params.p
    if len(opening.messages) != pk.n_messages:
        raise WitnessMismatch("message count does not match the key")
    if not verify_signature(pk, opening.messages, cred):
        raise WitnessMismatch("credential does not sign the committed messages")
    B = _base(params, opening.messages, cred.s)
    r1 = grp.random_scalar(rng, nonzero=True)
    r2 = grp.random_scalar(rng)
    A_prime = cred.A ** r1
    A_bar = A_prime ** (-cred.e % p) * B ** r1
    d = B ** r1 / params.gens.gprime ** r2
    r3 = pow(r1, -1, p)
    witness = {"e": cred.e, "r2": r2, "r3": r3, "s'": (cred.s - r2 * r3) % p, "b": opening.blinding}
    witness.update({f"m{i}": m for i, m in enumerate(opening.messages)})
    return _statement(pk, com, A_prime, A_bar, d), witness


def zprove(pk: CredPublicKey, com, opening: Opening, cred: Credential, rng) -> Proof:
    statement, witness = presentation(pk, com, opening, cred, rng)
    return statement.prove(witness, rng)


def zverify(pk: CredPublicKey, com, proof: Proof) -> bool:
    if proof.tag != TAG_CREDENTIAL or len(proof.elements) != 3:
        raise MalformedProof("not a credential presentation")
    A_prime, A_bar, d = proof.elements
    if A_prime.is_identity():
        return False
    params = pk.params
    if not params.pairing.pairing_eq(A_prime, pk.W, A_bar, params.pairing.g2()):
        return False
    return _statement(pk, com, A_prime, A_bar, d).verify(proof)
