"""The protocol's proof statements, linearised for the sigma engine.

PRF relations have a hidden key, so they are rewritten before composition:

    X = F_a(x) = g^(1/(1+a+x))      <=>  g * X^-(1+x) = X^a
    Y = g^c * F_a(x)^r              <=>  g^r * Y^-1 = Y^a * g^-c * g^-mu,  mu = c*a
    Z = g^a * F_s(x)^r              <=>  g^r * Z^-(1+x) = Z^s * g^-(1+x)a * g^-mu,  mu = a*s

Each product mu is tied to its factors by a Pedersen multiplication
sub-relation over a commitment to one factor: Com^a = g1^mu * g'^nu.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import MalformedProof
from ..params import Params
from ..primitives import Opening, commit
from .sigma import Equation, LinearStatement, Proof

TAG_KEYREG = 1
TAG_VOUCHER = 2
TAG_SPEND = 3
TAG_RANGE = 4
TAG_CREDENTIAL = 5
TAG_VOUCHER_COMPACT = 6
TAG_OPENING = 7


def _pedersen_eq(params: Params, com, names, blinding_name) -> Equation:
    gens = params.gens
    terms = [(gens.gs[i], n) for i, n in enumerate(names)]
    terms.append((gens.gprime, blinding_name))
    return Equation(com, tuple(terms))


# -- key registration -------------------------------------------------------


def key_registration_statement(params: Params, com, pk, n_messages: int) -> LinearStatement:
    """com = comm(m_1..m_n; b) and pk = g^m_1"""
    names = [f"m{i}" for i in range(n_messages)]
    return LinearStatement(
        params.group,
        TAG_KEYREG,
        b"key-registration",
        [_pedersen_eq(params, com, names, "b"), Equation(pk, ((params.g, "m0"),))],
    )


def prove_key_registration(params: Params, com, pk, opening: Opening, rng) -> Proof:
    st = key_registration_statement(params, com, pk, len(opening.messages))
    witness = {f"m{i}": m for i, m in enumerate(opening.messages)}
    witness["b"] = opening.blinding
    return st.prove(witness, rng)


def verify_key_registration(params: Params, com, pk, proof: Proof, n_messages: int) -> bool:
    return key_registration_statement(params, com, pk, n_messages).verify(proof)


def opening_statement(params: Params, com, n_messages: int) -> LinearStatement:
    names = [f"m{i}" for i in range(n_messages)]
    return LinearStatement(params.group, TAG_OPENING, b"opening", [_pedersen_eq(params, com, names, "b")])


def prove_opening(params: Params, com, opening: Opening, rng) -> Proof:
    witness = {f"m{i}": m for i, m in enumerate(opening.messages)}
    witness["b"] = opening.blinding
    return opening_statement(params, com, len(opening.messages)).prove(witness, rng)


def verify_opening_proof(params: Params, com, proof: Proof, n_messages: int) -> bool:
    return opening_statement(params, com, n_messages).verify(proof)


# -- voucher ------------------------------------------------------------------


@dataclass(frozen=True)
class VoucherStatement:
    C1: object
    C2: object
    Q: object
    X: object
    Y: object
    cid: int
    r_c: int


@dataclass(frozen=True)
class VoucherWitness:
    k1: int
    b1: int
    k2: int
    b2: int
    sk_atm: int
    q_blind: int


def voucher_statement(params: Params, st: VoucherStatement) -> LinearStatement:
    g, p = params.g, params.p
    g1, gp = params.gens.gs[0], params.gens.gprime
    inv_g = g.inverse()
    return LinearStatement(
        params.group,
        TAG_VOUCHER,
        b"voucher",
        [
            _pedersen_eq(params, st.C1, ["k1"], "b1"),
            _pedersen_eq(params, st.C2, ["k2"], "b2"),
            _pedersen_eq(params, st.Q, ["sk"], "d"),
            # X = F_k1(cid)
            Equation(g * st.X ** (-(1 + st.cid) % p), ((st.X, "k1"),)),
            # Y = g^sk * F_k2(0)^r_c
            Equation(g ** st.r_c / st.Y, ((st.Y, "k2"), (inv_g, "sk"), (inv_g, "mu"))),
            # mu = sk * k2
            Equation(params.group.identity(), ((st.Q, "k2"), (g1.inverse(), "mu"), (gp.inverse(), "nu"))),
        ],
        context=params.group.encode_scalar(st.cid) + params.group.encode_scalar(st.r_c),
    )


def voucher_witness(params, wit: VoucherWitness) -> dict:
    p = params.p
    return {
        "k1": wit.k1,
        "b1": wit.b1,
        "k2": wit.k2,
        "b2": wit.b2,
        "sk": wit.sk_atm,
        "d": wit.q_blind,
        "mu": wit.sk_atm * wit.k2 % p,
        "nu": wit.q_blind * wit.k2 % p,
    }


def prove_voucher(params: Params, st: VoucherStatement, wit: VoucherWitness, rng) -> Proof:
    return voucher_statement(params, st).prove(voucher_witness(params, wit), rng)


def verify_voucher(params: Params, st: VoucherStatement, proof: Proof) -> bool:
    return voucher_statement(params, st).verify(proof)


# -- compact voucher ------------------------------------------------------------


@dataclass(frozen=True)
class CompactVoucherStatement:
    C1: object
    C2: object
    Q: object
    J: object
    X: object
    Y: object
    r_c: int


@dataclass(frozen=True)
class CompactVoucherWitness:
    k1: int
    b1: int
    k2: int
    b2: int
    sk_atm: int
    q_blind: int
    ctr: int
    j_blind: int


def compact_voucher_statement(params: Params, st: CompactVoucherStatement) -> LinearStatement:
    """Both PRF evaluations take the hidden counter committed in J."""
    g = params.g
    g1, gp = params.gens.gs[0], params.gens.gprime
    inv_g = g.inverse()
    return LinearStatement(
        params.group,
        TAG_VOUCHER_COMPACT,
        b"voucher-compact",
        [
            _pedersen_eq(params, st.C1, ["k1"], "b1"),
            _pedersen_eq(params, st.C2, ["k2"], "b2"),
            _pedersen_eq(params, st.Q, ["sk"], "d"),
            _pedersen_eq(params, st.J, ["ctr"], "bj"),
            # X = F_k1(ctr):  g * X^-1 = X^k1 * X^ctr
            Equation(g / st.X, ((st.X, "k1"), (st.X, "ctr"))),
            # Y = g^sk * F_k2(ctr)^r_c
            Equation(g ** st.r_c / st.Y, ((st.Y, "k2"), (st.Y, "ctr"), (inv_g, "sk"), (inv_g, "mu"))),
            # mu = sk * (k2 + ctr)
            Equation(
                params.group.identity(),
                ((st.Q, "k2"), (st.Q, "ctr"), (g1.inverse(), "mu"), (gp.inverse(), "nu")),
            ),
        ],
        context=params.group.encode_scalar(st.r_c),
    )


def compact_voucher_witness(params: Params, wit: CompactVoucherWitness) -> dict:
    p = params.p
    t = (wit.k2 + wit.ctr) % p
    return {
        "k1": wit.k1,
        "b1": wit.b1,
        "k2": wit.k2,
        "b2": wit.b2,
        "sk": wit.sk_atm,
        "d": wit.q_blind,
        "ctr": wit.ctr,
        "bj": wit.j_blind,
        "mu": wit.sk_atm * t % p,
        "nu": wit.q_blind * t % p,
    }


def prove_voucher_compact(params: Params, st: CompactVoucherStatement, wit: CompactVoucherWitness, rng) -> Proof:
    return compact_voucher_statement(params, st).prove(compact_voucher_witness(params, wit), rng)


def verify_voucher_compact(params: Params, st: CompactVoucherStatement, proof: Proof) -> bool:
    return compact_voucher_statement(params, st).verify(proof)


# -- spend ----------------------------------------------------------------------


@dataclass(frozen=True)
class SpendStatement:
    P: object
    Z: object
    cid: int
    r_t: int


@dataclass(frozen=True)
class SpendWitness:
    sk: int
    s: int
    blinding: int


def spend_statement(params: Params, st: SpendStatement, aux) -> LinearStatement:
    """``aux`` is a fresh commitment A = g1^sk * g'^rho carried in the proof,
    needed because P commits to sk and s together."""
    g, p = params.g, params.p
    g1, gp = params.gens.gs[0], params.gens.gprime
    e = (1 + st.cid) % p
    return LinearStatement(
        params.group,
        TAG_SPEND,
        b"spend",
        [
            _pedersen_eq(params, st.P, ["sk", "s"], "b"),
            _pedersen_eq(params, aux, ["sk"], "rho"),
            # mu = sk * s
            Equation(params.group.identity(), ((aux, "s"), (g1.inverse(), "mu"), (gp.inverse(), "nu"))),
            # Z = g^sk * F_s(cid)^r_t
            Equation(
                g ** st.r_t * st.Z ** (-e % p),
                ((st.Z, "s"), (g ** (-e % p), "sk"), (g.inverse(), "mu")),
            ),
        ],
        context=params.group.encode_scalar(st.cid) + params.group.encode_scalar(st.r_t),
        elements=(aux,),
    )


def spend_instance(params: Params, st: SpendStatement, wit: SpendWitness, rng):
    """The linear statement (with a fresh helper commitment) and its witness."""
    p = params.p
    rho = params.group.random_scalar(rng)
    aux = commit([wit.sk], rho, params.gens)
    witness = {
        "sk": wit.sk,
        "s": wit.s,
        "b": wit.blinding,
        "rho": rho,
        "mu": wit.sk * wit.s % p,
        "nu": rho * wit.s % p,
    }
    return spend_statement(params, st, aux), witness


def prove_spend(params: Params, st: SpendStatement, wit: SpendWitness, rng) -> Proof:
    statement, witness = spend_instance(params, st, wit, rng)
    return statement.prove(witness, rng)


def verify_spend(params: Params, st: SpendStatement, proof: Proof) -> bool:
    if proof.tag != TAG_SPEND:
        raise MalformedProof("not a spend proof")
    if len(proof.elements) != 1:
        raise MalformedProof("spend proof carries exactly one helper commitment")
    return spend_statement(params, st, proof.elements[0]).verify(proof)
