"""Scripted misbehaviour. Each function deviates from the honest protocol at
exactly one point and otherwise reuses the honest actors' code paths, so the
honest modules never carry cheat branches."""

from __future__ import annotations

from .. import wire
from ..errors import InvalidReceipt, UnknownSession
from ..nizk.sigma import Proof
from ..nizk.statements import SpendStatement, spend_statement
from ..primitives import SigningKey, commit, dy_prf
from ..protocol import derive_rt, transaction_cid, withdrawal_message


def double_spend_user(wallet, entry, pk_m, r_v: bytes) -> tuple:
    """Spend a coin again, ignoring the purse's spent flag."""
    return entry.coin, entry.voucher, wallet.make_transaction(entry, pk_m, r_v)


def double_issue_atm(atm, requests) -> list:
    """Issue one KS record to several users. ``requests`` is a list of
    (pk_U, Withdrawal) pairs; returns one Promise per request."""
    rec = atm._reserve()
    ctr = None
    if atm.compact is not None:
        atm.compact.ctr += 1
        ctr = atm.compact.ctr
    out = []
    for pk_U, w in requests:
        atm._check_user(pk_U, w.P, w.pi_skU)
        if ctr is None:
            coin, voucher = atm.make_voucher(rec, w.P, w.pi_skU)
        else:
            coin, voucher = atm.make_compact_voucher(rec, ctr, w.P, w.pi_skU)
        out.append(atm.promise(rec, coin, voucher, pk_U, w.P, ctr or 0))
    return out


def reissue_record(atm, session, pk_U, w):
    """Hand an already promised (e.g. withheld) coin to another user."""
    if isinstance(session.voucher, wire.CompactVoucher):
        coin, voucher = atm.make_compact_voucher(session.record, session.ctr, w.P, w.pi_skU)
    else:
        coin, voucher = atm.make_voucher(session.record, w.P, w.pi_skU)
    return atm.promise(session.record, coin, voucher, pk_U, w.P, session.ctr)


def withhold_coin_atm(atm, nonce: bytes, receipt: wire.Receipt):
    """Take the receipt, keep the coin. The receipt is still checked (the
    cheat is only in not releasing C) and returned for later redemption."""
    session = atm.pending.get(bytes(nonce))
    if session is None:
        raise UnknownSession("no open session for this nonce")
    if not atm.check_receipt(session, receipt):
        raise InvalidReceipt("receipt does not verify")
    session.phase, session.receipt = "withheld", receipt
    return session


def false_abort_user(wallet, w) -> wire.AbortRecord:
    """File an AbortWithdrawal after having received the coin."""
    rec = wallet.abort_record(w)
    wallet.bank.record_abort(rec)
    return rec


def forge_receipt(forger_key: SigningKey, victim_pk, pk_A, nonce: bytes) -> wire.Receipt:
    """A receipt on the victim's behalf, signed with the wrong key."""
    return wire.Receipt(forger_key.sign(withdrawal_message(victim_pk, pk_A, nonce)))


def tamper(data: bytes, field_name: str, rng, max_bytes: int = 3) -> bytes:
    """Flip random bits inside one top-level field of an encoded object."""
    spans = {name: (a, b) for name, a, b in wire.field_spans(data)}
    a, b = spans[field_name]
    if a == b:
        raise ValueError(f"field {field_name} is empty")
    out = bytearray(data)
    for _ in range(rng.randint(1, max_bytes)):
        i = rng.randrange(a, b)
        out[i] ^= rng.randint(1, 255)
    return bytes(out)


def steal_and_spend(thief, entry, pk_m, r_v: bytes) -> tuple:
    """Spend a coin+voucher copied from someone else's purse. The thief runs
    the spend prover with its own secrets against the victim's P; the proof
    is well-formed but cannot satisfy the statement."""
    params, g, p = thief.params, thief.params.g, thief.params.p
    cid = transaction_cid(params, entry.voucher)
    r_t = derive_rt(params, pk_m, r_v)
    Z = g ** thief.sk * dy_prf(g, thief.s, cid) ** r_t
    rho = params.group.random_scalar(thief.rng)
    st = spend_statement(params, SpendStatement(entry.voucher.P, Z, cid, r_t), commit([thief.sk], rho, params.gens))
    witness = {
        "sk": thief.sk,
        "s": thief.s,
        "b": params.group.random_scalar(thief.rng),
        "rho": rho,
        "mu": thief.sk * thief.s % p,
        "nu": rho * thief.s % p,
    }
    nonces, commitments = st.commit(thief.rng)
    c = st.challenge(commitments)
    pi_T = Proof(st.tag, st.elements, commitments, c, st.respond(witness, nonces, c))
    return entry.coin, entry.voucher, wire.Transaction(Z, pi_T, bytes(r_v), r_t)
