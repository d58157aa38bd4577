"""Derivations and transaction checks shared by every party.

r_c = H(P), cid = r_c + 1, r_t = H(pk_m, r_v), I = ro(C, pk_U, pk_A), and the
ordered VerifyTx check list run by merchants and again by the bank.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import credsig, wire
from .blindsig import RsaPublicKey
from .credsig import CredPublicKey
from .errors import MalformedProof, VerificationFailed
from .nizk.rangeproof import verify_range
from .nizk.statements import (
    CompactVoucherStatement,
    SpendStatement,
    VoucherStatement,
    verify_spend,
    verify_voucher,
    verify_voucher_compact,
)
from .params import Params
from .primitives import concat, ro

# reject reasons, in check order
REASONS = ("rc", "rt", "user_credential", "atm_credential", "bank_signature", "voucher_proof", "spend_proof")
COMPACT_REASONS = (
    "rc",
    "rt",
    "user_credential",
    "atm_credential",
    "coin_keys",
    "bank_signature",
    "range",
    "voucher_proof",
    "spend_proof",
)


@dataclass(frozen=True)
class BankPublic:
    """Everything a non-bank party needs to verify coins and vouchers."""

    params: Params
    blind_pk: RsaPublicKey
    user_cred: CredPublicKey
    atm_cred: CredPublicKey
    coin_cred: CredPublicKey
    compact_n: int


def derive_rc(params: Params, P) -> int:
    return params.group.hash_to_scalar(b"rc", bytes(P))


def derive_cid(params: Params, r_c: int) -> int:
    return (r_c + 1) % params.p


def derive_cid_compact(params: Params, P, J) -> int:
    return params.group.hash_to_scalar(b"cid", concat(bytes(P), bytes(J)))


def derive_rt(params: Params, pk_m, r_v: bytes) -> int:
    return params.group.hash_to_scalar(b"rt", concat(bytes(pk_m), bytes(r_v)))


def coin_id(coin, pk_U, pk_A) -> bytes:
    """I = ro(C, pk_U, pk_A); the promise commits the ATM to this coin."""
    return ro(b"coin-id", concat(wire.encode(coin), bytes(pk_U), bytes(pk_A)))


def promise_message(I: bytes, voucher, nonce: bytes) -> bytes:
    return concat(b"promise", I, wire.encode(voucher), nonce)


def withdrawal_message(pk_U, pk_A, nonce: bytes) -> bytes:
    return concat(b"withdrawal", bytes(pk_U), bytes(pk_A), nonce)


def same_voucher(a, b) -> bool:
    return type(a) is type(b) and a.Y == b.Y and a.r_c == b.r_c and a.X == b.X


def transaction_cid(params: Params, voucher) -> int:
    if isinstance(voucher, wire.CompactVoucher):
        return derive_cid_compact(params, voucher.P, voucher.J)
    return derive_cid(params, voucher.r_c)


def _check(reason: str, fn) -> None:
    try:
        ok = fn()
    except (MalformedProof, ValueError) as exc:
        raise VerificationFailed(reason, str(exc)) from None
    if not ok:
        raise VerificationFailed(reason)


def verify_transaction(pub: BankPublic, coin, voucher, tx, pk_m, r_v: bytes | None = None) -> None:
    """Run the VerifyTx checks in order; raise VerificationFailed(reason) on the
    first failure. ``r_v`` is the merchant's own session value when known."""
    params = pub.params
    compact = isinstance(voucher, wire.CompactVoucher)
    if compact != isinstance(coin, wire.CompactCoin) or not isinstance(voucher, (wire.Voucher, wire.CompactVoucher)):
        raise VerificationFailed("malformed", "coin and voucher types do not match")
    if not isinstance(tx, wire.Transaction):
        raise VerificationFailed("malformed", "not a transaction")

    _check("rc", lambda: voucher.r_c == derive_rc(params, voucher.P))
    _check("rt", lambda: (r_v is None or tx.r_v == r_v) and tx.r_t == derive_rt(params, pk_m, tx.r_v))
    _check("user_credential", lambda: credsig.zverify(pub.user_cred, voucher.P, voucher.pi_skU))
    _check("atm_credential", lambda: credsig.zverify(pub.atm_cred, coin.Q, coin.pi_skA if compact else voucher.pi_skA))
    if compact:
        _check(
            "coin_keys",
            lambda: credsig.zverify(pub.coin_cred, coin.C1, coin.pi_k1) and credsig.zverify(pub.coin_cred, coin.C2, coin.pi_k2),
        )
    _check("bank_signature", lambda: pub.blind_pk.verify(coin.digest(), coin.sigma_c))
    if compact:
        _check("range", lambda: verify_range(params, voucher.J, pub.compact_n, voucher.pi_ctr))
        st = CompactVoucherStatement(coin.C1, coin.C2, coin.Q, voucher.J, voucher.X, voucher.Y, voucher.r_c)
        _check("voucher_proof", lambda: verify_voucher_compact(params, st, voucher.pi_cid))
    else:
        st = VoucherStatement(coin.C1, coin.C2, coin.Q, voucher.X, voucher.Y, derive_cid(params, voucher.r_c), voucher.r_c)
        _check("voucher_proof", lambda: verify_voucher(params, st, voucher.pi_cid))
    cid = transaction_cid(params, voucher)
    _check("spend_proof", lambda: verify_spend(params, SpendStatement(voucher.P, tx.Z, cid, tx.r_t), tx.pi_T))


def verify_voucher_standalone(pub: BankPublic, coin, voucher) -> bool:
    """Voucher-only checks (no transaction): what a user runs on a fresh coin."""
    params = pub.params
    try:
        if voucher.r_c != derive_rc(params, voucher.P):
            return False
        if isinstance(voucher, wire.CompactVoucher):
            if not (
                credsig.zverify(pub.atm_cred, coin.Q, coin.pi_skA)
                and credsig.zverify(pub.coin_cred, coin.C1, coin.pi_k1)
                and credsig.zverify(pub.coin_cred, coin.C2, coin.pi_k2)
                and verify_range(params, voucher.J, pub.compact_n, voucher.pi_ctr)
            ):
                return False
            st = CompactVoucherStatement(coin.C1, coin.C2, coin.Q, voucher.J, voucher.X, voucher.Y, voucher.r_c)
            ok = verify_voucher_compact(params, st, voucher.pi_cid)
        else:
            if not credsig.zverify(pub.atm_cred, coin.Q, voucher.pi_skA):
                return False
            st = VoucherStatement(coin.C1, coin.C2, coin.Q, voucher.X, voucher.Y, derive_cid(params, voucher.r_c), voucher.r_c)
            ok = verify_voucher(params, st, voucher.pi_cid)
        return ok and credsig.zverify(pub.user_cred, voucher.P, voucher.pi_skU) and pub.blind_pk.verify(coin.digest(), coin.sigma_c)
    except (MalformedProof, ValueError):
        return False
