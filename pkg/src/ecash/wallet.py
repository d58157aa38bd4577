"""User and merchant actors.

A user holds (sk_U, s) certified by the bank, withdraws coins through the
fair-exchange flow, and spends them with a double-spending token

    Z = g^sk_U * F_s(cid)^r_t,    r_t = H(pk_m, r_v).

A merchant is a user in the merchant role: it hands out fresh r_v values,
runs the VerifyTx checks, and deposits accepted transactions.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from . import credsig, wire
from .errors import (
    AlreadySpent,
    AtmWithheldCoin,
    CoinMismatch,
    NotInPurse,
    PromiseInvalid,
    VerificationFailed,
)
from .nizk.statements import SpendStatement, SpendWitness, prove_key_registration, prove_spend
from .primitives import Opening, SigningKey, commit, default_rng, dy_prf, gen_nonce, sig_verify
from .protocol import (
    coin_id,
    derive_rc,
    derive_rt,
    promise_message,
    transaction_cid,
    verify_transaction,
    verify_voucher_standalone,
    withdrawal_message,
)


@dataclass
class PurseEntry:
    coin: object
    voucher: object
    blinding: int
    spent: bool = False

    def record(self) -> wire.PurseRecord:
        return wire.PurseRecord(self.coin, self.voucher, self.blinding, self.spent)


@dataclass
class Withdrawal:
    """User-side state of one withdrawal in flight."""

    P: object
    blinding: int
    pi_skU: object
    pk_A: object = None
    atm_sig_pk: bytes = b""
    promise: wire.Promise | None = None


@dataclass
class Wallet:
    pub: object
    bank: object
    sk: int
    s: int
    pk: object
    sig_key: SigningKey
    cred: credsig.Credential
    rng: object
    purse: list = field(default_factory=list)
    audit: list = field(default_factory=list)  # coins that failed the I-check
    _lock: object = field(default_factory=threading.RLock, repr=False)

    @property
    def params(self):
        return self.pub.params

    @property
    def sig_pk(self) -> bytes:
        return self.sig_key.public_bytes

    # -- withdrawal -----------------------------------------------------------------
    def start_withdrawal(self) -> Withdrawal:
        """P = comm(sk_U, s) under fresh randomness plus a credential proof."""
        params = self.params
        opening = Opening((self.sk, self.s), params.group.random_scalar(self.rng))
        P = commit(opening.messages, opening.blinding, params.gens)
        pi = credsig.zprove(self.pub.user_cred, P, opening, self.cred, self.rng)
        return Withdrawal(P, opening.blinding, pi)

    def issue_receipt(self, w: Withdrawal, promise: wire.Promise, pk_A, atm_sig_pk: bytes) -> wire.Receipt:
        """Check the promise, then sign <withdrawal, pk_U, pk_A, nonce>."""
        if not sig_verify(atm_sig_pk, promise_message(promise.I, promise.V, promise.nonce), promise.Sigma):
            raise PromiseInvalid("promise signature does not verify")
        if promise.V.P != w.P or promise.V.r_c != derive_rc(self.params, w.P):
            raise PromiseInvalid("voucher is not for this withdrawal")
        w.pk_A, w.atm_sig_pk, w.promise = pk_A, bytes(atm_sig_pk), promise
        return wire.Receipt(self.sig_key.sign(withdrawal_message(self.pk, pk_A, promise.nonce)))

    def abort_record(self, w: Withdrawal) -> wire.AbortRecord:
        pr = w.promise
        return wire.AbortRecord(pr.Sigma, pr.I, pr.V, pr.nonce, self.pk, w.pk_A)

    def receive_coin(self, w: Withdrawal, coin) -> PurseEntry:
        """Accept the coin, or file an AbortWithdrawal with the bank."""
        if coin is None:
            rec = self.abort_record(w)
            self.bank.record_abort(rec)
            raise AtmWithheldCoin(rec)
        voucher = w.promise.V
        if coin_id(coin, self.pk, w.pk_A) != w.promise.I or not verify_voucher_standalone(self.pub, coin, voucher):
            rec = self.abort_record(w)
            self.audit.append(coin)
            self.bank.record_abort(rec)
            raise CoinMismatch(rec)
        entry = PurseEntry(coin, voucher, w.blinding)
        with self._lock:
            self.purse.append(entry)
        return entry

    def withdraw(self, atm, compact: bool = False) -> PurseEntry:
        w = self.start_withdrawal()
        begin = atm.begin_issue_compact if compact else atm.begin_issue
        promise = begin(self.pk, w.P, w.pi_skU)
        receipt = self.issue_receipt(w, promise, atm.pk_A, atm.sig_pk)
        return self.receive_coin(w, atm.complete_issue(promise.nonce, receipt))

    # -- spending -------------------------------------------------------------------------
    def make_transaction(self, entry: PurseEntry, pk_m, r_v: bytes) -> wire.Transaction:
        """Build T without touching the purse (used by honest and scripted code)."""
        params, g = self.params, self.params.g
        voucher = entry.voucher
        if voucher.r_c != derive_rc(params, voucher.P):
            raise VerificationFailed("rc", "voucher r_c does not match P")
        cid = transaction_cid(params, voucher)
        r_t = derive_rt(params, pk_m, r_v)
        Z = g ** self.sk * dy_prf(g, self.s, cid) ** r_t
        pi_T = prove_spend(params, SpendStatement(voucher.P, Z, cid, r_t), SpendWitness(self.sk, self.s, entry.blinding), self.rng)
        return wire.Transaction(Z, pi_T, bytes(r_v), r_t)

    def spend(self, entry: PurseEntry, pk_m, r_v: bytes) -> tuple:
        """Returns (C, V, T) and marks the entry spent."""
        with self._lock:
            if not any(e is entry for e in self.purse):
                raise NotInPurse("entry is not in this purse")
            if entry.spent:
                raise AlreadySpent("coin already spent")
            entry.spent = True
        try:
            tx = self.make_transaction(entry, pk_m, r_v)
        except Exception:
            entry.spent = False
            raise
        return entry.coin, entry.voucher, tx

    def unspent(self) -> list:
        return [e for e in self.purse if not e.spent]

    # -- persistence ------------------------------------------------------------------------
    def save_purse(self, path) -> None:
        with open(path, "w") as fh:
            fh.writelines(wire.encode_hex(e.record()) + "\n" for e in self.purse)

    def load_purse(self, path) -> int:
        with open(path) as fh:
            recs = [wire.decode_hex(line, self.params, wire.PurseRecord) for line in fh if line.strip()]
        with self._lock:
            self.purse.extend(PurseEntry(r.coin, r.voucher, r.blinding, r.spent) for r in recs)
        return len(recs)


def init_user(bank, rng=None) -> Wallet:
    """Sample (sk_U, s), register P = comm(sk_U, s) and keep the credential."""
    rng = rng or default_rng()
    params, pub = bank.params, bank.public
    sk = params.group.random_scalar(rng, nonzero=True)
    s = params.group.random_scalar(rng)
    pk = params.g ** sk
    opening = Opening((sk, s), params.group.random_scalar(rng))
    P = commit(opening.messages, opening.blinding, params.gens)
    sig_key = SigningKey.generate(rng)
    issued = bank.register_user(P, pk, prove_key_registration(params, P, pk, opening, rng), sig_key.public_bytes, rng)
    cred = credsig.finalize(pub.user_cred, issued, opening)
    return Wallet(pub, bank, sk, s, pk, sig_key, cred, rng)


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.accepted


@dataclass
class MerchantView:
    """Merchant role of a registered user."""

    wallet: Wallet
    sessions: set = field(default_factory=set)
    used: set = field(default_factory=set)
    deposits: list = field(default_factory=list)
    _lock: object = field(default_factory=threading.Lock, repr=False)

    @property
    def pk_m(self):
        return self.wallet.pk

    def new_session(self) -> bytes:
        r_v = gen_nonce(self.wallet.rng)
        with self._lock:
            self.sessions.add(r_v)
        return r_v

    def verify_tx(self, coin, voucher, tx, r_v: bytes) -> Verdict:
        """Accept iff every VerifyTx check passes; r_v must be an open session."""
        with self._lock:
            fresh = r_v in self.sessions and r_v not in self.used
        if not fresh:
            return Verdict(False, "rt")
        try:
            verify_transaction(self.wallet.pub, coin, voucher, tx, self.pk_m, r_v)
        except VerificationFailed as exc:
            return Verdict(False, exc.reason)
        with self._lock:
            if r_v in self.used:
                return Verdict(False, "rt")
            self.sessions.discard(r_v)
            self.used.add(r_v)
        return Verdict(True)

    def deposit(self, coin, voucher, tx):
        result = self.wallet.bank.update_tx(coin, voucher, tx, self.pk_m)
        self.deposits.append((coin, voucher, tx, result))
        return result

    def accept(self, coin, voucher, tx, r_v: bytes):
        """verify_tx then deposit; returns (verdict, bank result or None)."""
        verdict = self.verify_tx(coin, voucher, tx, r_v)
        if not verdict:
            return verdict, None
        return verdict, self.deposit(coin, voucher, tx)


# compact spends use the same code path: cid comes from H(P, J) for compact vouchers
spend_compact = Wallet.spend


def verify_tx_compact(merchant: MerchantView, coin, voucher, tx, r_v: bytes) -> Verdict:
    return merchant.verify_tx(coin, voucher, tx, r_v)
