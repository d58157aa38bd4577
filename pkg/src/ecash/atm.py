"""ATM actor: stocks blind-signed coins, runs the fair-exchange issuing state
machine, and in compact mode reuses one certified PRF key pair with a counter.

Issuing is two messages on the ATM side. ``begin_issue`` builds the voucher
and returns a signed Promise committing to I = ro(C, pk_U, pk_A); the coin
itself is released by ``complete_issue`` only after a valid receipt.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, field

from . import credsig, wire
from .errors import (
    AlreadyCompleted,
    DegenerateInput,
    InsufficientBalance,
    InvalidReceipt,
    InvalidUserProof,
    KeyExhausted,
    MalformedProof,
    OutOfStock,
    UnknownSession,
)
from .nizk.rangeproof import prove_range
from .nizk.statements import (
    CompactVoucherStatement,
    CompactVoucherWitness,
    VoucherStatement,
    VoucherWitness,
    prove_key_registration,
    prove_opening,
    prove_voucher,
    prove_voucher_compact,
)
from .offline import LowBalanceFilter
from .primitives import Opening, SigningKey, commit, default_rng, dy_prf, gen_nonce, sig_verify
from .protocol import coin_id, derive_cid, derive_rc, promise_message, withdrawal_message

PROMISED, DONE, ABORTED, EXPIRED = "promised", "done", "aborted", "expired"


@dataclass
class AtmConfig:
    offline: bool = False
    session_ttl: int = 60  # simulated seconds
    flush_interval: int = 300
    withdrawal_amount: int = 1


@dataclass
class IssueSession:
    nonce: bytes
    record: wire.KSRecord
    coin: object
    voucher: object
    P: object
    pk_U: object
    created: int
    phase: str = PROMISED
    receipt: wire.Receipt | None = None
    ctr: int = 0  # compact mode only


@dataclass
class CompactKeys:
    k1: int
    k2: int
    cred_k1: credsig.Credential
    cred_k2: credsig.Credential
    n: int
    ctr: int = 0


@dataclass
class Atm:
    bank: object
    sk_A: int
    pk_A: object
    sig_key: SigningKey
    cred: credsig.Credential
    config: AtmConfig
    rng: object
    ks: deque = field(default_factory=deque)
    pending: dict = field(default_factory=dict)
    deferred: list = field(default_factory=list)
    voided: list = field(default_factory=list)
    bloom: LowBalanceFilter | None = None
    compact: CompactKeys | None = None
    now: int = 0
    issued: int = 0
    _lock: object = field(default_factory=threading.RLock, repr=False)

    @property
    def params(self):
        return self.bank.params

    @property
    def pub(self):
        return self.bank.public

    @property
    def sig_pk(self) -> bytes:
        return self.sig_key.public_bytes

    # -- stocking ---------------------------------------------------------------------
    def _fresh_key(self) -> int:
        grp = self.params.group
        for _ in range(64):
            k = grp.random_scalar(self.rng, nonzero=True)
            if (1 + k) % self.params.p:
                return k
        raise DegenerateInput("could not sample a usable PRF key")

    def _triple(self, k1: int, k2: int):
        grp, gens = self.params.group, self.params.gens
        b1, b2, d = (grp.random_scalar(self.rng) for _ in range(3))
        C1, C2, Q = commit([k1], b1, gens), commit([k2], b2, gens), commit([self.sk_A], d, gens)
        return (C1, C2, Q, k1, b1, k2, b2, d)

    def _stock(self, triples) -> int:
        blind = self.pub.blind_pk
        rs = [blind.blinding_factor(self.rng) for _ in triples]
        Ks = [blind.blind(wire.coin_digest(*t[:3]), r) for t, r in zip(triples, rs)]
        sigs = self.bank.issue_coin(self.pk_A, Ks)
        for t, r, s in zip(triples, rs, sigs):
            sigma = blind.unblind(s, r)
            if not blind.verify(wire.coin_digest(*t[:3]), sigma):
                raise InvalidReceipt("bank returned an invalid coin signature")
            with self._lock:
                self.ks.append(wire.KSRecord(*t, sigma))
        return len(triples)

    def req_coin(self, n: int) -> int:
        """Stock ``n`` fresh coins, each with its own PRF key pair."""
        return self._stock([self._triple(self._fresh_key(), self._fresh_key()) for _ in range(n)])

    # -- compact keys -----------------------------------------------------------------
    def setup_compact(self) -> None:
        """Certify a fresh (k1, k2) pair once; it serves compact_n issuances."""
        params, pub = self.params, self.pub
        creds = []
        keys = (self._fresh_key(), self._fresh_key())
        for k in keys:
            opening = Opening((k,), params.group.random_scalar(self.rng))
            com = commit(opening.messages, opening.blinding, params.gens)
            issued = self.bank.certify_coin_key(self.pk_A, com, prove_opening(params, com, opening, self.rng), self.rng)
            creds.append(credsig.finalize(pub.coin_cred, issued, opening))
        with self._lock:
            if self.compact is not None:
                # stocked triples commit to the retired keys
                self.voided.extend(self.ks)
                self.ks.clear()
            self.compact = CompactKeys(keys[0], keys[1], creds[0], creds[1], pub.compact_n)

    def req_coin_compact(self, n: int | None = None) -> int:
        """Pre-stock bank-signed triples for the current compact key pair."""
        if self.compact is None:
            self.setup_compact()
        ck = self.compact
        n = ck.n - ck.ctr - len(self.ks) if n is None else n
        return self._stock([self._triple(ck.k1, ck.k2) for _ in range(max(0, n))])

    # -- balance gate ---------------------------------------------------------------------
    def install_filter(self, f: LowBalanceFilter) -> bool:
        """Swap in a newer filter; stale epochs are ignored."""
        with self._lock:
            if self.bloom is not None and f.epoch <= self.bloom.epoch:
                return False
            self.bloom = f
            return True

    def _check_balance(self, pk_U) -> None:
        if self.config.offline:
            if self.bloom is None or self.bloom.contains(bytes(pk_U)):
                raise InsufficientBalance("account flagged in the low-balance filter")
        elif self.bank.balance(pk_U) < self.config.withdrawal_amount:
            raise InsufficientBalance("balance below the withdrawal amount")

    def _check_user(self, pk_U, P, pi_skU) -> None:
        try:
            ok = credsig.zverify(self.pub.user_cred, P, pi_skU)
        except (MalformedProof, ValueError):
            ok = False
        if not ok:
            raise InvalidUserProof("user credential proof does not verify")
        self._check_balance(pk_U)

    def _reserve(self) -> wire.KSRecord:
        with self._lock:
            if not self.ks:
                raise OutOfStock("no coins in stock")
            return self.ks.popleft()

    # -- issuing ----------------------------------------------------------------------------
    def _opening_q(self, rec: wire.KSRecord) -> Opening:
        return Opening((self.sk_A,), rec.q_blind)

    def make_voucher(self, rec: wire.KSRecord, P, pi_skU):
        params, g = self.params, self.params.g
        r_c = derive_rc(params, P)
        cid = derive_cid(params, r_c)
        X = dy_prf(g, rec.k1, cid)
        Y = self.pk_A * dy_prf(g, rec.k2, 0) ** r_c
        st = VoucherStatement(rec.C1, rec.C2, rec.Q, X, Y, cid, r_c)
        wit = VoucherWitness(rec.k1, rec.b1, rec.k2, rec.b2, self.sk_A, rec.q_blind)
        pi_cid = prove_voucher(params, st, wit, self.rng)
        pi_skA = credsig.zprove(self.pub.atm_cred, rec.Q, self._opening_q(rec), self.cred, self.rng)
        return rec.coin, wire.Voucher(P, pi_skU, X, Y, pi_cid, pi_skA, r_c)

    def make_compact_voucher(self, rec: wire.KSRecord, ctr: int, P, pi_skU):
        params, g, pub = self.params, self.params.g, self.pub
        ck = self.compact
        gens = params.gens
        r_c = derive_rc(params, P)
        j_blind = params.group.random_scalar(self.rng)
        J = commit([ctr], j_blind, gens)
        X = dy_prf(g, ck.k1, ctr)
        Y = self.pk_A * dy_prf(g, ck.k2, ctr) ** r_c
        st = CompactVoucherStatement(rec.C1, rec.C2, rec.Q, J, X, Y, r_c)
        wit = CompactVoucherWitness(ck.k1, rec.b1, ck.k2, rec.b2, self.sk_A, rec.q_blind, ctr, j_blind)
        pi_cid = prove_voucher_compact(params, st, wit, self.rng)
        pi_ctr = prove_range(params, J, ctr, j_blind, ck.n, self.rng)
        pi_k1 = credsig.zprove(pub.coin_cred, rec.C1, Opening((ck.k1,), rec.b1), ck.cred_k1, self.rng)
        pi_k2 = credsig.zprove(pub.coin_cred, rec.C2, Opening((ck.k2,), rec.b2), ck.cred_k2, self.rng)
        pi_skA = credsig.zprove(pub.atm_cred, rec.Q, self._opening_q(rec), self.cred, self.rng)
        coin = wire.CompactCoin(rec.C1, rec.C2, rec.Q, pi_k1, pi_k2, pi_skA, rec.sigma_c)
        return coin, wire.CompactVoucher(J, P, pi_skU, X, Y, pi_ctr, pi_cid, r_c)

    def promise(self, rec, coin, voucher, pk_U, P, ctr: int = 0) -> wire.Promise:
        I = coin_id(coin, pk_U, self.pk_A)
        nonce = gen_nonce(self.rng)
        sigma = self.sig_key.sign(promise_message(I, voucher, nonce))
        with self._lock:
            self.pending[nonce] = IssueSession(nonce, rec, coin, voucher, P, pk_U, self.now, ctr=ctr)
        return wire.Promise(sigma, I, voucher, nonce)

    def begin_issue(self, pk_U, P, pi_skU) -> wire.Promise:
        self._check_user(pk_U, P, pi_skU)
        rec = self._reserve()
        coin, voucher = self.make_voucher(rec, P, pi_skU)
        return self.promise(rec, coin, voucher, pk_U, P)

    def begin_issue_compact(self, pk_U, P, pi_skU) -> wire.Promise:
        ck = self.compact
        if ck is None:
            raise KeyExhausted("no compact key pair set up")
        self._check_user(pk_U, P, pi_skU)
        with self._lock:
            if ck.ctr >= ck.n:
                raise KeyExhausted(f"key pair already used {ck.n} times")
            rec = self._reserve()
            ck.ctr += 1
            ctr = ck.ctr
        coin, voucher = self.make_compact_voucher(rec, ctr, P, pi_skU)
        return self.promise(rec, coin, voucher, pk_U, P, ctr)

    def _user_sig_pk(self, pk_U) -> bytes | None:
        acct = self.bank.account(pk_U)
        return acct.sig_pk if acct else None

    def check_receipt(self, session: IssueSession, receipt: wire.Receipt) -> bool:
        sig_pk = self._user_sig_pk(session.pk_U)
        msg = withdrawal_message(session.pk_U, self.pk_A, session.nonce)
        return sig_pk is not None and sig_verify(sig_pk, msg, receipt.sig)

    def complete_issue(self, nonce: bytes, receipt: wire.Receipt):
        """Release the coin for a receipted session, exactly once."""
        with self._lock:
            session = self.pending.get(bytes(nonce))
            if session is None or session.phase in (ABORTED, EXPIRED):
                raise UnknownSession("no open session for this nonce")
            if session.phase == DONE:
                raise AlreadyCompleted("coin already released")
            if not self.check_receipt(session, receipt):
                raise InvalidReceipt("receipt does not verify")
            session.phase, session.receipt = DONE, receipt
            self.issued += 1
        self.forward_receipt(session)
        return session.coin

    def forward_receipt(self, session: IssueSession) -> int | None:
        if self.config.offline:
            with self._lock:
                self.deferred.append(session)
            return None
        return self.bank.update_bal(session.pk_U, session.receipt, self.pk_A, session.nonce)

    def flush(self) -> list:
        """Offline mode: hand the batched receipts to the bank."""
        with self._lock:
            batch, self.deferred = self.deferred, []
        return [self.bank.update_bal(s.pk_U, s.receipt, self.pk_A, s.nonce) for s in batch]

    def tick(self, seconds: int = 1) -> None:
        """Advance simulated time. Expired un-receipted sessions are voided,
        not restocked: the user holds a signed promise for that coin."""
        with self._lock:
            before, self.now = self.now, self.now + seconds
            for s in self.pending.values():
                if s.phase == PROMISED and self.now - s.created >= self.config.session_ttl:
                    s.phase = EXPIRED
                    self.voided.append(s.record)
        interval = self.config.flush_interval
        if self.config.offline and self.now // interval > before // interval:
            self.flush()

    def session(self, nonce: bytes) -> IssueSession:
        try:
            return self.pending[bytes(nonce)]
        except KeyError:
            raise UnknownSession("no such session") from None

    def save_ks(self, path) -> None:
        with open(path, "w") as fh:
            fh.writelines(wire.encode_hex(r) + "\n" for r in self.ks)

    def load_ks(self, path) -> int:
        with open(path) as fh:
            recs = [wire.decode_hex(line, self.params, wire.KSRecord) for line in fh if line.strip()]
        with self._lock:
            self.ks.extend(recs)
        return len(recs)


def init_atm(bank, config: AtmConfig | None = None, rng=None) -> Atm:
    rng = rng or default_rng()
    params = bank.params
    sk_A = params.group.random_scalar(rng, nonzero=True)
    pk_A = params.g ** sk_A
    opening = Opening((sk_A,), params.group.random_scalar(rng))
    Q = commit(opening.messages, opening.blinding, params.gens)
    sig_key = SigningKey.generate(rng)
    proof = prove_key_registration(params, Q, pk_A, opening, rng)
    issued = bank.register_atm(Q, pk_A, proof, sig_key.public_bytes, rng)
    cred = credsig.finalize(bank.public.atm_cred, issued, opening)
    return Atm(bank, sk_A, pk_A, sig_key, cred, config or AtmConfig(), rng)
