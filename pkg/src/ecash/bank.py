"""The bank: key setup, registration, minting, balances, deposits, and the
double-spend / double-issue / abort adjudication.

Recovery algebra for a coin seen twice:

    same voucher, r_t != r_t':   F_s(cid)  = (Z / Z')^(1 / (r_t - r_t')),   pk_U = Z / F_s(cid)^r_t
    other voucher, r_c != r_c':  F_k2(x)   = (Y / Y')^(1 / (r_c - r_c')),   pk_A = Y / F_k2(x)^r_c
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from . import credsig, wire
from .blindsig import RsaSecretKey, generate_rsa
from .credsig import Credential, CredSecretKey
from .errors import (
    DetectionAbort,
    DuplicateIdentity,
    InconsistentRecovery,
    InvalidAbortSignature,
    InvalidRegistration,
    Malformed,
    RateLimited,
    UnknownATM,
    VerificationFailed,
)
from .nizk.statements import verify_key_registration, verify_opening_proof
from .params import Params
from .primitives import SigningKey, default_rng, sig_verify
from .protocol import (
    BankPublic,
    coin_id,
    promise_message,
    same_voucher,
    transaction_cid,
    verify_transaction,
    withdrawal_message,
)

USER, ATM = 0, 1


@dataclass
class BankConfig:
    opening_balance: int = 100
    mint_cap: int = 10_000
    compact_n: int = 16
    withdrawal_amount: int = 1


@dataclass
class Account:
    pk: object
    kind: int
    balance: int
    sig_pk: bytes

    def record(self) -> wire.IdentityRecord:
        return wire.IdentityRecord(self.pk, self.kind, self.balance, self.sig_pk)


@dataclass(frozen=True)
class Attribution:
    """A non-zero update_tx verdict, kept in the bank's audit log."""

    pk: object
    offence: str  # "double-spend", "double-issue", "aborted-coin"
    coin: bytes


@dataclass
class BankState:
    params: Params
    config: BankConfig
    sig_key: SigningKey
    blind_sk: RsaSecretKey
    user_cred: CredSecretKey
    atm_cred: CredSecretKey
    coin_cred: CredSecretKey
    ids: dict = field(default_factory=dict)  # pk bytes -> Account
    cs: dict = field(default_factory=dict)  # coin digest -> SpentEntry
    x_index: dict = field(default_factory=dict)  # X bytes -> SpentEntry (compact mode)
    inv_list: list = field(default_factory=list)
    rate: dict = field(default_factory=dict)  # pk_A bytes -> coins minted
    debited: set = field(default_factory=set)  # (pk_U, pk_A, nonce) already charged
    attributions: list = field(default_factory=list)


class Bank:
    def __init__(self, state: BankState):
        self.state = state
        self._lock = threading.RLock()
        self._log: list = []

    @property
    def params(self) -> Params:
        return self.state.params

    @property
    def public(self) -> BankPublic:
        st = self.state
        return BankPublic(
            st.params, st.blind_sk.public, st.user_cred.public, st.atm_cred.public, st.coin_cred.public, st.config.compact_n
        )

    # -- registry -----------------------------------------------------------------
    def account(self, pk) -> Account | None:
        return self.state.ids.get(bytes(pk))

    def balance(self, pk) -> int:
        acct = self.account(pk)
        return acct.balance if acct else 0

    def _register(self, com, pk, proof, sig_pk: bytes, kind: int, cred_sk: CredSecretKey, rng) -> Credential:
        n = cred_sk.public.n_messages
        try:
            ok = verify_key_registration(self.params, com, pk, proof, n)
        except (ValueError, Malformed) as exc:
            raise InvalidRegistration(str(exc)) from None
        if not ok:
            raise InvalidRegistration("registration proof does not verify")
        with self._lock:
            if bytes(pk) in self.state.ids:
                raise DuplicateIdentity(f"{bytes(pk).hex()[:16]} already registered")
            balance = self.state.config.opening_balance if kind == USER else 0
            acct = Account(pk, kind, balance, bytes(sig_pk))
            self.state.ids[bytes(pk)] = acct
            self._append(acct.record())
        return credsig.zsign(cred_sk, com, rng or default_rng())

    def register_user(self, P, pk_U, proof, sig_pk: bytes, rng=None) -> Credential:
        """Sign (sk_U, s) inside P after checking pk_U = g^sk_U."""
        return self._register(P, pk_U, proof, sig_pk, USER, self.state.user_cred, rng)

    def register_atm(self, Q, pk_A, proof, sig_pk: bytes, rng=None) -> Credential:
        return self._register(Q, pk_A, proof, sig_pk, ATM, self.state.atm_cred, rng)

    def _require_atm(self, pk_A) -> Account:
        acct = self.account(pk_A)
        if acct is None or acct.kind != ATM:
            raise UnknownATM("not a registered ATM")
        return acct

    # -- minting --------------------------------------------------------------------
    def issue_coin(self, pk_A, blinded: list) -> list:
        """Blind-sign ``len(blinded)`` coin digests for a registered ATM."""
        self._require_atm(pk_A)
        with self._lock:
            key = bytes(pk_A)
            used = self.state.rate.get(key, 0)
            if used + len(blinded) > self.state.config.mint_cap:
                raise RateLimited(f"ATM would exceed the cap of {self.state.config.mint_cap} coins")
            self.state.rate[key] = used + len(blinded)
        return [self.state.blind_sk.sign_blinded(K) for K in blinded]

    def certify_coin_key(self, pk_A, com, proof, rng=None) -> Credential:
        """Compact mode: sign a reusable PRF key hidden in ``com``."""
        self._require_atm(pk_A)
        if not verify_opening_proof(self.params, com, proof, 1):
            raise InvalidRegistration("coin-key opening proof does not verify")
        return credsig.zsign(self.state.coin_cred, com, rng or default_rng())

    def minted(self, pk_A=None) -> int:
        if pk_A is not None:
            return self.state.rate.get(bytes(pk_A), 0)
        return sum(self.state.rate.values())

    # -- balances and aborts ------------------------------------------------------------
    def _inv_match(self, pk_U, pk_A, nonce: bytes) -> bool:
        return any(r.pk_U == pk_U and r.pk_A == pk_A and r.nonce == nonce for r in self.state.inv_list)

    def update_bal(self, pk_U, receipt: wire.Receipt, pk_A, nonce: bytes) -> int:
        """0 and a debit on a valid, fresh, unaborted receipt; 1 otherwise."""
        acct = self.account(pk_U)
        if acct is None or acct.kind != USER or self.account(pk_A) is None:
            return 1
        if not sig_verify(acct.sig_pk, withdrawal_message(pk_U, pk_A, nonce), receipt.sig):
            return 1
        amount = self.state.config.withdrawal_amount
        key = (bytes(pk_U), bytes(pk_A), bytes(nonce))
        with self._lock:
            if key in self.state.debited or self._inv_match(pk_U, pk_A, nonce):
                return 1
            if acct.balance < amount:
                return 1
            acct.balance -= amount
            self.state.debited.add(key)
            self._append(wire.DebitRecord(pk_U, pk_A, bytes(nonce)))
            self._append(acct.record())
        return 0

    def record_abort(self, rec: wire.AbortRecord) -> None:
        atm = self.account(rec.pk_A)
        if atm is None or atm.kind != ATM:
            raise InvalidAbortSignature("abort names an unknown ATM")
        if not sig_verify(atm.sig_pk, promise_message(rec.I, rec.V, rec.nonce), rec.Sigma):
            raise InvalidAbortSignature("promise signature does not verify")
        with self._lock:
            if any(r.nonce == rec.nonce and r.pk_A == rec.pk_A for r in self.state.inv_list):
                return
            self.state.inv_list.append(rec)
            self._append(rec)
            key = (bytes(rec.pk_U), bytes(rec.pk_A), bytes(rec.nonce))
            user = self.account(rec.pk_U)
            if key in self.state.debited and user is not None:
                # the receipt beat the abort to the bank: undo the charge
                self.state.debited.discard(key)
                user.balance += self.state.config.withdrawal_amount
                self._append(user.record())

    # -- deposits -----------------------------------------------------------------
    def _credit(self, pk) -> None:
        acct = self.account(pk)
        if acct is not None:
            acct.balance += 1
            self._append(acct.record())

    def _recover(self, T1, T2, r1: int, r2: int):
        p = self.params.p
        F = (T1 / T2) ** pow((r1 - r2) % p, -1, p)
        return T1 / F ** r1

    def _identify(self, pk, kind: int, offence: str, digest: bytes):
        acct = self.account(pk)
        if acct is None or acct.kind != kind:
            raise InconsistentRecovery(f"{offence} recovery produced an unregistered key")
        self.state.attributions.append(Attribution(pk, offence, digest))
        return pk

    def update_tx(self, coin, voucher, tx, pk_m):
        """Deposit. Returns 0, or the public key of the party to blame."""
        verify_transaction(self.public, coin, voucher, tx, pk_m)
        params = self.params
        digest = coin.digest()
        entry = wire.SpentEntry(digest, transaction_cid(params, voucher), voucher.Y, tx.Z, voucher.r_c, tx.r_t, voucher.X)
        compact = isinstance(voucher, wire.CompactVoucher)
        with self._lock:
            for rec in self.state.inv_list:
                if coin_id(coin, rec.pk_U, rec.pk_A) != rec.I:
                    continue
                if same_voucher(rec.V, voucher):
                    return self._identify(rec.pk_U, USER, "aborted-coin", digest)
                if rec.V.r_c == voucher.r_c:
                    raise DetectionAbort("r_c collision between promised and deposited vouchers")
                pk_A = self._recover(voucher.Y, rec.V.Y, voucher.r_c, rec.V.r_c)
                return self._identify(pk_A, ATM, "double-issue", digest)

            prev = self.state.cs.get(digest)
            if prev is None and compact:
                prev = self.state.x_index.get(bytes(voucher.X))
            if prev is None:
                if self.account(pk_m) is None:
                    raise VerificationFailed("merchant", "merchant is not registered")
                self.state.cs[digest] = entry
                if compact:
                    self.state.x_index[bytes(voucher.X)] = entry
                self._append(entry)
                self._credit(pk_m)
                return 0

            if prev.Y == entry.Y and prev.r_c == entry.r_c:
                if prev.r_t == entry.r_t:
                    raise DetectionAbort("r_t = r_t': same transaction deposited twice")
                pk_U = self._recover(entry.Z, prev.Z, entry.r_t, prev.r_t)
                return self._identify(pk_U, USER, "double-spend", digest)
            if prev.r_c == entry.r_c:
                raise DetectionAbort("r_c = r_c' with different vouchers")
            pk_A = self._recover(entry.Y, prev.Y, entry.r_c, prev.r_c)
            return self._identify(pk_A, ATM, "double-issue", digest)

    # -- persistence --------------------------------------------------------------
    def _append(self, record) -> None:
        self._log.append(wire.encode_hex(record))

    def export_log(self) -> list:
        with self._lock:
            return list(self._log)

    def save_log(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("\n".join(self.export_log()) + "\n")

    def replay_log(self, lines) -> None:
        """Rebuild IDS, CS, InvList and the debit set from a log. Keys are not
        part of the log; call this on a bank holding the original keys."""
        st = self.state
        with self._lock:
            st.ids.clear(), st.cs.clear(), st.x_index.clear(), st.inv_list.clear(), st.debited.clear()
            self._log = []
            for line in lines:
                if not line.strip():
                    continue
                rec = wire.decode_hex(line, self.params)
                if isinstance(rec, wire.IdentityRecord):
                    st.ids[bytes(rec.pk)] = Account(rec.pk, rec.kind, rec.balance, rec.sig_pk)
                elif isinstance(rec, wire.SpentEntry):
                    st.cs[rec.C] = rec
                    if bytes(rec.X) not in st.x_index:
                        st.x_index[bytes(rec.X)] = rec
                elif isinstance(rec, wire.AbortRecord):
                    st.inv_list.append(rec)
                elif isinstance(rec, wire.DebitRecord):
                    st.debited.add((bytes(rec.pk_U), bytes(rec.pk_A), rec.nonce))
                else:
                    raise Malformed(f"unexpected {type(rec).__name__} in bank log")
                self._log.append(line.strip())

    def load_log(self, path) -> None:
        with open(path) as fh:
            self.replay_log(fh.read().splitlines())


def init_bank(params: Params, config: BankConfig | None = None, rng=None) -> Bank:
    rng = rng or default_rng()
    config = config or BankConfig()
    state = BankState(
        params=params,
        config=config,
        sig_key=SigningKey.generate(rng),
        blind_sk=generate_rsa(params.rsa_bits, rng),
        user_cred=credsig.keygen(params, 2, rng),
        atm_cred=credsig.keygen(params, 1, rng),
        coin_cred=credsig.keygen(params, 1, rng),
    )
    return Bank(state)


__all__ = ["ATM", "USER", "Attribution", "Bank", "BankConfig", "BankState", "init_bank"]
