"""Deterministic multi-party scenario runner.

A scenario is a JSON document:

    {"name": ..., "seed": 7, "profile": "toy", "compact": false, "offline": false,
     "roster": {"atms": 2, "dishonest_atms": 1, "users": 3, "dishonest_users": 1, "merchants": 1},
     "config": {"opening_balance": 100, ...},
     "events": [{"op": "stock", "atm": 0, "n": 4}, ...],
     "assertions": ["conservation", "no_framing", "ordering", "anonymity", ...]}

Dishonest parties are the last ``dishonest_*`` indices of each kind. Events
run in script order on one thread; every message crossing a party boundary
is appended to the EventLog with its wire bytes. An event may carry
``expect``; its observed outcome is compared as a string:

    0 | "user:i" | "atm:j" | "reject:<reason>" | "error:<ErrorName>" | "ok" | "rejected" | 1
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .. import wire
from ..atm import DONE, AtmConfig, init_atm
from ..bank import BankConfig, init_bank
from ..errors import EcashError, Malformed, ScriptError
from ..offline import DEFAULT_EPSILON, build_filter
from ..params import get_profile
from ..wallet import MerchantView, init_user
from . import adversary

DEFAULT_ASSERTIONS = ("conservation", "no_framing", "ordering", "mint_reconciliation", "purse_accounting")

OPS = (
    "stock",
    "withdraw",
    "spend",
    "double_spend",
    "double_issue",
    "withhold_coin",
    "reissue",
    "false_abort",
    "forge_receipt",
    "tamper",
    "spend_other",
    "flush",
    "tick",
    "broadcast_filter",
    "set_balance",
    "rotate_keys",
)


@dataclass
class Roster:
    atms: int = 1
    dishonest_atms: int = 0
    users: int = 1
    dishonest_users: int = 0
    merchants: int = 1

    def __post_init__(self):
        if not (0 <= self.dishonest_atms <= self.atms and 0 <= self.dishonest_users <= self.users):
            raise ScriptError("dishonest counts exceed party counts")
        if self.atms < 1 or self.merchants < 1:
            raise ScriptError("need at least one ATM and one merchant")

    def honest_atm(self, j: int) -> bool:
        return j < self.atms - self.dishonest_atms

    def honest_user(self, i: int) -> bool:
        return i < self.users - self.dishonest_users


@dataclass
class Scenario:
    name: str
    seed: int
    roster: Roster
    events: list
    assertions: list = field(default_factory=lambda: list(DEFAULT_ASSERTIONS))
    profile: str = "toy"
    compact: bool = False
    offline: bool = False
    config: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> Scenario:
        try:
            roster = Roster(**d.get("roster", {}))
            events = list(d["events"])
        except (TypeError, KeyError) as exc:
            raise ScriptError(f"bad scenario: {exc}") from None
        for i, ev in enumerate(events):
            if not isinstance(ev, dict) or ev.get("op") not in OPS:
                raise ScriptError(f"event {i}: unknown op {ev.get('op') if isinstance(ev, dict) else ev!r}")
        return cls(
            name=d.get("name", "scenario"),
            seed=int(d.get("seed", 0)),
            roster=roster,
            events=events,
            assertions=list(d.get("assertions", DEFAULT_ASSERTIONS)),
            profile=d.get("profile", "toy"),
            compact=bool(d.get("compact", False)),
            offline=bool(d.get("offline", False)),
            config=dict(d.get("config", {})),
        )

    @classmethod
    def load(cls, path) -> Scenario:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ScriptError(f"cannot read scenario {path}: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["roster"] = asdict(self.roster)
        return d


@dataclass(frozen=True)
class LogRecord:
    index: int
    time: int
    sender: str
    receiver: str
    kind: str
    data: bytes

    def to_json(self) -> str:
        return json.dumps(
            {"i": self.index, "t": self.time, "from": self.sender, "to": self.receiver, "kind": self.kind, "hex": self.data.hex()},
            sort_keys=True,
        )


@dataclass
class EventLog:
    records: list = field(default_factory=list)
    time: int = 0

    def add(self, sender: str, receiver: str, kind: str, data: bytes) -> LogRecord:
        rec = LogRecord(len(self.records), self.time, sender, receiver, kind, bytes(data))
        self.records.append(rec)
        return rec

    def to_ndjson(self) -> str:
        return "".join(r.to_json() + "\n" for r in self.records)

    def export(self, path) -> None:
        Path(path).write_text(self.to_ndjson())

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    detail: str = ""
    event: int | None = None


@dataclass
class RunResult:
    scenario: Scenario
    log: EventLog
    verdicts: list
    outcomes: list  # per event
    world: object = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def failures(self) -> list:
        return [v for v in self.verdicts if not v.passed]

    def report(self) -> dict:
        return {
            "scenario": self.scenario.name,
            "seed": self.scenario.seed,
            "passed": self.passed,
            "events": len(self.scenario.events),
            "messages": len(self.log),
            "verdicts": [asdict(v) for v in self.verdicts],
            "note": "anonymity/untraceability verdicts are transcript scans, not indistinguishability proofs",
        }


@dataclass
class _Coin:
    owner: int
    entry: object
    withdrawal: object = None


class World:
    """All actors of one run plus the harness's own bookkeeping."""

    def __init__(self, sc: Scenario):
        self.sc = sc
        self.rng = random.Random(sc.seed)
        self.params = get_profile(sc.profile)
        self.log = EventLog()
        cfg = sc.config
        bank_cfg = BankConfig(
            opening_balance=cfg.get("opening_balance", 100),
            mint_cap=cfg.get("mint_cap", 10_000),
            compact_n=cfg.get("compact_n", 16),
        )
        atm_cfg = dict(offline=sc.offline, session_ttl=cfg.get("session_ttl", 60), flush_interval=cfg.get("flush_interval", 300))
        self.bank = init_bank(self.params, bank_cfg, self.rng)
        self.atms = [init_atm(self.bank, AtmConfig(**atm_cfg), self.rng) for _ in range(sc.roster.atms)]
        self.users = [init_user(self.bank, self.rng) for _ in range(sc.roster.users)]
        self.merchants = [MerchantView(init_user(self.bank, self.rng)) for _ in range(sc.roster.merchants)]
        self.coins: dict = {}
        self.withheld: dict = {}
        self.minted: set = set()
        self.rejected_spends: set = set()
        self.honest_spends: list = []  # (C, V, T) byte triples
        self.deposits: list = []  # (spender index, result)
        self.withdrawals: dict = {}
        self.epoch = 0
        if sc.compact:
            for atm in self.atms:
                atm.setup_compact()

    # -- naming ----------------------------------------------------------------------------
    def name_of(self, pk) -> str:
        key = bytes(pk)
        for i, u in enumerate(self.users):
            if bytes(u.pk) == key:
                return f"user:{i}"
        for j, a in enumerate(self.atms):
            if bytes(a.pk_A) == key:
                return f"atm:{j}"
        for k, m in enumerate(self.merchants):
            if bytes(m.pk_m) == key:
                return f"merchant:{k}"
        return "unknown"

    def is_dishonest(self, name: str) -> bool:
        kind, _, idx = name.partition(":")
        if kind == "user":
            return not self.sc.roster.honest_user(int(idx))
        if kind == "atm":
            return not self.sc.roster.honest_atm(int(idx))
        return False

    def outcome_of(self, result) -> object:
        return 0 if result == 0 else self.name_of(result)

    # -- helpers ----------------------------------------------------------------------------
    def _party(self, seq, idx, what):
        try:
            return seq[int(idx)]
        except (IndexError, ValueError, TypeError):
            raise ScriptError(f"no {what} {idx!r}") from None

    def user(self, ev, key="user"):
        return self._party(self.users, ev.get(key), "user")

    def atm(self, ev, key="atm"):
        return self._party(self.atms, ev.get(key), "atm")

    def merchant(self, ev):
        return self._party(self.merchants, ev.get("merchant", 0), "merchant")

    def coin(self, handle) -> _Coin:
        try:
            return self.coins[handle]
        except KeyError:
            raise ScriptError(f"no coin handle {handle!r}") from None

    def _issue(self, u_idx: int, a_idx: int, promise, w):
        user, atm = self.users[u_idx], self.atms[a_idx]
        ua, aa = f"user{u_idx}", f"atm{a_idx}"
        self.log.add(aa, ua, "promise", wire.encode(promise))
        receipt = user.issue_receipt(w, promise, atm.pk_A, atm.sig_pk)
        self.log.add(ua, aa, "receipt", wire.encode(receipt))
        return receipt

    def _receive(self, u_idx: int, a_idx: int, w, coin) -> object:
        if coin is not None:
            self.log.add(f"atm{a_idx}", f"user{u_idx}", "coin", wire.encode(coin))
        try:
            return self.users[u_idx].receive_coin(w, coin)
        except EcashError as exc:
            rec = getattr(exc, "abort_record", None)
            if rec is not None:
                self.log.add(f"user{u_idx}", "bank", "abort", wire.encode(rec))
            raise

    def _request(self, u_idx: int, a_idx: int):
        w = self.users[u_idx].start_withdrawal()
        self.log.add(f"user{u_idx}", f"atm{a_idx}", "request", bytes(w.P))
        return w

    def _spend_flow(self, u_idx: int, m_idx: int, make, honest: bool, handle=None):
        merchant = self.merchants[m_idx]
        r_v = merchant.new_session()
        ma, ua = f"merchant{m_idx}", f"user{u_idx}"
        self.log.add(ma, ua, "r_v", r_v)
        C, V, T = make(merchant.pk_m, r_v)
        cb, vb, tb = wire.encode(C), wire.encode(V), wire.encode(T)
        for kind, data in (("coin", cb), ("voucher", vb), ("transaction", tb)):
            self.log.add(ua, ma, kind, data)
        verdict = merchant.verify_tx(C, V, T, r_v)
        if not verdict:
            self.log.add(ma, ua, "reject", verdict.reason.encode())
            if handle is not None:
                self.rejected_spends.add(C.digest())
            return f"reject:{verdict.reason}"
        if honest:
            self.honest_spends.append((cb, vb, tb))
        self.log.add(ma, "bank", "deposit", cb + vb + tb)
        result = merchant.deposit(C, V, T)
        out = self.outcome_of(result)
        self.log.add("bank", ma, "result", str(out).encode())
        self.deposits.append((u_idx, out))
        if out != 0 and handle is not None:
            self.rejected_spends.add(C.digest())
        return out

    def _stock(self, atm, n: int) -> None:
        before = {r.sigma_c for r in atm.ks}
        if self.sc.compact:
            atm.req_coin_compact(n)
        else:
            atm.req_coin(n)
        new = [r for r in atm.ks if r.sigma_c not in before]
        for r in new:
            self.minted.add(r.coin.digest())
        self.log.add("bank", f"atm{self.atms.index(atm)}", "coin-signatures", b"".join(r.sigma_c for r in new))

    # -- events --------------------------------------------------------------------------------
    def do_stock(self, ev):
        self._stock(self.atm(ev), int(ev.get("n", 1)))
        return "ok"

    def do_withdraw(self, ev):
        u_idx, a_idx = int(ev["user"]), int(ev["atm"])
        user, atm = self.user(ev), self.atm(ev)
        w = self._request(u_idx, a_idx)
        begin = atm.begin_issue_compact if self.sc.compact else atm.begin_issue
        promise = begin(user.pk, w.P, w.pi_skU)
        receipt = self._issue(u_idx, a_idx, promise, w)
        coin = atm.complete_issue(promise.nonce, receipt)
        entry = self._receive(u_idx, a_idx, w, coin)
        if "as" in ev:
            self.coins[ev["as"]] = _Coin(u_idx, entry, w)
        return "ok"

    def do_spend(self, ev):
        c = self.coin(ev["coin"])
        u_idx = int(ev.get("user", c.owner))
        user = self.users[u_idx]
        honest = self.sc.roster.honest_user(u_idx)
        return self._spend_flow(
            u_idx, int(ev.get("merchant", 0)), lambda pk_m, r_v: user.spend(c.entry, pk_m, r_v), honest, ev["coin"]
        )

    def do_double_spend(self, ev):
        c = self.coin(ev["coin"])
        u_idx = int(ev.get("user", c.owner))
        user = self.users[u_idx]
        return self._spend_flow(
            u_idx,
            int(ev.get("merchant", 0)),
            lambda pk_m, r_v: adversary.double_spend_user(user, c.entry, pk_m, r_v),
            False,
            ev["coin"],
        )

    def do_double_issue(self, ev):
        a_idx = int(ev["atm"])
        atm = self.atm(ev)
        users, handles = list(ev["users"]), list(ev["as"])
        reqs = [(int(u), self._request(int(u), a_idx)) for u in users]
        promises = adversary.double_issue_atm(atm, [(self.users[u].pk, w) for u, w in reqs])
        for (u, w), promise, handle in zip(reqs, promises, handles):
            receipt = self._issue(u, a_idx, promise, w)
            coin = atm.complete_issue(promise.nonce, receipt)
            entry = self._receive(u, a_idx, w, coin)
            self.coins[handle] = _Coin(u, entry, w)
        return "ok"

    def do_withhold_coin(self, ev):
        """ATM keeps the coin; the user aborts; the ATM then tries to
        redeem the receipt anyway. Outcome: update_bal's return value."""
        u_idx, a_idx = int(ev["user"]), int(ev["atm"])
        user, atm = self.user(ev), self.atm(ev)
        w = self._request(u_idx, a_idx)
        begin = atm.begin_issue_compact if self.sc.compact else atm.begin_issue
        promise = begin(user.pk, w.P, w.pi_skU)
        receipt = self._issue(u_idx, a_idx, promise, w)
        session = adversary.withhold_coin_atm(atm, promise.nonce, receipt)
        try:
            self._receive(u_idx, a_idx, w, None)
        except EcashError:
            pass
        if "as" in ev:
            self.withheld[ev["as"]] = (a_idx, session)
        self.log.add(f"atm{a_idx}", "bank", "update_bal", wire.encode(receipt))
        return self.bank.update_bal(user.pk, receipt, atm.pk_A, promise.nonce)

    def do_reissue(self, ev):
        try:
            a_idx, session = self.withheld[ev["coin"]]
        except KeyError:
            raise ScriptError(f"no withheld coin {ev.get('coin')!r}") from None
        atm = self.atms[a_idx]
        u_idx = int(ev["user"])
        w = self._request(u_idx, a_idx)
        promise = adversary.reissue_record(atm, session, self.users[u_idx].pk, w)
        receipt = self._issue(u_idx, a_idx, promise, w)
        coin = atm.complete_issue(promise.nonce, receipt)
        entry = self._receive(u_idx, a_idx, w, coin)
        self.coins[ev["as"]] = _Coin(u_idx, entry, w)
        return "ok"

    def do_false_abort(self, ev):
        self.do_withdraw(ev)
        c = self.coins[ev["as"]]
        rec = adversary.false_abort_user(self.users[c.owner], c.withdrawal)
        self.log.add(f"user{c.owner}", "bank", "abort", wire.encode(rec))
        return "ok"

    def do_forge_receipt(self, ev):
        """A forger asks for a coin in the victim's name and signs the
        receipt with its own key."""
        v_idx, f_idx, a_idx = int(ev["user"]), int(ev["forger"]), int(ev["atm"])
        victim, forger, atm = self.user(ev), self.user(ev, "forger"), self.atm(ev)
        before = self.bank.balance(victim.pk)
        w = self._request(f_idx, a_idx)
        begin = atm.begin_issue_compact if self.sc.compact else atm.begin_issue
        promise = begin(victim.pk, w.P, w.pi_skU)
        self.log.add(f"atm{a_idx}", f"user{f_idx}", "promise", wire.encode(promise))
        receipt = adversary.forge_receipt(forger.sig_key, victim.pk, atm.pk_A, promise.nonce)
        self.log.add(f"user{f_idx}", f"atm{a_idx}", "receipt", wire.encode(receipt))
        bank_says = self.bank.update_bal(victim.pk, receipt, atm.pk_A, promise.nonce)
        try:
            atm.complete_issue(promise.nonce, receipt)
            out = "released"
        except EcashError as exc:
            out = f"error:{type(exc).__name__}"
        if bank_says != 1 or self.bank.balance(victim.pk) != before:
            out = "debited"
        return out

    def do_tamper(self, ev):
        """Mutate one serialized field of C, V or T; every mutation must be
        rejected before any bank state change."""
        c = self.coin(ev["coin"])
        user = self.users[int(ev.get("user", c.owner))]
        merchant = self.merchant(ev)
        obj_name = ev.get("object", "voucher")
        n = int(ev.get("mutations", 10))
        accepted, tries = 0, 0
        snapshot = self._bank_snapshot()
        r_v = merchant.new_session()
        tx = user.make_transaction(c.entry, merchant.pk_m, r_v)
        objs = {"coin": c.entry.coin, "voucher": c.entry.voucher, "transaction": tx}
        data = wire.encode(objs[obj_name])
        names = [f for f, _, _ in wire.field_spans(data)] if ev.get("field", "*") == "*" else [ev["field"]]
        for fname in names:
            for _ in range(n):
                tries += 1
                mutated = adversary.tamper(data, fname, self.rng)
                try:
                    obj = wire.decode(mutated, self.params, type(objs[obj_name]))
                except Malformed:
                    continue
                parts = dict(objs, **{obj_name: obj})
                if merchant.verify_tx(parts["coin"], parts["voucher"], parts["transaction"], r_v):
                    accepted += 1
                    merchant.sessions.add(r_v)
                    merchant.used.discard(r_v)
        if self._bank_snapshot() != snapshot:
            return "bank-state-changed"
        merchant.sessions.discard(r_v)
        return "rejected" if accepted == 0 else f"accepted:{accepted}/{tries}"

    def do_spend_other(self, ev):
        c = self.coin(ev["coin"])
        t_idx = int(ev["user"])
        thief = self.user(ev)
        return self._spend_flow(
            t_idx, int(ev.get("merchant", 0)), lambda pk_m, r_v: adversary.steal_and_spend(thief, c.entry, pk_m, r_v), False
        )

    def do_flush(self, ev):
        atms = [self.atm(ev)] if "atm" in ev else self.atms
        out = []
        for a in atms:
            out += a.flush()
        return out

    def do_tick(self, ev):
        seconds = int(ev.get("seconds", 1))
        self.log.time += seconds
        for a in [self.atm(ev)] if "atm" in ev else self.atms:
            a.tick(seconds)
        return "ok"

    def do_broadcast_filter(self, ev):
        threshold = int(ev.get("threshold", 1))
        low = [u.pk for u in self.users if self.bank.balance(u.pk) < threshold]
        self.epoch += 1
        f = build_filter(low, float(ev.get("epsilon", DEFAULT_EPSILON)), int(ev.get("n_max", 1000)), self.epoch)
        data = wire.encode(f)
        for j, a in enumerate(self.atms):
            self.log.add("bank", f"atm{j}", "filter", data)
            a.install_filter(f)
        return "ok"

    def do_set_balance(self, ev):
        self.bank.account(self.user(ev).pk).balance = int(ev["balance"])
        return "ok"

    def do_rotate_keys(self, ev):
        self.atm(ev).setup_compact()
        return "ok"

    def _bank_snapshot(self):
        st = self.bank.state
        return (len(st.cs), len(st.inv_list), tuple(sorted((k, a.balance) for k, a in st.ids.items())))

    # -- global assertions ---------------------------------------------------------------
    def check_conservation(self) -> Verdict:
        places = {
            "stock": {r.coin.digest() for a in self.atms for r in a.ks},
            "reserved": {s.record.coin.digest() for a in self.atms for s in a.pending.values() if s.phase in ("promised", "withheld")},
            "voided": {r.coin.digest() for a in self.atms for r in a.voided},
            "held": {e.coin.digest() for u in self.users for e in u.purse if not e.spent},
            "deposited": set(self.bank.state.cs),
            "aborted": {
                a.pending[r.nonce].record.coin.digest()
                for r in self.bank.state.inv_list
                for a in self.atms
                if r.nonce in a.pending
            },
            "rejected": set(self.rejected_spends),
        }
        located = set().union(*places.values())
        stray = located - self.minted
        missing = self.minted - located
        counts = {k: len(v) for k, v in places.items()}
        ok = not stray and not missing
        return Verdict("conservation", ok, f"minted={len(self.minted)} {counts} stray={len(stray)} missing={len(missing)}")

    def check_no_framing(self) -> Verdict:
        framed = [self.name_of(a.pk) for a in self.bank.state.attributions if not self.is_dishonest(self.name_of(a.pk))]
        return Verdict("no_framing", not framed, f"honest parties blamed: {framed}" if framed else "")

    def check_ordering(self) -> Verdict:
        """Per (user, ATM) channel: no receipt without an earlier promise, no
        coin without an earlier receipt, and every released coin belongs to a
        session holding a valid receipt."""
        counts: dict = {}
        for r in self.log.records:
            if r.kind not in ("promise", "receipt", "coin") or "merchant" in r.sender + r.receiver:
                continue
            chan = (r.sender, r.receiver) if r.kind == "receipt" else (r.receiver, r.sender)
            c = counts.setdefault(chan, {"promise": 0, "receipt": 0, "coin": 0})
            c[r.kind] += 1
            if c["receipt"] > c["promise"] or c["coin"] > c["receipt"]:
                return Verdict("ordering", False, f"{r.kind} out of order on {chan}", r.index)
        for j, a in enumerate(self.atms):
            for s in a.pending.values():
                if s.phase == DONE and (s.receipt is None or not a.check_receipt(s, s.receipt)):
                    return Verdict("ordering", False, f"atm{j} released a coin without a valid receipt")
        return Verdict("ordering", True)

    def check_anonymity(self) -> Verdict:
        """Transcript scan: no spend stream contains any party key, and every
        per-field value is fresh across honest spends."""
        keys = [bytes(u.pk) for u in self.users] + [bytes(a.pk_A) for a in self.atms]
        keys += [u.sig_pk for u in self.users] + [a.sig_pk for a in self.atms]
        for n, triple in enumerate(self.honest_spends):
            blob = b"".join(triple)
            for k in keys:
                if k in blob:
                    return Verdict("anonymity", False, f"spend {n} contains a party key")
        seen: dict = {}
        for triple in self.honest_spends:
            for data in triple:
                for name, a, b in wire.field_spans(data):
                    seen.setdefault((data[5], name), []).append(data[a:b])
        dups = [f"{tag:#x}.{name}" for (tag, name), vals in seen.items() if len(set(vals)) != len(vals)]
        ok = not dups
        return Verdict("anonymity", ok, f"spends={len(self.honest_spends)} duplicated fields: {dups}" if dups else f"spends={len(self.honest_spends)} (transcript scan)")

    def check_mint_reconciliation(self) -> Verdict:
        ok = self.bank.minted() == len(self.minted)
        return Verdict("mint_reconciliation", ok, f"bank={self.bank.minted()} harness={len(self.minted)}")

    def check_purse_accounting(self) -> Verdict:
        for i, u in enumerate(self.users):
            if not self.sc.roster.honest_user(i):
                continue
            accepted = sum(1 for who, out in self.deposits if who == i and out == 0)
            if accepted > len(u.purse):
                return Verdict("purse_accounting", False, f"user{i}: {accepted} deposits > {len(u.purse)} withdrawals")
        return Verdict("purse_accounting", True)


def _norm(x):
    return x if isinstance(x, (int, list)) else str(x)


def run(sc: Scenario) -> RunResult:
    world = World(sc)
    verdicts, outcomes = [], []
    for i, ev in enumerate(sc.events):
        handler = getattr(world, "do_" + ev["op"])
        try:
            out = handler(ev)
        except ScriptError as exc:
            raise ScriptError(f"event {i} ({ev['op']}): {exc}") from None
        except EcashError as exc:
            out = f"error:{type(exc).__name__}"
        outcomes.append(out)
        if "expect" in ev:
            ok = _norm(out) == _norm(ev["expect"])
            verdicts.append(Verdict(f"event {i}: {ev['op']}", ok, f"expected {ev['expect']!r}, got {out!r}", i))
        elif isinstance(out, str) and out.startswith("error:") and ev["op"] in ("withdraw", "stock"):
            verdicts.append(Verdict(f"event {i}: {ev['op']}", False, f"unexpected {out}", i))
    for name in sc.assertions:
        check = getattr(world, "check_" + name, None)
        if check is None:
            raise ScriptError(f"unknown assertion {name!r}")
        verdicts.append(check())
    return RunResult(sc, world.log, verdicts, outcomes, world)


def run_file(path) -> RunResult:
    return run(Scenario.load(path))


def bundled_scenarios() -> dict:
    root = Path(__file__).parent / "scenarios"
    return {p.stem: p for p in sorted(root.glob("*.json"))}
