"""Concurrent clients against one bank, to exercise linearizability of the
check-then-append on CS and the check-then-debit on balances."""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor

from ..atm import init_atm
from ..bank import init_bank
from ..params import get_profile
from ..wallet import MerchantView, init_user
from . import adversary
from .runner import Verdict


def run_stress(profile: str = "toy", seed: int = 0, clients: int = 8) -> list:
    rng = random.Random(seed)
    bank = init_bank(get_profile(profile), rng=rng)
    atm = init_atm(bank, rng=rng)
    user = init_user(bank, rng=rng)
    merchants = [MerchantView(init_user(bank, rng=rng)) for _ in range(clients)]
    atm.req_coin(2)
    entry = user.withdraw(atm)

    # one coin, one transaction per merchant, all deposited at once
    txs = []
    for m in merchants:
        r_v = m.new_session()
        txs.append((m, adversary.double_spend_user(user, entry, m.pk_m, r_v)))
    with ThreadPoolExecutor(clients) as pool:
        results = list(pool.map(lambda mt: bank.update_tx(*mt[1], mt[0].pk_m), txs))
    zeros = sum(1 for r in results if r == 0)
    blamed = sum(1 for r in results if r != 0 and r == user.pk)
    verdicts = [Verdict("concurrent deposits", zeros == 1 and blamed == clients - 1, f"accepted={zeros} attributed={blamed}")]

    # one receipt redeemed concurrently
    w = user.start_withdrawal()
    promise = atm.begin_issue(user.pk, w.P, w.pi_skU)
    receipt = user.issue_receipt(w, promise, atm.pk_A, atm.sig_pk)
    before = bank.balance(user.pk)
    with ThreadPoolExecutor(clients) as pool:
        outs = list(pool.map(lambda _: bank.update_bal(user.pk, receipt, atm.pk_A, promise.nonce), range(clients)))
    debit = before - bank.balance(user.pk)
    verdicts.append(Verdict("concurrent receipts", outs.count(0) == 1 and debit == 1, f"debits={debit} zeros={outs.count(0)}"))

    # concurrent issuing sessions never share a KS record
    atm.req_coin(clients)
    reqs = [user.start_withdrawal() for _ in range(clients)]
    with ThreadPoolExecutor(clients) as pool:
        promises = list(pool.map(lambda w: atm.begin_issue(user.pk, w.P, w.pi_skU), reqs))
    records = {bytes(atm.pending[p.nonce].record.C1) for p in promises}
    verdicts.append(Verdict("concurrent reservations", len(records) == clients, f"distinct records={len(records)}"))
    return verdicts
