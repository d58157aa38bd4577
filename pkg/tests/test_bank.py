import random
import threading

import pytest

from ecash import wire
from ecash.bank import ATM, USER, BankConfig, init_bank
from ecash.errors import (
    DetectionAbort,
    DuplicateIdentity,
    InvalidAbortSignature,
    InvalidRegistration,
    RateLimited,
    UnknownATM,
)
from ecash.harness.adversary import double_issue_atm, double_spend_user, forge_receipt, withhold_coin_atm
from ecash.nizk.statements import prove_key_registration
from ecash.primitives import Opening, SigningKey, commit, dy_prf


def test_init_state_empty(toy_params):
    bank = init_bank(toy_params, rng=random.Random(0))
    st = bank.state
    assert not st.ids and not st.cs and not st.inv_list and not st.debited
    assert bank.minted() == 0
    assert bank.export_log() == []


def _registration(params, rng, pk_sk=None):
    grp = params.group
    sk, s = grp.random_scalar(rng, nonzero=True), grp.random_scalar(rng)
    opening = Opening((sk, s), grp.random_scalar(rng))
    P = commit(opening.messages, opening.blinding, params.gens)
    pk = params.g ** (sk if pk_sk is None else pk_sk)
    proof = prove_key_registration(params, P, params.g ** sk, opening, rng)
    return P, pk, proof


def test_register_user_and_duplicate(toy_params, rng):
    bank = init_bank(toy_params, BankConfig(opening_balance=7), rng)
    P, pk, proof = _registration(toy_params, rng)
    bank.register_user(P, pk, proof, SigningKey.generate(rng).public_bytes, rng)
    acct = bank.account(pk)
    assert acct.kind == USER and acct.balance == 7
    with pytest.raises(DuplicateIdentity):
        bank.register_user(P, pk, proof, SigningKey.generate(rng).public_bytes, rng)


def test_register_mismatched_proof(toy_params, rng):
    bank = init_bank(toy_params, rng=rng)
    P, pk, proof = _registration(toy_params, rng, pk_sk=5)
    with pytest.raises(InvalidRegistration):
        bank.register_user(P, pk, proof, b"\0" * 32, rng)
    assert not bank.state.ids


def test_issue_coin_cap(make_world):
    w = make_world(bank_config=BankConfig(mint_cap=20))
    atm = w.atm
    assert w.bank.minted(atm.pk_A) == 4
    assert atm.req_coin(10) == 10
    assert w.bank.minted(atm.pk_A) == 14
    with pytest.raises(RateLimited):
        atm.req_coin(7)
    assert w.bank.minted(atm.pk_A) == 14
    assert all(w.bank.public.blind_pk.verify(r.coin.digest(), r.sigma_c) for r in atm.ks)


def test_issue_coin_unknown_atm(world):
    with pytest.raises(UnknownATM):
        world.bank.issue_coin(world.user.pk, [1])


def _begin(world, user=None, atm=None):
    user, atm = user or world.user, atm or world.atm
    w = user.start_withdrawal()
    promise = atm.begin_issue(user.pk, w.P, w.pi_skU)
    receipt = user.issue_receipt(w, promise, atm.pk_A, atm.sig_pk)
    return w, promise, receipt


def test_update_bal_honest_debits_once(world):
    bank, user, atm = world.bank, world.user, world.atm
    before = bank.balance(user.pk)
    w, promise, receipt = _begin(world)
    assert bank.update_bal(user.pk, receipt, atm.pk_A, promise.nonce) == 0
    assert bank.balance(user.pk) == before - 1
    assert bank.update_bal(user.pk, receipt, atm.pk_A, promise.nonce) == 1
    assert bank.balance(user.pk) == before - 1


def test_update_bal_forged_receipt(world, rng):
    bank, user, atm = world.bank, world.user, world.atm
    before = bank.balance(user.pk)
    _, promise, _ = _begin(world)
    forged = forge_receipt(SigningKey.generate(rng), user.pk, atm.pk_A, promise.nonce)
    assert bank.update_bal(user.pk, forged, atm.pk_A, promise.nonce) == 1
    assert bank.balance(user.pk) == before


def test_update_bal_after_abort(world):
    bank, user, atm = world.bank, world.user, world.atm
    before = bank.balance(user.pk)
    w, promise, receipt = _begin(world)
    bank.record_abort(user.abort_record(w))
    assert bank.update_bal(user.pk, receipt, atm.pk_A, promise.nonce) == 1
    assert bank.balance(user.pk) == before


def test_abort_after_debit_refunds(world):
    bank, user, atm = world.bank, world.user, world.atm
    before = bank.balance(user.pk)
    w, promise, receipt = _begin(world)
    withhold_coin_atm(atm, promise.nonce, receipt)
    assert bank.update_bal(user.pk, receipt, atm.pk_A, promise.nonce) == 0
    bank.record_abort(user.abort_record(w))
    assert bank.balance(user.pk) == before


def test_record_abort_bad_signature_and_idempotent(world):
    bank, user = world.bank, world.user
    w, promise, _ = _begin(world)
    rec = user.abort_record(w)
    bad = wire.AbortRecord(bytes(64), rec.I, rec.V, rec.nonce, rec.pk_U, rec.pk_A)
    with pytest.raises(InvalidAbortSignature):
        bank.record_abort(bad)
    wrong_atm = wire.AbortRecord(rec.Sigma, rec.I, rec.V, rec.nonce, rec.pk_U, user.pk)
    with pytest.raises(InvalidAbortSignature):
        bank.record_abort(wrong_atm)
    assert bank.state.inv_list == []
    bank.record_abort(rec)
    bank.record_abort(rec)
    assert len(bank.state.inv_list) == 1


def test_update_tx_honest(world):
    entry = world.user.withdraw(world.atm)
    C, V, T, r_v = world.spend(entry)
    m = world.merchant
    before = world.bank.balance(m.pk_m)
    assert world.bank.update_tx(C, V, T, m.pk_m) == 0
    assert C.digest() in world.bank.state.cs
    assert world.bank.balance(m.pk_m) == before + 1


def test_update_tx_double_spend(make_world):
    w = make_world(n_merchants=2)
    user = w.user
    entry = w.user.withdraw(w.atm)
    m1, m2 = w.merchants
    C, V, T, _ = w.spend(entry, merchant=m1)
    assert w.bank.update_tx(C, V, T, m1.pk_m) == 0
    C2, V2, T2 = double_spend_user(user, entry, m2.pk_m, m2.new_session())
    assert w.bank.update_tx(C2, V2, T2, m2.pk_m) == user.pk
    assert w.bank.state.attributions[-1].offence == "double-spend"


def test_update_tx_same_transaction_twice(world):
    entry = world.user.withdraw(world.atm)
    C, V, T, _ = world.spend(entry)
    assert world.bank.update_tx(C, V, T, world.merchant.pk_m) == 0
    with pytest.raises(DetectionAbort):
        world.bank.update_tx(C, V, T, world.merchant.pk_m)


def test_update_tx_double_issue(world):
    atm, (u1, u2) = world.atm, world.users
    ws = [u1.start_withdrawal(), u2.start_withdrawal()]
    promises = double_issue_atm(atm, [(u1.pk, ws[0]), (u2.pk, ws[1])])
    entries = []
    for u, w, pr in zip((u1, u2), ws, promises):
        receipt = u.issue_receipt(w, pr, atm.pk_A, atm.sig_pk)
        entries.append(u.receive_coin(w, atm.complete_issue(pr.nonce, receipt)))
    C, V, T, _ = world.spend(entries[0], user=u1)
    assert world.bank.update_tx(C, V, T, world.merchant.pk_m) == 0
    C, V, T, _ = world.spend(entries[1], user=u2)
    assert world.bank.update_tx(C, V, T, world.merchant.pk_m) == atm.pk_A
    assert world.bank.state.attributions[-1].offence == "double-issue"


def test_recovery_algebra_oracle(world):
    bank, params = world.bank, world.bank.params
    grp, g, p = params.group, params.g, params.p
    rng = random.Random(99)
    for _ in range(1000):
        sk, s = grp.random_scalar(rng, nonzero=True), grp.random_scalar(rng)
        cid = grp.random_scalar(rng)
        if (1 + s + cid) % p == 0:
            continue
        r1, r2 = grp.random_scalar(rng), grp.random_scalar(rng)
        if r1 == r2:
            continue
        F = dy_prf(g, s, cid)
        # Z-style: g^sk F^r ; Y-style is the same shape with pk_A in front
        assert bank._recover(g ** sk * F ** r1, g ** sk * F ** r2, r1, r2) == g ** sk


def test_log_replay_reproduces_detection(make_world):
    w = make_world(n_merchants=2)
    entry = w.user.withdraw(w.atm)
    m1, m2 = w.merchants
    C, V, T, _ = w.spend(entry, merchant=m1)
    assert w.bank.update_tx(C, V, T, m1.pk_m) == 0
    log = w.bank.export_log()
    ids, cs = dict(w.bank.state.ids), dict(w.bank.state.cs)
    w.bank.replay_log(log)
    assert w.bank.state.cs.keys() == cs.keys()
    assert {k: a.balance for k, a in w.bank.state.ids.items()} == {k: a.balance for k, a in ids.items()}
    assert w.bank.export_log() == log
    C2, V2, T2 = double_spend_user(w.user, entry, m2.pk_m, m2.new_session())
    assert w.bank.update_tx(C2, V2, T2, m2.pk_m) == w.user.pk


def test_log_persists_to_file(world, tmp_path):
    entry = world.user.withdraw(world.atm)
    C, V, T, _ = world.spend(entry)
    world.bank.update_tx(C, V, T, world.merchant.pk_m)
    path = tmp_path / "bank.log"
    world.bank.save_log(path)
    log = world.bank.export_log()
    world.bank.load_log(path)
    assert world.bank.export_log() == log
    assert world.bank.account(world.atm.pk_A).kind == ATM


def test_concurrent_double_deposit_single_credit(make_world):
    w = make_world(n_merchants=4)
    entry = w.user.withdraw(w.atm)
    spends = [double_spend_user(w.user, entry, m.pk_m, m.new_session()) for m in w.merchants]
    results = [None] * len(spends)

    def deposit(i):
        C, V, T = spends[i]
        results[i] = w.bank.update_tx(C, V, T, w.merchants[i].pk_m)

    threads = [threading.Thread(target=deposit, args=(i,)) for i in range(len(spends))]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results.count(0) == 1
    assert all(r == w.user.pk for r in results if r != 0)
    assert len(w.bank.state.cs) == 1
