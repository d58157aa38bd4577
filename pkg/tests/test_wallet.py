import dataclasses

import pytest

from ecash import wire
from ecash.errors import AlreadySpent, AtmWithheldCoin, CoinMismatch, NotInPurse, PromiseInvalid
from ecash.harness.adversary import steal_and_spend, withhold_coin_atm
from ecash.primitives import dy_prf
from ecash.protocol import derive_cid, derive_rt


def test_withdraw_debits_one(world):
    before = world.bank.balance(world.user.pk)
    entry = world.user.withdraw(world.atm)
    assert world.bank.balance(world.user.pk) == before - 1
    assert entry in world.user.purse and not entry.spent


def test_receipt_carries_no_coin_material(world):
    user, atm = world.user, world.atm
    w = user.start_withdrawal()
    promise = atm.begin_issue(user.pk, w.P, w.pi_skU)
    receipt = wire.encode(user.issue_receipt(w, promise, atm.pk_A, atm.sig_pk))
    coin = atm.session(promise.nonce).coin
    for el in (promise.V.X, promise.V.Y, coin.C1, coin.C2):
        assert bytes(el) not in receipt


def test_withheld_coin_files_abort(world):
    user, atm, bank = world.user, world.atm, world.bank
    before = bank.balance(user.pk)
    w = user.start_withdrawal()
    promise = atm.begin_issue(user.pk, w.P, w.pi_skU)
    receipt = user.issue_receipt(w, promise, atm.pk_A, atm.sig_pk)
    withhold_coin_atm(atm, promise.nonce, receipt)
    with pytest.raises(AtmWithheldCoin):
        user.receive_coin(w, None)
    assert len(bank.state.inv_list) == 1
    assert bank.update_bal(user.pk, receipt, atm.pk_A, promise.nonce) == 1
    assert bank.balance(user.pk) == before


def test_wrong_coin_detected(world):
    user, atm = world.user, world.atm
    w = user.start_withdrawal()
    promise = atm.begin_issue(user.pk, w.P, w.pi_skU)
    receipt = user.issue_receipt(w, promise, atm.pk_A, atm.sig_pk)
    atm.complete_issue(promise.nonce, receipt)
    other = atm.ks[0].coin
    with pytest.raises(CoinMismatch):
        user.receive_coin(w, other)
    assert user.audit == [other]
    assert len(world.bank.state.inv_list) == 1


def test_promise_checks(world):
    user, other, atm = world.user, world.users[1], world.atm
    w = user.start_withdrawal()
    promise = atm.begin_issue(user.pk, w.P, w.pi_skU)
    with pytest.raises(PromiseInvalid):
        user.issue_receipt(w, promise, atm.pk_A, other.sig_pk)
    bad_sig = dataclasses.replace(promise, nonce=bytes(32))
    with pytest.raises(PromiseInvalid):
        user.issue_receipt(w, bad_sig, atm.pk_A, atm.sig_pk)
    w2 = other.start_withdrawal()
    p2 = atm.begin_issue(other.pk, w2.P, w2.pi_skU)
    with pytest.raises(PromiseInvalid):
        user.issue_receipt(w, p2, atm.pk_A, atm.sig_pk)


def test_spend_z_matches_oracle(world):
    user, m = world.user, world.merchant
    entry = user.withdraw(world.atm)
    C, V, T, r_v = world.spend(entry)
    params = world.bank.params
    cid = derive_cid(params, V.r_c)
    r_t = derive_rt(params, m.pk_m, r_v)
    assert T.r_t == r_t
    assert T.Z == params.g ** user.sk * dy_prf(params.g, user.s, cid) ** r_t
    verdict, result = m.accept(C, V, T, r_v)
    assert verdict and result == 0


def test_spend_guards(world):
    user, other = world.users
    entry = user.withdraw(world.atm)
    world.spend(entry)
    with pytest.raises(AlreadySpent):
        world.spend(entry)
    with pytest.raises(NotInPurse):
        world.spend(entry, user=other)


def test_stale_session_rejected(world):
    m = world.merchant
    entry = world.user.withdraw(world.atm)
    C, V, T, r_v = world.spend(entry)
    assert m.verify_tx(C, V, T, r_v)
    assert m.verify_tx(C, V, T, r_v).reason == "rt"
    foreign = world.user.make_transaction(world.user.withdraw(world.atm), m.pk_m, bytes(32))
    assert m.verify_tx(C, V, foreign, bytes(32)).reason == "rt"


def test_stolen_coin_rejected(world):
    owner, thief = world.users
    entry = owner.withdraw(world.atm)
    r_v = world.merchant.new_session()
    C, V, T = steal_and_spend(thief, entry, world.merchant.pk_m, r_v)
    assert world.merchant.verify_tx(C, V, T, r_v).reason == "spend_proof"


def _spends(world, n, compact=False):
    out = []
    for _ in range(n):
        entry = world.user.withdraw(world.atm, compact=compact)
        out.append(world.spend(entry))
    return out


def _sabotage(reason, good, donor, world):
    (C, V, T, _), (C2, V2, T2, _) = good, donor
    if reason == "rc":
        V = dataclasses.replace(V, r_c=(V.r_c + 1) % world.bank.params.p)
    elif reason == "rt":
        T = dataclasses.replace(T, r_t=(T.r_t + 1) % world.bank.params.p)
    elif reason == "user_credential":
        V = dataclasses.replace(V, pi_skU=V2.pi_skU)
    elif reason == "atm_credential":
        if isinstance(C, wire.CompactCoin):
            C = dataclasses.replace(C, pi_skA=C2.pi_skA)
        else:
            V = dataclasses.replace(V, pi_skA=V2.pi_skA)
    elif reason == "coin_keys":
        C = dataclasses.replace(C, pi_k1=C.pi_k2)
    elif reason == "bank_signature":
        C = dataclasses.replace(C, sigma_c=C2.sigma_c)
    elif reason == "range":
        V = dataclasses.replace(V, pi_ctr=V2.pi_ctr)
    elif reason == "voucher_proof":
        V = dataclasses.replace(V, pi_cid=V2.pi_cid)
    elif reason == "spend_proof":
        T = dataclasses.replace(T, pi_T=T2.pi_T)
    return C, V, T


CHECKS = ["rc", "rt", "user_credential", "atm_credential", "bank_signature", "voucher_proof", "spend_proof"]
COMPACT_CHECKS = CHECKS[:4] + ["coin_keys", "bank_signature", "range", "voucher_proof", "spend_proof"]


@pytest.mark.parametrize("reason", CHECKS)
def test_tamper_matrix(make_world, reason):
    world = make_world()
    good, donor = _spends(world, 2)
    r_v = good[3]
    C, V, T = _sabotage(reason, good, donor, world)
    state = (dict(world.bank.state.cs), world.bank.balance(world.merchant.pk_m))
    verdict, result = world.merchant.accept(C, V, T, r_v)
    assert not verdict and verdict.reason == reason and result is None
    assert (dict(world.bank.state.cs), world.bank.balance(world.merchant.pk_m)) == state


@pytest.mark.parametrize("reason", COMPACT_CHECKS)
def test_tamper_matrix_compact(make_world, reason):
    world = make_world(compact=True)
    good, donor = _spends(world, 2, compact=True)
    r_v = good[3]
    C, V, T = _sabotage(reason, good, donor, world)
    verdict = world.merchant.verify_tx(C, V, T, r_v)
    assert not verdict and verdict.reason == reason


def test_untraceable_transcripts(make_world):
    world = make_world(n_users=3, n_atms=2)
    pks = [bytes(u.pk) for u in world.users]
    for atm in world.atms:
        for u in world.users:
            entry = u.withdraw(atm)
            C, V, T, r_v = world.spend(entry, user=u)
            blob = wire.encode(C) + wire.encode(V) + wire.encode(T)
            assert not any(pk in blob for pk in pks)
            assert bytes(atm.pk_A) not in blob


def test_compact_j_splice(make_world):
    world = make_world(compact=True)
    (C, V, T, r_v), (_, V2, _, _) = _spends(world, 2, compact=True)
    spliced = dataclasses.replace(V, J=V2.J)
    assert not world.merchant.verify_tx(C, spliced, T, r_v)


def test_compact_spend_accepted(make_world):
    world = make_world(compact=True)
    [(C, V, T, r_v)] = _spends(world, 1, compact=True)
    verdict, result = world.merchant.accept(C, V, T, r_v)
    assert verdict and result == 0


def test_purse_save_load(world, tmp_path):
    user = world.user
    a = user.withdraw(world.atm)
    user.withdraw(world.atm)
    world.spend(a)
    path = tmp_path / "purse.txt"
    user.save_purse(path)
    saved = [wire.encode(e.record()) for e in user.purse]
    user.purse.clear()
    assert user.load_purse(path) == 2
    assert [wire.encode(e.record()) for e in user.purse] == saved
    assert [e.spent for e in user.purse] == [True, False]
    C, V, T, r_v = world.spend(user.unspent()[0])
    assert world.merchant.verify_tx(C, V, T, r_v)
