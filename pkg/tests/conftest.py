import random

import pytest

from ecash.atm import AtmConfig, init_atm
from ecash.bank import BankConfig, init_bank
from ecash.params import production, toy
from ecash.wallet import MerchantView, init_user


@pytest.fixture(scope="session")
def toy_params():
    return toy()


@pytest.fixture(scope="session")
def prod_params():
    return production()


@pytest.fixture
def rng():
    return random.Random(1234)


class World:
    def __init__(self, params, seed=0, n_atms=1, n_users=2, n_merchants=1, compact=False, offline=False, bank_config=None):
        self.rng = random.Random(seed)
        self.bank = init_bank(params, bank_config or BankConfig(), self.rng)
        self.atms = [init_atm(self.bank, AtmConfig(offline=offline), self.rng) for _ in range(n_atms)]
        self.users = [init_user(self.bank, self.rng) for _ in range(n_users)]
        self.merchants = [MerchantView(init_user(self.bank, self.rng)) for _ in range(n_merchants)]
        for atm in self.atms:
            if compact:
                atm.req_coin_compact(4)
            else:
                atm.req_coin(4)

    @property
    def atm(self):
        return self.atms[0]

    @property
    def user(self):
        return self.users[0]

    @property
    def merchant(self):
        return self.merchants[0]

    def spend(self, entry, user=None, merchant=None):
        user, merchant = user or self.user, merchant or self.merchant
        r_v = merchant.new_session()
        return (*user.spend(entry, merchant.pk_m, r_v), r_v)


@pytest.fixture
def make_world(toy_params):
    def factory(**kw):
        params = kw.pop("params", toy_params)
        return World(params, **kw)

    return factory


@pytest.fixture
def world(make_world):
    return make_world()


@pytest.fixture(scope="session")
def prod_world(prod_params):
    return World(prod_params, seed=7, n_users=2)
