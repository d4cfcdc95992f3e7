"""Shared fixtures.  Keypair generation dominates test startup, so key
material is session scoped; anything mutable gets a fresh instance."""

import pytest

from medvault import mpa, rsa


def make_rng(seed: int) -> mpa.Rng:
    return mpa.Rng.from_int_seed(seed)


@pytest.fixture()
def rng() -> mpa.Rng:
    return make_rng(0xC0FFEE)


@pytest.fixture(scope="session")
def kp512_a() -> rsa.KeyPair:
    return rsa.keygen(512, make_rng(101))


@pytest.fixture(scope="session")
def kp512_b() -> rsa.KeyPair:
    return rsa.keygen(512, make_rng(202))


@pytest.fixture(scope="session")
def kp1024() -> rsa.KeyPair:
    return rsa.keygen(1024, make_rng(303))
