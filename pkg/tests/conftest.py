import pytest

from hillbasis.acceptance import (AcceptanceContext, cos2_spec, mode1_spec,
                                  sawtooth_spec)


@pytest.fixture(scope="session")
def ctx():
    """Shared cache of spectra and series for the expensive corpus objects."""
    return AcceptanceContext()


@pytest.fixture(scope="session")
def sawtooth():
    return sawtooth_spec()


@pytest.fixture(scope="session")
def cos2():
    return cos2_spec()


@pytest.fixture(scope="session")
def mode1():
    return mode1_spec()


@pytest.fixture(scope="session")
def sawtooth_pairs_128(ctx):
    """Normal system of the sampled sawtooth at N = 128, pairs up to 32."""
    pairs, head = ctx.system("sawtooth", 0, 128, 32)
    return pairs


@pytest.fixture(scope="session")
def mode1_pairs_64(ctx):
    pairs, head = ctx.system("mode1", 0, 64, 8)
    return pairs


@pytest.fixture(scope="session")
def cos2_pairs_64(ctx):
    pairs, head = ctx.system("cos2", 0, 64, 10)
    return pairs
