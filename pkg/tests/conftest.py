import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "catgkp",
    deadline=None,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("catgkp")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_pure(rng, cutoff, support=None):
    """Random normalized vector supported on the lowest ``support`` levels."""
    from catgkp.fock import PureState

    support = cutoff if support is None else support
    v = np.zeros(cutoff, complex)
    v[:support] = rng.normal(size=support) + 1j * rng.normal(size=support)
    return PureState(v / np.linalg.norm(v), 1, cutoff)


def random_density(rng, cutoff, support=None, rank=3):
    from catgkp.fock import DensityState

    support = cutoff if support is None else support
    m = np.zeros((cutoff, rank), complex)
    m[:support] = rng.normal(size=(support, rank)) + 1j * rng.normal(size=(support, rank))
    rho = m @ m.conj().T
    return DensityState(rho / np.trace(rho), 1, cutoff)
