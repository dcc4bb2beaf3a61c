import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nesskubo import LatticeSpec, PotentialSpec, ThermoParams

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def chain3():
    return LatticeSpec(1, 1)


@pytest.fixture
def random_chain():
    """N=10 open chain with a seeded uniform[-1, 1] potential."""
    lat = LatticeSpec(1, 10)
    rng = np.random.default_rng(7)
    pot = PotentialSpec.from_table({tuple(c): v for c, v in zip(lat.coords().tolist(), rng.uniform(-1, 1, lat.n_sites))})
    return lat, pot


@pytest.fixture
def dimer():
    return PotentialSpec.periodic((2,), [1.0, -1.0])


def thermo(beta=10.0, mu=0.0, lam=0.5, E=0.0):
    return ThermoParams(beta, mu, lam, E)
