import numpy as np
import pytest

from cellcache.geometry import NetworkParams

# canonical evaluation point: unit density, alpha=4, three antennas,
# three-station clusters, 0 dB threshold
BASE = dict(lambda_b=1.0, alpha=4.0, L=3, K=3, gamma=1.0)


def mk_params(**overrides) -> NetworkParams:
    return NetworkParams(**{**BASE, **overrides})


def db(gamma_db: float) -> float:
    return 10.0 ** (gamma_db / 10.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260814)
