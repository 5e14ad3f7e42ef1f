from functools import lru_cache

import numpy as np
import pytest
from hypothesis import settings, HealthCheck

from weylest import ChannelParams
from weylest.design import find_config

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def random_channel(d: int, rng: np.random.Generator) -> ChannelParams:
    return ChannelParams(d=d, p=rng.dirichlet(np.ones(d * d)))


def random_density_matrix(d: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = G @ G.conj().T
    return rho / np.trace(rho)


@lru_cache(maxsize=None)
def config_for(d: int):
    """Per-session memo so tests do not rerun the configuration search."""
    return find_config(d)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
