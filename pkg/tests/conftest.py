import random

import pytest

from nnmarket import MarketParams


@pytest.fixture
def defaults() -> MarketParams:
    """Reference parameter set used throughout the regression anchors."""
    return MarketParams()


def random_params(rng: random.Random) -> MarketParams:
    """A random parameter set satisfying every standing assumption."""
    while True:
        v = rng.uniform(0.12, 0.42)
        w = rng.uniform(0.12, 0.42)
        if v + w <= 0.8:
            break
    theta = rng.uniform(6.0, 25.0)
    return MarketParams(
        a=rng.uniform(0.8, 1.6) * theta,
        theta=theta,
        v=v,
        w=w,
        N=rng.randint(1, 4),
        alpha=rng.uniform(1.05, 1.8),
        beta=rng.uniform(1.05, 1.8),
        c_e=rng.uniform(0.02, 0.3),
        k=rng.uniform(0.05, 0.25),
    )
