import numpy as np
import pytest

from lieadapt.rigid_body import PAPER_OMEGA_D, PAPER_VEL_D, BodyState, InertialParams, step
from lieadapt.se3 import hat6


@pytest.fixture
def paper_params():
    return InertialParams.paper()


@pytest.fixture
def paper_twist():
    return np.concatenate([PAPER_OMEGA_D, PAPER_VEL_D])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_spd(rng, n=3, floor=0.3):
    g = rng.normal(size=(n, n))
    return g @ g.T + floor * np.eye(n)


def random_params(rng):
    return InertialParams(rng.uniform(0.5, 5.0), random_spd(rng))


def signed_flow(s, u, p, h):
    """Advance by h (either sign) with the forward integrator.

    Backward steps use time reversal: zeta -> -zeta leaves the twist dynamics invariant.
    """
    if h > 0:
        return step(s, u, p, h)
    back = step(BodyState(s.pose, -s.twist), u, p, -h)
    return BodyState(back.pose, -back.twist)


def series_exp(xi, terms=20, squarings=4):
    """Truncated power series of the 4x4 matrix exponential with scaling and squaring."""
    m = hat6(xi) / 2.0 ** squarings
    out = np.eye(4)
    term = np.eye(4)
    for i in range(1, terms):
        term = term @ m / i
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out
