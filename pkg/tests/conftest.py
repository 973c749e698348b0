import numpy as np
import pytest

from cglwaves.grid import Domain, ProblemParams, build_grid
from cglwaves.ground import solve_ground_state

_CACHE = {}


def get_ground(domain, dim, alpha, rho, npoints, rmax=None, theta=0.0):
    """Memoized ground states shared across test modules."""
    key = (domain, dim, alpha, rho, npoints, rmax, theta)
    if key not in _CACHE:
        params = ProblemParams(domain, dim, alpha, rho, theta=theta)
        grid = build_grid(params, npoints, rmax)
        _CACHE[key] = solve_ground_state(params, grid)
    return _CACHE[key]


@pytest.fixture(scope="session")
def ground_factory():
    return get_ground


@pytest.fixture(scope="session")
def sech_gs():
    """Reference whole-space state with the closed-form sech profile."""
    return get_ground(Domain.WHOLE_SPACE, 1, 2.0, 1.0, 2000, 15.0)


@pytest.fixture(scope="session")
def ball_gs():
    """Reference unit-ball state."""
    return get_ground(Domain.UNIT_BALL, 3, 2.0, 1.0, 500)


def rng(seed=0):
    return np.random.default_rng(seed)
