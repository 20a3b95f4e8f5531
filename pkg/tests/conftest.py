"""Shared fixtures and random-case factories for the test suite."""

import numpy as np
import pytest

from mvapprox import Grid, make_covariance


@pytest.fixture
def bench_grid():
    """The 16-point integer grid -7..8 used by the sweep experiments."""
    return Grid(np.arange(-7.0, 9.0))


def random_grid(rng, n, spacing_low=0.5, spacing_high=1.5, center=True):
    """Strictly increasing grid with bounded spacing ratio."""
    x = np.cumsum(rng.uniform(spacing_low, spacing_high, size=n))
    return Grid(x - x.mean() if center else x)


def random_spd(rng, n, cond=1e3):
    """Random SPD covariance with eigenvalues spanning the given condition."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.geomspace(1.0, cond, n)
    m = (q * lam) @ q.T
    return make_covariance(0.5 * (m + m.T))
