"""Benchmark covariance families, variance-ratio sweeps and the star study.

Three numerical studies on a fixed 16-point integer grid:

1. Uncorrelated noise with two variance levels: diagonal covariance, value
   ``eps`` over the nonpositive abscissae and 1 over the rest.
2. Correlated noise with unit variance: block-diagonal covariance with 4x4
   blocks whose off-diagonals approach -1 as ``eps`` shrinks.
3. A closed star-shaped curve sampled at 320 points, corrupted with
   correlated noise, then smoothed by the minimum-variance rule versus the
   plain 16-point moving average.

The figure of merit for the sweeps is the variance ratio rho: output noise
variance of the minimum-variance rule divided by that of the uniform
1/16-weights rule.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import Grid, NoiseCovariance, make_covariance, make_setting, variance_of
from .errors import DimensionMismatch, EpsilonOutOfRange
from .solver import solve_annihilation
from .subdivision import PeriodicSequence, SchemeConfig, smooth_in_place

__all__ = [
    "EXPERIMENT_GRID",
    "UNIFORM_RULE",
    "STAR_SAMPLE_COUNT",
    "STAR_VARIANTS",
    "RhoRecord",
    "StarRun",
    "cov_experiment1",
    "cov_experiment2",
    "default_epsilons",
    "rho_sweep",
    "sample_noise",
    "star_curve",
    "run_star",
]

# Integer abscissae -7..8; both sweep experiments use this 16-point stencil.
EXPERIMENT_GRID = Grid(np.arange(-7.0, 9.0))
# Uniform averaging rule, the reference the sweeps compare against.
UNIFORM_RULE = np.full(16, 1.0 / 16.0)

STAR_SAMPLE_COUNT = 320
STAR_VARIANTS = ("exp1_noise", "exp2_noise")
_STAR_EPSILON = 1e-10


def cov_experiment1(epsilon: float) -> NoiseCovariance:
    """Two-level diagonal covariance: ``epsilon`` where x <= 0, else 1.

    Requires ``epsilon`` in the open interval (0, 1); at 1 the matrix is the
    identity and the comparison is vacuous, at 0 it is singular.
    """
    if not 0.0 < epsilon < 1.0:
        raise EpsilonOutOfRange(f"experiment 1 needs epsilon in (0, 1), got {epsilon}")
    diag = np.where(EXPERIMENT_GRID.points <= 0, epsilon, 1.0)
    return make_covariance(np.diag(diag))


def _experiment2_block(epsilon: float) -> np.ndarray:
    return np.array(
        [
            [1.0, -1.0 + epsilon, 0.0, 0.0],
            [-1.0 + epsilon, 1.0, -epsilon, 0.0],
            [0.0, -epsilon, 1.0, -epsilon],
            [0.0, 0.0, -epsilon, 1.0],
        ]
    )


def cov_experiment2(epsilon: float) -> NoiseCovariance:
    """Unit-variance correlated covariance: four 4x4 blocks on the diagonal.

    ``epsilon`` must lie in (0, 0.1]; epsilon = 0 passes the range guard but
    the resulting matrix is singular and is rejected by the SPD check.
    """
    if epsilon < 0.0 or epsilon > 0.1:
        raise EpsilonOutOfRange(f"experiment 2 needs epsilon in (0, 0.1], got {epsilon}")
    block = _experiment2_block(epsilon)
    full = np.zeros((16, 16))
    for b in range(4):
        full[4 * b : 4 * b + 4, 4 * b : 4 * b + 4] = block
    return make_covariance(full)


_COV_BUILDERS = {1: cov_experiment1, 2: cov_experiment2}


def default_epsilons(experiment: int) -> np.ndarray:
    """40 log-spaced epsilon values strictly inside the experiment's range."""
    hi = {1: 1.0, 2: 0.1}[experiment]
    return np.geomspace(1e-6, hi, 40, endpoint=False)


@dataclass(frozen=True)
class RhoRecord:
    """One sweep point: variance ratio of optimal rule vs uniform average."""

    epsilon: float
    t0: float
    degree_label_dprime: int
    rho: float

    def __post_init__(self):
        if not (np.isfinite(self.rho) and self.rho >= 0):
            raise DimensionMismatch(f"rho must be finite and nonnegative, got {self.rho}")


def rho_sweep(
    experiment: int,
    epsilons=None,
    t0s=(0.0, 0.25, 0.5),
    dprimes=(0, 1, 2, 3),
    workers: int | None = None,
) -> list[RhoRecord]:
    """Variance-ratio sweep over (epsilon, t0, d') on the 16-point grid.

    ``dprimes`` use the degree labeling of the sweeps: d' = d - 1, so d' = 0
    compares mean-type rules. Records are ordered by (epsilon ascending, t0,
    d'). ``workers`` > 1 evaluates epsilon points in a thread pool; the
    output order is unchanged.
    """
    if experiment not in _COV_BUILDERS:
        raise EpsilonOutOfRange(f"experiment must be 1 or 2, got {experiment}")
    build = _COV_BUILDERS[experiment]
    if epsilons is None:
        epsilons = default_epsilons(experiment)

    def one_epsilon(eps: float) -> list[RhoRecord]:
        cov = build(float(eps))
        base_variance = variance_of(UNIFORM_RULE, cov)
        recs = []
        for t0 in t0s:
            for dp in dprimes:
                setting = make_setting(EXPERIMENT_GRID, float(t0), int(dp) + 1)
                report = solve_annihilation(setting, cov)
                recs.append(
                    RhoRecord(
                        epsilon=float(eps),
                        t0=float(t0),
                        degree_label_dprime=int(dp),
                        rho=report.approximant.variance / base_variance,
                    )
                )
        return recs

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(one_epsilon, epsilons))
    else:
        chunks = [one_epsilon(eps) for eps in epsilons]
    return [rec for chunk in chunks for rec in chunk]


def sample_noise(cov: NoiseCovariance, seed, size: int | None = None) -> np.ndarray:
    """Zero-mean noise draw(s) with covariance ``cov``; deterministic per seed.

    Standard-normal vectors pushed through the transposed triangular factor,
    so the sample covariance converges to the stored matrix. ``seed`` is
    anything ``numpy.random.default_rng`` accepts. With ``size`` given,
    returns a (size, N) array drawn from one generator stream.
    """
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((size or 1, cov.dim))
    draws = z @ cov.omega_factor
    return draws if size is not None else draws[0]


def star_curve(t: np.ndarray) -> np.ndarray:
    """Closed star-shaped test curve; returns (len(t), 2) coordinates."""
    t = np.asarray(t, dtype=float)
    return np.stack(
        [4.0 * np.cos(t) + np.cos(4.0 * t), 4.0 * np.sin(t) - np.sin(4.0 * t)], axis=-1
    )


@lru_cache(maxsize=4)
def _star_block(variant: str) -> NoiseCovariance:
    if variant == "exp1_noise":
        base = cov_experiment1(_STAR_EPSILON)
    elif variant == "exp2_noise":
        base = cov_experiment2(_STAR_EPSILON)
    else:
        raise EpsilonOutOfRange(f"unknown star variant {variant!r}")
    return make_covariance(0.5 * base.omega_hat)


@lru_cache(maxsize=4)
def _star_global(variant: str) -> NoiseCovariance:
    block = _star_block(variant).omega_hat
    b = block.shape[0]
    full = np.zeros((STAR_SAMPLE_COUNT, STAR_SAMPLE_COUNT))
    for blk in range(STAR_SAMPLE_COUNT // b):
        full[blk * b : (blk + 1) * b, blk * b : (blk + 1) * b] = block
    return make_covariance(full)


@dataclass(frozen=True)
class StarRun:
    """All inputs and outputs of one star-curve smoothing run."""

    variant: str
    seed: int
    samples: np.ndarray
    truth: np.ndarray
    noisy: np.ndarray
    refined_mv: np.ndarray
    refined_avg: np.ndarray
    mse_mv: float
    mse_avg: float

    def __post_init__(self):
        m = STAR_SAMPLE_COUNT
        shapes = {
            "samples": (m,),
            "truth": (m, 2),
            "noisy": (m, 2),
            "refined_mv": (m, 2),
            "refined_avg": (m, 2),
        }
        for name, want in shapes.items():
            got = getattr(self, name).shape
            if got != want:
                raise DimensionMismatch(f"{name} has shape {got}, expected {want}")
        if not (np.isfinite(self.mse_mv) and np.isfinite(self.mse_avg)):
            raise DimensionMismatch("MSE values must be finite")


def run_star(variant: str, seed: int) -> StarRun:
    """Sample, corrupt and smooth the star curve; record both rules' MSE.

    The two coordinates receive independent noise draws (child seeds spawned
    from ``seed``). Smoothing evaluates at each sample's own angle with the
    16 wrapped neighbors and degree 2 (linear reproduction); the reported
    MSE is the mean squared deviation from the true curve over all 320
    samples and both coordinates.
    """
    if variant not in STAR_VARIANTS:
        raise EpsilonOutOfRange(f"unknown star variant {variant!r}")
    m = STAR_SAMPLE_COUNT
    t = 2.0 * np.pi * np.arange(m) / m
    truth = star_curve(t)

    global_cov = _star_global(variant)
    seed_x, seed_y = np.random.SeedSequence(seed).spawn(2)
    noise = np.stack(
        [sample_noise(global_cov, seed_x), sample_noise(global_cov, seed_y)], axis=-1
    )
    noisy = truth + noise

    block = _star_block(variant)
    cfg = SchemeConfig(half_width_n=8, degree_d=2, covariance_provider=block)
    seq = PeriodicSequence(values=noisy)
    refined_mv = smooth_in_place(seq, cfg, block).values
    refined_avg = smooth_in_place(seq, cfg, block, rule="uniform").values

    return StarRun(
        variant=variant,
        seed=int(seed),
        samples=t,
        truth=truth,
        noisy=noisy,
        refined_mv=refined_mv,
        refined_avg=refined_avg,
        mse_mv=float(np.mean((refined_mv - truth) ** 2)),
        mse_avg=float(np.mean((refined_avg - truth) ** 2)),
    )
