"""Binary subdivision and periodic smoothing built from minimum-variance rules.

A refinement step doubles a periodic sequence: each source index i yields
two values, computed by minimum-variance rules on the 2n-point stencil
around i with evaluation points at the two finer-grid nodes below 2i and
2i+1. Smoothing keeps the sequence length and re-estimates every sample
from its 2n neighbors.

Periodic boundary handling: values wrap modulo the period while abscissae
continue unwrapped (shifted by whole periods), so every stencil sees
strictly increasing nodes even across the seam.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .core import Grid, NoiseCovariance, StencilSetting, make_covariance
from .errors import BlockMismatch, DegreeOutOfRange, DimensionMismatch, StencilTooWide
from .solver import minimum_variance_coefficients

__all__ = [
    "SchemeConfig",
    "PeriodicSequence",
    "dyadic_grid",
    "refine_once",
    "smooth_in_place",
]

CovProvider = Union[NoiseCovariance, Callable[[int, int], NoiseCovariance]]


def dyadic_grid(level: int, index: int) -> float:
    """Default grid family: integers scaled by 2^-level."""
    return index * 2.0**-level


@dataclass(frozen=True)
class SchemeConfig:
    """Stencil half-width, reproduction degree, grids and covariances.

    ``covariance_provider`` is either a single 2n x 2n covariance (used for
    every stencil; enables per-level rule caching on the default uniform
    grid family) or a callable mapping (level, index) to the stencil
    covariance.
    """

    half_width_n: int
    degree_d: int
    covariance_provider: CovProvider
    grid_family: Callable[[int, int], float] = field(default=dyadic_grid)

    def __post_init__(self):
        if self.half_width_n < 1:
            raise DimensionMismatch(f"half_width_n must be >= 1, got {self.half_width_n}")
        if not 0 <= self.degree_d <= 2 * self.half_width_n:
            raise DegreeOutOfRange(
                f"degree_d={self.degree_d} outside [0, {2 * self.half_width_n}]"
            )

    @property
    def stencil_width(self) -> int:
        return 2 * self.half_width_n

    def covariance_at(self, level: int, index: int) -> NoiseCovariance:
        provider = self.covariance_provider
        cov = provider if isinstance(provider, NoiseCovariance) else provider(level, index)
        if cov.dim != self.stencil_width:
            raise DimensionMismatch(
                f"stencil covariance dim {cov.dim}, expected {self.stencil_width}"
            )
        return cov

    @property
    def rules_cacheable(self) -> bool:
        # translation invariance needs a uniform grid and one covariance for all stencils
        return isinstance(self.covariance_provider, NoiseCovariance) and (
            self.grid_family is dyadic_grid
        )


@dataclass(frozen=True)
class PeriodicSequence:
    """Periodic samples; scalar (M,) or paired coordinates (M, c)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim not in (1, 2) or v.shape[0] < 1:
            raise DimensionMismatch(f"values must be (M,) or (M, c), got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def period(self) -> int:
        return self.values.shape[0]

    def window(self, start: int, width: int) -> np.ndarray:
        """Samples at indices start..start+width-1, wrapped modulo the period."""
        idx = np.arange(start, start + width) % self.period
        return self.values[idx]


def _stencil_abscissae(cfg: SchemeConfig, level: int, i: int) -> np.ndarray:
    n = cfg.half_width_n
    return np.array(
        [cfg.grid_family(level, j) for j in range(i - n + 1, i + n + 1)], dtype=float
    )


def refine_once(seq: PeriodicSequence, cfg: SchemeConfig, level: int) -> PeriodicSequence:
    """One binary refinement step: length M in, length 2M out.

    Output entries 2i and 2i+1 apply minimum-variance rules over the source
    window i-n+1..i+n, evaluated at the two finer-grid nodes it brackets.
    """
    n = cfg.half_width_n
    m = seq.period
    if m < cfg.stencil_width:
        raise StencilTooWide(f"period {m} shorter than stencil width {cfg.stencil_width}")

    cached = None
    if cfg.rules_cacheable:
        cached = _refinement_rules(cfg, level, 0)

    out = np.empty((2 * m,) + seq.values.shape[1:])
    for i in range(m):
        a_even, a_odd = cached if cached is not None else _refinement_rules(cfg, level, i)
        window = seq.window(i - n + 1, cfg.stencil_width)
        out[2 * i] = a_even @ window
        out[2 * i + 1] = a_odd @ window
    return PeriodicSequence(values=out)


def _refinement_rules(cfg: SchemeConfig, level: int, i: int) -> tuple[np.ndarray, np.ndarray]:
    xs = _stencil_abscissae(cfg, level, i)
    grid = Grid(xs)
    cov = cfg.covariance_at(level, i)
    rules = []
    for t0 in (cfg.grid_family(level + 1, 2 * i), cfg.grid_family(level + 1, 2 * i + 1)):
        setting = StencilSetting(grid=grid, t0=t0, degree_d=cfg.degree_d)
        rules.append(minimum_variance_coefficients(setting, cov)[0])
    return rules[0], rules[1]


def smooth_in_place(
    seq: PeriodicSequence,
    cfg: SchemeConfig,
    cov_global: NoiseCovariance,
    abscissae: np.ndarray | None = None,
    abscissa_period: float | None = None,
    rule: str = "minvar",
) -> PeriodicSequence:
    """Re-estimate every sample from its 2n neighbors, keeping the length.

    Entry i is the rule for evaluation point ``abscissae[i]`` over the
    stencil of 2n wrapped neighbors, using the principal submatrix of the
    global covariance at the stencil's wrapped indices. ``cov_global`` may
    cover the full period M or a block size B dividing M; blocks tile
    block-diagonally. Defaults place samples at angles 2*pi*i/M with period
    2*pi.

    ``rule="uniform"`` applies the plain 1/(2n) moving average over the same
    window instead (the reference rule the minimum-variance one is judged
    against); the covariance then only fixes dimensions.
    """
    n = cfg.half_width_n
    width = cfg.stencil_width
    m = seq.period
    if m < width:
        raise StencilTooWide(f"period {m} shorter than stencil width {width}")
    if rule not in ("minvar", "uniform"):
        raise ValueError(f"unknown rule {rule!r}")

    if abscissae is None:
        abscissae = 2.0 * np.pi * np.arange(m) / m
        abscissa_period = 2.0 * np.pi
    else:
        abscissae = np.asarray(abscissae, dtype=float)
        if abscissae.shape != (m,):
            raise DimensionMismatch(f"abscissae shape {abscissae.shape}, expected ({m},)")
        if abscissa_period is None:
            raise DimensionMismatch("abscissa_period required with explicit abscissae")

    b = cov_global.dim
    if m % b != 0:
        raise BlockMismatch(f"covariance block size {b} does not divide period {m}")
    if b == m:
        omega_global = cov_global.omega_hat
    else:
        omega_global = np.zeros((m, m))
        for blk in range(m // b):
            omega_global[blk * b : (blk + 1) * b, blk * b : (blk + 1) * b] = cov_global.omega_hat

    out = np.empty_like(seq.values)
    offsets = np.arange(-n + 1, n + 1)
    for i in range(m):
        js = i + offsets
        wrapped = js % m
        window = seq.values[wrapped]
        if rule == "uniform":
            out[i] = window.mean(axis=0)
            continue
        xs = abscissae[wrapped] + abscissa_period * (js // m)
        stencil_cov = make_covariance(omega_global[np.ix_(wrapped, wrapped)])
        setting = StencilSetting(grid=Grid(xs), t0=abscissae[i], degree_d=cfg.degree_d)
        coeffs, _ = minimum_variance_coefficients(setting, stencil_cov)
        out[i] = coeffs @ window
    return PeriodicSequence(values=out)
