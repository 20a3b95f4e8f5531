"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; every tolerance is pinned here, nothing is deferred.
"""

import time

import numpy as np
import pytest

import mvapprox as mv
from mvapprox import experiments as ex
from mvapprox.cli import main as cli_main

from .conftest import random_grid, random_spd
from .oracles import kkt_minimum_variance


def report(number, name, passed, detail=""):
    line = f"[acceptance] criterion {number:>2} ({name}): {'PASS' if passed else 'FAIL'}"
    if detail:
        line += f"  [{detail}]"
    print(line)
    assert passed, f"criterion {number} ({name}): {detail}"


def solve_case(rng, ns=(4, 8, 16), max_dprime=4, max_cond=1e6):
    n = int(rng.choice(ns))
    dprime = int(rng.integers(0, min(max_dprime, n - 1) + 1))
    grid = random_grid(rng, n)
    cov = random_spd(rng, n, cond=10 ** rng.uniform(0, np.log10(max_cond)))
    t0 = float(rng.uniform(grid.points[0], grid.points[-1]))
    return mv.make_setting(grid, t0, dprime + 1), cov


def test_criterion_1_route_equivalence():
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    worst_dev = 0.0
    worst_repro = 0.0
    worst_kernel = 0.0
    for _ in range(200):
        setting, cov = solve_case(rng)
        reports = [
            mv.solve_annihilation(setting, cov),
            mv.solve_small_system(setting, cov),
            mv.solve_orthopoly(setting, cov),
        ]
        coeffs = [r.approximant.coefficients for r in reports]
        scale = max(float(np.max(np.abs(coeffs[0]))), 1e-300)
        for i in range(3):
            for j in range(i + 1, 3):
                worst_dev = max(worst_dev, float(np.max(np.abs(coeffs[i] - coeffs[j]))) / scale)
        worst_repro = max(worst_repro, max(r.reproduction_residual for r in reports))
        worst_kernel = max(worst_kernel, max(r.kernel_residual for r in reports))
    elapsed = time.perf_counter() - start
    test_criterion_1_route_equivalence.residuals = (worst_repro, worst_kernel)
    report(
        1,
        "route equivalence",
        worst_dev <= 1e-8 and elapsed < 5.0,
        f"worst deviation {worst_dev:.2e}, {elapsed:.2f}s for 200 cases",
    )


def test_criterion_2_kkt_oracle():
    rng = np.random.default_rng(1002)
    worst = 0.0
    for _ in range(100):
        setting, cov = solve_case(rng, ns=(3, 4, 5, 6), max_dprime=2, max_cond=1e4)
        a = mv.solve_annihilation(setting, cov).approximant.coefficients
        oracle = kkt_minimum_variance(
            setting.grid.points, setting.t0, setting.degree_d, cov.omega_hat
        )
        worst = max(worst, float(np.max(np.abs(a - oracle))) / max(1.0, np.max(np.abs(oracle))))
    report(2, "KKT oracle equivalence", worst <= 1e-10, f"worst gap {worst:.2e}")


def test_criterion_3_reproduction():
    rng = np.random.default_rng(1003)
    worst = 0.0
    for _ in range(100):
        setting, cov = solve_case(rng)
        for solve in (mv.solve_annihilation, mv.solve_small_system, mv.solve_orthopoly):
            worst = max(worst, solve(setting, cov).reproduction_residual)
    carried = getattr(test_criterion_1_route_equivalence, "residuals", (0.0, 0.0))[0]
    worst = max(worst, carried)
    report(3, "reproduction", worst <= 1e-9, f"worst scaled residual {worst:.2e}")


def test_criterion_4_characterization_residual():
    rng = np.random.default_rng(1004)
    worst = 0.0
    for _ in range(100):
        setting, cov = solve_case(rng)
        rep = mv.solve_annihilation(setting, cov)
        worst = max(worst, rep.kernel_residual)
    carried = getattr(test_criterion_1_route_equivalence, "residuals", (0.0, 0.0))[1]
    worst = max(worst, carried)
    report(4, "characterization residual", worst <= 1e-9, f"worst {worst:.2e}")


def test_criterion_5_lower_bound():
    rng = np.random.default_rng(1005)
    worst_gap = 0.0
    floor_ok = True
    for _ in range(100):
        n = int(rng.choice([4, 8, 16]))
        grid = random_grid(rng, n)
        cov = random_spd(rng, n, cond=10 ** rng.uniform(0, 6))
        t0 = float(rng.uniform(grid.points[0], grid.points[-1]))
        rep = mv.solve_annihilation(mv.make_setting(grid, t0, 1), cov)
        bound = mv.variance_lower_bound(cov)
        worst_gap = max(worst_gap, abs(rep.approximant.variance - bound) / bound)
        for _ in range(5):
            bump = rng.standard_normal(n)
            bump -= bump.mean()  # keeps the sum-to-one constraint
            other = rep.approximant.coefficients + bump
            if mv.variance_of(other, cov) < bound - 1e-12:
                floor_ok = False
    report(
        5,
        "lower bound",
        worst_gap <= 1e-10 and floor_ok,
        f"worst relative gap {worst_gap:.2e}, floor held: {floor_ok}",
    )


def test_criterion_6_variance_ordering():
    rng = np.random.default_rng(1006)
    violations = 0
    for _ in range(100):
        n = 12
        grid = random_grid(rng, n)
        cov = random_spd(rng, n, cond=10 ** rng.uniform(0, 5))
        sub_idx = np.sort(rng.choice(n, size=int(rng.integers(4, 9)), replace=False))
        sub_grid = mv.Grid(grid.points[sub_idx])
        sub_cov = mv.make_covariance(cov.omega_hat[np.ix_(sub_idx, sub_idx)])
        t0 = float(rng.uniform(sub_grid.points[0], sub_grid.points[-1]))
        variances = [
            mv.solve_annihilation(mv.make_setting(grid, t0, dp + 1), cov).approximant.variance
            for dp in range(5)
        ]
        if np.any(np.diff(variances) < -1e-12 * max(variances)):
            violations += 1
        d = int(rng.integers(1, 4))
        full = mv.solve_annihilation(mv.make_setting(grid, t0, d), cov).approximant
        sub = mv.solve_annihilation(mv.make_setting(sub_grid, t0, d), sub_cov).approximant
        padded = np.zeros(n)
        padded[sub_idx] = sub.coefficients
        if full.variance > mv.variance_of(padded, cov) + 1e-12 * max(full.variance, 1e-300):
            violations += 1
    report(6, "variance ordering", violations == 0, f"{violations} violations in 100 cases")


def test_criterion_7_experiment1_closed_form():
    worst = 0.0
    for eps in (1e-6, 1e-4, 1e-2, 1e-1, 0.5):
        rho = ex.rho_sweep(1, epsilons=[eps], t0s=(0.25,), dprimes=(0,))[0].rho
        worst = max(worst, abs(rho - 4 * eps / (1 + eps) ** 2))
    report(7, "experiment 1 closed form", worst <= 1e-10, f"worst |gap| {worst:.2e}")


def test_criterion_8_rho_limits():
    start = time.perf_counter()
    ok = True
    detail = []
    for experiment in (1, 2):
        records = ex.rho_sweep(experiment)
        per_combo = {}
        for r in records:
            per_combo.setdefault((r.t0, r.degree_label_dprime), []).append((r.epsilon, r.rho))
        edge = ex.rho_sweep(experiment, epsilons=[1e-6, 1e-1])
        for t0 in (0.0, 0.25, 0.5):
            for dp in (0, 1, 2, 3):
                pairs = sorted(per_combo[(t0, dp)])
                rhos = np.array([p[1] for p in pairs])
                if not np.all(np.diff(rhos) > 0):
                    ok = False
                    detail.append(f"exp{experiment} t0={t0} d'={dp} not monotone")
                lo, hi = [
                    r.rho for r in edge if r.t0 == t0 and r.degree_label_dprime == dp
                ]
                if not lo < hi / 10:
                    ok = False
                    detail.append(f"exp{experiment} t0={t0} d'={dp} decay too weak")
    elapsed = time.perf_counter() - start
    if elapsed >= 10.0:
        ok = False
        detail.append(f"sweep took {elapsed:.1f}s")
    report(8, "rho limits", ok, "; ".join(detail) or f"both sweeps in {elapsed:.2f}s")


def test_criterion_9_star_improvement():
    start = time.perf_counter()
    ok = True
    detail = []
    for variant in ex.STAR_VARIANTS:
        canonical = ex.run_star(variant, seed=0)
        if not canonical.mse_mv < canonical.mse_avg:
            ok = False
            detail.append(f"{variant} canonical seed lost")
        runs = [ex.run_star(variant, seed=s) for s in range(50)]
        wins = sum(r.mse_mv < r.mse_avg for r in runs)
        if wins < 48:
            ok = False
            detail.append(f"{variant}: only {wins}/50 seed wins")
        else:
            detail.append(f"{variant}: {wins}/50 wins")
    elapsed = time.perf_counter() - start
    if elapsed >= 30.0:
        ok = False
        detail.append(f"took {elapsed:.1f}s")
    else:
        detail.append(f"{elapsed:.1f}s")
    report(9, "star improvement", ok, "; ".join(detail))


def test_criterion_10_approximation_order():
    base = ex.EXPERIMENT_GRID
    cov = mv.make_covariance(np.eye(16))
    t0 = 0.25
    hs = 2.0 ** -np.arange(3, 10)
    ok = True
    detail = []
    for dprime in (1, 2, 3):
        errs = []
        for h in hs:
            grid = mv.Grid(t0 + h * (base.points - t0))
            rep = mv.solve_annihilation(mv.make_setting(grid, t0, dprime + 1), cov)
            errs.append(abs(rep.approximant.coefficients @ np.sin(grid.points) - np.sin(t0)))
        slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
        detail.append(f"d'={dprime}: slope {slope:.2f}")
        if slope < dprime + 0.75:
            ok = False
    report(10, "approximation order", ok, "; ".join(detail))


def test_criterion_11_cli_determinism(tmp_path):
    pairs = []
    for tag in ("x", "y"):
        rho_out = tmp_path / f"rho_{tag}.csv"
        star_out = tmp_path / f"star_{tag}.csv"
        star_sum = tmp_path / f"star_{tag}.json"
        assert (
            cli_main(
                ["rho", "--experiment", "2", "--epsilons", "1e-5,1e-3", "--out", str(rho_out)]
            )
            == 0
        )
        assert (
            cli_main(
                [
                    "star",
                    "--variant",
                    "exp2_noise",
                    "--seed",
                    "3",
                    "--out",
                    str(star_out),
                    "--summary",
                    str(star_sum),
                ]
            )
            == 0
        )
        pairs.append((rho_out.read_bytes(), star_out.read_bytes(), star_sum.read_bytes()))
    identical = pairs[0] == pairs[1]
    report(11, "determinism", identical, "bitwise-identical CSV/JSON across reruns")
