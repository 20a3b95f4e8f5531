#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the per-stencil minimum-variance solve (the hot kernel of the
refinement and sweep loops) on identical seeded inputs for a few
(stencil size, degree) shapes, and verifies both backends agree.

Run from the repository root after an editable install:

    python benchmarks/bench_backends.py [--repeats 2000]
"""

import argparse
import time

import numpy as np

from mvapprox._kernels import available_backends

SHAPES = [(16, 1), (16, 2), (16, 4), (32, 3), (64, 3)]


def problem(n: int, d: int, seed: int):
    rng = np.random.default_rng(seed)
    x = np.cumsum(rng.uniform(0.5, 1.5, size=n))
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    omega_hat = q @ np.diag(rng.uniform(0.5, 50.0, size=n)) @ q.T
    omega_hat = 0.5 * (omega_hat + omega_hat.T)
    # feasible start: Lagrange weights on the d nodes nearest the target
    t0 = float(x[n // 2]) + 0.3
    near = np.argsort(np.abs(x - t0), kind="stable")[:d]
    a0 = np.zeros(n)
    for pos, i in enumerate(near):
        w = 1.0
        for k in near:
            if k != i:
                w *= (t0 - x[k]) / (x[i] - x[k])
        a0[i] = w
    return x, omega_hat, a0


def time_backend(module, x, d, omega_hat, a0, repeats: int) -> float:
    module.annihilation_solve(x, d, omega_hat, a0)  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        module.annihilation_solve(x, d, omega_hat, a0)
    return (time.perf_counter() - start) / repeats


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()

    backends = available_backends()
    print(f"available backends: {', '.join(sorted(backends))}")
    if "compiled" not in backends:
        print("compiled extension not built; timing the python backend only")

    header = f"{'N':>4} {'d':>3}" + "".join(f" {name:>14}" for name in sorted(backends))
    if len(backends) == 2:
        header += f" {'speedup':>9}"
    print(header)

    for n, d in SHAPES:
        x, omega_hat, a0 = problem(n, d, seed=n * 100 + d)
        results = {}
        timings = {}
        for name in sorted(backends):
            timings[name] = time_backend(backends[name], x, d, omega_hat, a0, args.repeats)
            results[name] = backends[name].annihilation_solve(x, d, omega_hat, a0)[0]
        row = f"{n:>4} {d:>3}" + "".join(
            f" {timings[name] * 1e6:>11.2f} us" for name in sorted(backends)
        )
        if len(backends) == 2:
            row += f" {timings['python'] / timings['compiled']:>8.1f}x"
            gap = np.max(np.abs(results["python"] - results["compiled"]))
            scale = max(1.0, np.max(np.abs(results["python"])))
            # both backends drift with the reduced system's conditioning;
            # 1e-8 relative is the library's own agreement bar
            assert gap <= 1e-8 * scale, f"backends disagree by {gap:.3e} at N={n}, d={d}"
        print(row)


if __name__ == "__main__":
    main()
