"""Command-line front end.

Subcommands:

* ``solve``      one minimum-variance rule from a JSON config (matrices live
                 in the config or a CSV file), emitted as JSON.
* ``rho``        variance-ratio sweep for benchmark experiment 1 or 2, CSV.
* ``star``       the star-curve smoothing study, CSV plus a JSON summary.
* ``subdivide``  repeated binary refinement of a periodic sequence, CSV.

Exit codes: 0 success, 1 numeric/solver failure, 2 usage or config error.
Output files are written atomically (temp file in the target directory,
then rename); floats are printed with 17 significant digits so every CSV
round-trips exactly. ``MVAPPROX_THREADS`` caps internal parallelism.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import jsonschema
import numpy as np

from . import experiments, subdivision
from .core import NoiseCovariance, make_covariance, make_setting
from .errors import MvapproxError
from .solver import solve_all_routes

__all__ = ["main"]


class ConfigError(Exception):
    """Bad config file or schema violation; maps to exit code 2."""


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _atomic_write(path: str, text: str):
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=target.name + ".")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        os.unlink(tmp)
        raise


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        _atomic_write(out, text)


def _load_config(path: str, schema: dict) -> dict:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    try:
        config = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        jsonschema.validate(config, schema)
    except jsonschema.ValidationError as exc:
        where = "$" + "".join(f"[{p!r}]" for p in exc.absolute_path)
        raise ConfigError(f"{path}: at {where}: {exc.message}") from exc
    return config


_COVARIANCE_SCHEMA = {
    "oneOf": [
        {"type": "string", "enum": ["identity"]},
        {
            "type": "object",
            "properties": {
                "inline": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "number"}},
                    "minItems": 1,
                }
            },
            "required": ["inline"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"csv": {"type": "string"}},
            "required": ["csv"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "experiment": {"type": "integer", "enum": [1, 2]},
                "epsilon": {"type": "number"},
            },
            "required": ["experiment", "epsilon"],
            "additionalProperties": False,
        },
    ]
}

_SOLVE_SCHEMA = {
    "type": "object",
    "properties": {
        "grid": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "t0": {"type": "number"},
        "dprime": {"type": "integer", "minimum": 0},
        "allow_extrapolation": {"type": "boolean"},
        "covariance": _COVARIANCE_SCHEMA,
    },
    "required": ["grid", "covariance"],
    "additionalProperties": False,
}

_SUBDIVIDE_SCHEMA = {
    "type": "object",
    "properties": {
        "sequence": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {"csv": {"type": "string"}},
                    "required": ["csv"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "inline": {
                            "type": "array",
                            "minItems": 1,
                            "items": {
                                "oneOf": [
                                    {"type": "number"},
                                    {
                                        "type": "array",
                                        "items": {"type": "number"},
                                        "minItems": 2,
                                        "maxItems": 2,
                                    },
                                ]
                            },
                        }
                    },
                    "required": ["inline"],
                    "additionalProperties": False,
                },
            ]
        },
        "levels": {"type": "integer", "minimum": 1, "maximum": 8},
        "n": {"type": "integer", "minimum": 1},
        "dprime": {"type": "integer", "minimum": 0},
        "covariance": _COVARIANCE_SCHEMA,
    },
    "required": ["sequence", "levels", "n", "dprime", "covariance"],
    "additionalProperties": False,
}


def _load_covariance(source, n: int, base_dir: Path) -> NoiseCovariance:
    if source == "identity":
        return make_covariance(np.eye(n))
    if "inline" in source:
        return make_covariance(np.array(source["inline"], dtype=float))
    if "csv" in source:
        path = base_dir / source["csv"]
        try:
            matrix = np.loadtxt(path, delimiter=",", ndmin=2)
        except OSError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"{path}: not a numeric matrix CSV: {exc}") from exc
        return make_covariance(matrix)
    builder = {1: experiments.cov_experiment1, 2: experiments.cov_experiment2}
    return builder[source["experiment"]](source["epsilon"])


def _load_sequence(source, base_dir: Path) -> np.ndarray:
    if "inline" in source:
        values = np.array(source["inline"], dtype=float)
        if values.ndim == 2 and values.shape[1] != 2:
            raise ConfigError("inline sequence pairs must have exactly two entries")
        return values
    path = base_dir / source["csv"]
    try:
        rows = [line.strip() for line in path.read_text().splitlines() if line.strip()]
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not rows:
        raise ConfigError(f"{path}: empty sequence file")
    start = 0
    try:
        float(rows[0].split(",")[0])
    except ValueError:
        start = 1  # header row
    data = []
    for lineno, row in enumerate(rows[start:], start=start + 1):
        parts = row.split(",")
        if len(parts) not in (2, 3):
            raise ConfigError(f"{path}:{lineno}: expected index,value[,value2]")
        try:
            idx = int(float(parts[0]))
            vals = [float(p) for p in parts[1:]]
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from exc
        if idx != len(data):
            raise ConfigError(f"{path}:{lineno}: index {idx} out of order, expected {len(data)}")
        data.append(vals)
    widths = {len(v) for v in data}
    if len(widths) != 1:
        raise ConfigError(f"{path}: inconsistent column count across rows")
    arr = np.array(data, dtype=float)
    return arr[:, 0] if arr.shape[1] == 1 else arr


def _cmd_solve(args) -> int:
    config = _load_config(args.config, _SOLVE_SCHEMA)
    t0 = args.t0 if args.t0 is not None else config.get("t0")
    dprime = args.dprime if args.dprime is not None else config.get("dprime")
    if t0 is None or dprime is None:
        raise ConfigError("t0 and dprime must be given in the config or as flags")
    if int(dprime) < 0:
        raise ConfigError(f"dprime must be nonnegative, got {dprime}")
    grid = np.array(config["grid"], dtype=float)
    cov = _load_covariance(config["covariance"], grid.size, Path(args.config).parent)
    setting = make_setting(
        grid, float(t0), int(dprime) + 1, config.get("allow_extrapolation", False)
    )
    report = solve_all_routes(setting, cov)
    payload = {
        "coefficients": [float(c) for c in report.approximant.coefficients],
        "variance": report.approximant.variance,
        "kernel_residual": report.kernel_residual,
        "reproduction_residual": report.reproduction_residual,
        "cross_route_deviation": report.cross_route_deviation,
        "route": report.route.value,
        "ill_conditioned": report.ill_conditioned,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _parse_floats(text: str, flag: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"{flag}: {exc}") from exc


def _cmd_rho(args) -> int:
    t0s = _parse_floats(args.t0s, "--t0s")
    try:
        dprimes = [int(p) for p in args.dprimes.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"--dprimes: {exc}") from exc
    if any(dp < 0 for dp in dprimes):
        raise ConfigError("dprime values must be nonnegative")
    if args.epsilons is None:
        epsilons = list(experiments.default_epsilons(args.experiment))
    else:
        epsilons = []
        for eps in sorted(_parse_floats(args.epsilons, "--epsilons")):  # eps-ascending rows
            try:
                builder = {1: experiments.cov_experiment1, 2: experiments.cov_experiment2}
                builder[args.experiment](eps)
            except MvapproxError as exc:
                print(f"warning: skipping epsilon={eps:g}: {exc}", file=sys.stderr)
                continue
            epsilons.append(eps)
    records = experiments.rho_sweep(
        args.experiment, epsilons, t0s, dprimes, workers=_worker_count()
    )
    lines = ["experiment,epsilon,t0,dprime,rho"]
    for rec in records:
        lines.append(
            f"{args.experiment},{_fmt(rec.epsilon)},{_fmt(rec.t0)},"
            f"{rec.degree_label_dprime},{_fmt(rec.rho)}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_star(args) -> int:
    run = experiments.run_star(args.variant, args.seed)
    lines = ["i,t,truth_x,truth_y,noisy_x,noisy_y,mv_x,mv_y,avg_x,avg_y"]
    for i in range(experiments.STAR_SAMPLE_COUNT):
        cells = [str(i), _fmt(run.samples[i])]
        for block in (run.truth, run.noisy, run.refined_mv, run.refined_avg):
            cells.extend([_fmt(block[i, 0]), _fmt(block[i, 1])])
        lines.append(",".join(cells))
    _emit("\n".join(lines) + "\n", args.out)
    summary = {
        "variant": run.variant,
        "seed": run.seed,
        "mse_mv": run.mse_mv,
        "mse_avg": run.mse_avg,
    }
    text = json.dumps(summary, indent=2) + "\n"
    if args.summary is not None:
        _atomic_write(args.summary, text)
    else:
        sys.stdout.write(text)  # after the CSV when both land on stdout
    return 0


def _cmd_subdivide(args) -> int:
    config = _load_config(args.config, _SUBDIVIDE_SCHEMA)
    base = Path(args.config).parent
    values = _load_sequence(config["sequence"], base)
    n = config["n"]
    dprime = args.dprime if args.dprime is not None else config["dprime"]
    if int(dprime) < 0:
        raise ConfigError(f"dprime must be nonnegative, got {dprime}")
    cov = _load_covariance(config["covariance"], 2 * n, base)
    cfg = subdivision.SchemeConfig(
        half_width_n=n, degree_d=int(dprime) + 1, covariance_provider=cov
    )
    seq = subdivision.PeriodicSequence(values=values)
    paired = seq.values.ndim == 2
    header = "level,index,abscissa,value" + (",value2" if paired else "")
    lines = [header]
    for level in range(config["levels"]):
        seq = subdivision.refine_once(seq, cfg, level)
        for idx in range(seq.period):
            abscissa = cfg.grid_family(level + 1, idx)
            if paired:
                row = (
                    f"{level + 1},{idx},{_fmt(abscissa)},"
                    f"{_fmt(seq.values[idx, 0])},{_fmt(seq.values[idx, 1])}"
                )
            else:
                row = f"{level + 1},{idx},{_fmt(abscissa)},{_fmt(seq.values[idx])}"
            lines.append(row)
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _worker_count() -> int:
    cap = os.environ.get("MVAPPROX_THREADS")
    default = min(os.cpu_count() or 1, 8)
    if cap is None:
        return default
    try:
        return max(1, min(default, int(cap)))
    except ValueError:
        print(f"warning: ignoring non-integer MVAPPROX_THREADS={cap!r}", file=sys.stderr)
        return default


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvapprox",
        description="Minimum-variance linear approximants for correlated noisy samples.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="compute one rule from a JSON config")
    p_solve.add_argument("--config", required=True, help="JSON config path")
    p_solve.add_argument("--t0", type=float, default=None, help="override config t0")
    p_solve.add_argument("--dprime", type=int, default=None, help="override config d'")
    p_solve.add_argument("--out", default=None, help="output JSON path (default stdout)")
    p_solve.set_defaults(func=_cmd_solve)

    p_rho = sub.add_parser("rho", help="variance-ratio sweep over epsilon")
    p_rho.add_argument("--experiment", type=int, required=True, choices=(1, 2))
    p_rho.add_argument("--epsilons", default=None, help="comma-separated epsilon values")
    p_rho.add_argument("--t0s", default="0,0.25,0.5", help="comma-separated t0 values")
    p_rho.add_argument("--dprimes", default="0,1,2,3", help="comma-separated d' values")
    p_rho.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p_rho.set_defaults(func=_cmd_rho)

    p_star = sub.add_parser("star", help="star-curve smoothing study")
    p_star.add_argument("--variant", required=True, choices=experiments.STAR_VARIANTS)
    p_star.add_argument("--seed", type=int, default=0)
    p_star.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p_star.add_argument("--summary", default=None, help="summary JSON path")
    p_star.set_defaults(func=_cmd_star)

    p_sub = sub.add_parser("subdivide", help="binary refinement of a periodic sequence")
    p_sub.add_argument("--config", required=True, help="JSON config path")
    p_sub.add_argument("--dprime", type=int, default=None, help="override config d'")
    p_sub.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p_sub.set_defaults(func=_cmd_subdivide)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except MvapproxError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
