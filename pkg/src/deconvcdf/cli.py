"""Command-line interface.

Five commands cover the package workflows:

- ``estimate``: all three estimators plus an interval at one point
- ``simulate``: Monte Carlo tables and the coverage experiment
- ``calibrate``: re-derive the tuning-constant rule by simulation
- ``infer``: prevalence report from repeated-measurement data
- ``sensitivity``: the same report across plausible error variances

Inputs are numeric CSV files (an optional header row is allowed);
outputs are CSV tables and JSON documents plus a ``manifest.json``
recording the resolved parameters, so any stochastic run can be
reproduced bit for bit from its manifest.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .bandwidth import (
    CalibrationConfig,
    adaptive_estimate,
    calibrate_tuning_constant,
)
from .error_models import parse_error_model, preset_model
from .exceptions import DeconvError, EmptyFile, ParseError, RaggedRows
from .inference import (
    confidence_interval,
    repeated_measures_stats,
    sensitivity_scan,
    variance_of_error_variance,
)
from .simex import SimexConfig, ecdf, simex_estimate
from .simlab import (
    DESK_MC,
    DESK_SIMEX_B,
    FULL_MC,
    FULL_SIMEX_B,
    bp_scenario,
    coverage_experiment,
    run_scenario,
    scenario_catalogue,
    table_scenarios,
)

DESK_COVERAGE_MC = 500
FULL_COVERAGE_MC = 1000


def _numeric_row(fields):
    try:
        return [float(f) for f in fields]
    except ValueError:
        return None


def read_single_column(path):
    """Read a one-column numeric CSV sample.

    An optional header row is skipped; any other non-numeric entry
    raises :class:`ParseError` with its 1-based row number.
    """
    rows = _read_rows(path)
    values = []
    for number, fields in rows:
        if len(fields) != 1:
            raise ParseError(number, f"expected a single column, got {len(fields)}")
        parsed = _numeric_row(fields)
        if parsed is None:
            raise ParseError(number, f"non-numeric value {fields[0]!r}")
        values.append(parsed[0])
    return np.array(values)


def read_matrix(path):
    """Read a numeric CSV matrix with a fixed number of columns."""
    rows = _read_rows(path)
    width = len(rows[0][1])
    out = []
    for number, fields in rows:
        if len(fields) != width:
            raise RaggedRows(number, f"expected {width} columns, got {len(fields)}")
        parsed = _numeric_row(fields)
        if parsed is None:
            raise ParseError(number, f"non-numeric value in {fields!r}")
        out.append(parsed)
    return np.array(out)


def _read_rows(path):
    """CSV rows as (1-based row number, fields), header skipped, blanks dropped."""
    with open(path, newline="", encoding="utf-8") as handle:
        raw = [
            (number, fields)
            for number, fields in enumerate(csv.reader(handle), start=1)
            if fields and any(f.strip() for f in fields)
        ]
    if raw and _numeric_row(raw[0][1]) is None and all(
        not f.replace(".", "").replace("-", "").isdigit() for f in raw[0][1]
    ):
        raw = raw[1:]
    if not raw:
        raise EmptyFile(f"{path} contains no data rows")
    return raw


def read_config(path):
    """Flat ``key = value`` settings file; '#' starts a comment."""
    settings = {}
    for number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        key, sep, value = text.partition("=")
        if not sep:
            raise ParseError(number, f"expected key=value, got {text!r}")
        settings[key.strip().replace("-", "_")] = value.strip()
    return settings


_CASTERS = {
    "seed": int,
    "mc": int,
    "simex_b": int,
    "grid_size": int,
    "level": float,
    "x0": float,
    "threshold": float,
    "error": str,
    "input": str,
    "out": str,
    "scenario": lambda v: v.split(),
    "table": str,
    "full_scale": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "sensitivity": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "curve": int,
}


def apply_config(args):
    """Fill arguments not given on the command line from the config file."""
    if not getattr(args, "config", None):
        return
    for key, value in read_config(args.config).items():
        if key not in _CASTERS or not hasattr(args, key):
            raise ValueError(f"unknown config key {key!r}")
        if getattr(args, key) is None:
            setattr(args, key, _CASTERS[key](value))


def _require_seed(args):
    if args.seed is None:
        raise ValueError("a --seed is required; stochastic runs have no default")


def _write_json(path, payload):
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_manifest(out_dir, command, parameters, outputs):
    _write_json(
        out_dir / "manifest.json",
        {
            "command": command,
            "package": {"deconvcdf": __version__},
            "versions": {"numpy": np.__version__, "scipy": scipy.__version__},
            "parameters": parameters,
            "outputs": sorted(outputs),
        },
    )


def _out_dir(args):
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_estimate(args):
    apply_config(args)
    _require_seed(args)
    if args.level is None:
        args.level = 0.95
    if args.simex_b is None:
        args.simex_b = FULL_SIMEX_B if args.full_scale else DESK_SIMEX_B
    sample = read_single_column(args.input)
    model = parse_error_model(args.error)
    out = _out_dir(args)
    adaptive = adaptive_estimate(sample, model, args.x0)
    naive = ecdf(sample, args.x0)
    simex = simex_estimate(
        sample, model, args.x0, SimexConfig(b_pseudo=args.simex_b, seed=args.seed)
    )
    ci = confidence_interval(
        sample, model, args.x0, args.level, adaptive=adaptive.value
    )
    payload = {
        "n": int(sample.size),
        "x0": args.x0,
        "error": model.spec_string(),
        "seed": args.seed,
        "naive": naive,
        "adaptive": {
            "value": adaptive.value,
            "raw_value": adaptive.raw_value,
            "cutoff": adaptive.lam,
            "sigma_lambda": adaptive.sigma_lambda,
        },
        "simex": {"value": simex.value, "clipped": simex.clipped},
        "interval": {
            "lower": ci.lower,
            "upper": ci.upper,
            "level": ci.level,
            "center": ci.center,
            "half_width": ci.half_width,
        },
    }
    _write_json(out / "estimate.json", payload)
    outputs = ["estimate.json"]
    if args.curve:
        grid = np.linspace(sample.min(), sample.max(), args.curve)
        rows = [
            (
                repr(float(x)),
                repr(ecdf(sample, float(x))),
                repr(adaptive_estimate(sample, model, float(x)).value),
            )
            for x in grid
        ]
        _write_csv(out / "curve.csv", ["x", "naive", "adaptive"], rows)
        outputs.append("curve.csv")
    _write_manifest(
        out,
        "estimate",
        {
            "input": str(args.input),
            "error": model.spec_string(),
            "x0": args.x0,
            "seed": args.seed,
            "level": args.level,
            "simex_b": args.simex_b,
            "curve": args.curve,
        },
        outputs,
    )
    print(
        f"n={sample.size}  naive={naive:.4f}  adaptive={adaptive.value:.4f} "
        f"(cutoff {adaptive.lam:.2f})  simex={simex.clipped:.4f}  "
        f"{args.level:.0%} interval [{ci.lower:.4f}, {ci.upper:.4f}]"
    )


def _scenario_rows(results):
    header = [
        "scenario", "x_dist", "error", "n", "estimator",
        "prob", "x0", "rmse", "bias_x10",
    ]
    rows = []
    for result in results:
        for record in result.table_rows():
            rows.append([repr(v) if isinstance(v, float) else v for v in
                         (record[key] for key in header)])
    return header, rows


def cmd_simulate(args):
    apply_config(args)
    _require_seed(args)
    if args.level is None:
        args.level = 0.95
    mc_default = FULL_MC if args.full_scale else DESK_MC
    simex_b = args.simex_b or (FULL_SIMEX_B if args.full_scale else DESK_SIMEX_B)
    out = _out_dir(args)
    catalogue = scenario_catalogue()
    catalogue["bp-repeated"] = bp_scenario(repeats=2)
    catalogue["bp-known"] = bp_scenario(repeats=1)
    if args.table == "coverage":
        mc = args.mc or (FULL_COVERAGE_MC if args.full_scale else DESK_COVERAGE_MC)
        result = coverage_experiment(bp_scenario(repeats=1), args.level, mc, args.seed)
        header = [
            "scenario", "level", "prob", "x0",
            "coverage", "mean_width", "mean_lower", "mean_upper",
        ]
        rows = [
            [repr(v) if isinstance(v, float) else v for v in
             (record[key] for key in header)]
            for record in result.table_rows()
        ]
        _write_csv(out / "coverage.csv", header, rows)
        outputs = ["coverage.csv"]
        parameters = {
            "table": "coverage", "mc": mc, "seed": args.seed, "level": args.level,
        }
    else:
        if args.table:
            specs = table_scenarios(args.table)
            csv_name = f"table{args.table}.csv"
        elif args.scenario:
            unknown = [name for name in args.scenario if name not in catalogue]
            if unknown:
                known = "\n  ".join(sorted(catalogue))
                raise ValueError(
                    f"unknown scenario(s) {', '.join(unknown)}; valid names:\n  {known}"
                )
            specs = [catalogue[name] for name in args.scenario]
            csv_name = "scenarios.csv"
        else:
            raise ValueError("pass --table or at least one --scenario")
        mc = args.mc or mc_default
        results = [
            run_scenario(spec, mc, args.seed, simex_b=simex_b) for spec in specs
        ]
        header, rows = _scenario_rows(results)
        _write_csv(out / csv_name, header, rows)
        outputs = [csv_name]
        parameters = {
            "table": args.table,
            "scenario": args.scenario,
            "mc": mc,
            "simex_b": simex_b,
            "seed": args.seed,
        }
    _write_manifest(out, "simulate", parameters, outputs)
    for name in outputs:
        print(out / name)


def cmd_calibrate(args):
    apply_config(args)
    _require_seed(args)
    cfg = CalibrationConfig.full_scale() if args.full_scale else CalibrationConfig()
    out = _out_dir(args)
    result = calibrate_tuning_constant(cfg, args.seed)
    _write_csv(
        out / "calibration.csv",
        ["sigma_eps", "c_bar"],
        [
            (repr(float(s)), repr(float(c)))
            for s, c in zip(result.sigma_eps, result.c_bar)
        ],
    )
    _write_json(
        out / "rule.json",
        {"intercept": result.intercept, "slope": result.slope},
    )
    _write_manifest(
        out,
        "calibrate",
        {
            "seed": args.seed,
            "full_scale": bool(args.full_scale),
            "n": cfg.n,
            "mc_inner": cfg.mc_inner,
            "mc_outer": cfg.mc_outer,
        },
        ["calibration.csv", "rule.json"],
    )
    print(
        f"tuning rule: K(sigma) = {result.intercept:.4f} + {result.slope:.4f}*sigma"
    )


_INFER_FAMILIES = ("normal", "laplace", "gamma", "gamma0")


def _infer_report(matrix, threshold, family, level, seed, simex_b):
    stats = repeated_measures_stats(matrix)
    model = preset_model(family, stats.averaged_error_std)
    adaptive = adaptive_estimate(stats.averaged, model, threshold)
    naive = ecdf(stats.averaged, threshold)
    simex = simex_estimate(
        stats.averaged, model, threshold,
        SimexConfig(b_pseudo=simex_b, seed=seed),
    )
    ci = confidence_interval(
        stats.averaged, model, threshold, level, adaptive=adaptive.value
    )
    variance_se = math.sqrt(
        variance_of_error_variance(stats.error_variance, stats.n, stats.p)
    )
    return stats, {
        "threshold": threshold,
        "n": stats.n,
        "p": stats.p,
        "error_family": family,
        "error_variance": stats.error_variance,
        "error_variance_se": variance_se,
        "signal_mean": stats.signal_mean,
        "signal_variance": stats.signal_variance,
        "seed": seed,
        "cdf": {
            "naive": naive,
            "adaptive": adaptive.value,
            "simex": simex.clipped,
            "interval": {"lower": ci.lower, "upper": ci.upper, "level": level},
        },
        "prevalence": {
            "naive": 1.0 - naive,
            "adaptive": 1.0 - adaptive.value,
            "simex": 1.0 - simex.clipped,
            "interval": {
                "lower": 1.0 - ci.upper,
                "upper": 1.0 - ci.lower,
                "level": level,
            },
        },
    }


def cmd_infer(args):
    apply_config(args)
    _require_seed(args)
    if args.level is None:
        args.level = 0.95
    family = (args.error or "normal").strip().lower()
    if family not in _INFER_FAMILIES:
        raise ValueError(
            f"--error must name a family ({', '.join(_INFER_FAMILIES)}); "
            "its scale is estimated from the repeated measurements"
        )
    simex_b = args.simex_b or (FULL_SIMEX_B if args.full_scale else DESK_SIMEX_B)
    matrix = read_matrix(args.input)
    out = _out_dir(args)
    stats, payload = _infer_report(
        matrix, args.threshold, family, args.level, args.seed, simex_b
    )
    _write_json(out / "infer.json", payload)
    outputs = ["infer.json"]
    if args.sensitivity:
        rows = sensitivity_scan(matrix, args.threshold, args.level)
        _write_csv(
            out / "sensitivity.csv",
            ["error_variance", "estimate", "lower", "upper",
             "prevalence", "prevalence_lower", "prevalence_upper"],
            [
                (
                    repr(r.error_variance), repr(r.estimate),
                    repr(r.lower), repr(r.upper),
                    repr(1.0 - r.estimate), repr(1.0 - r.upper), repr(1.0 - r.lower),
                )
                for r in rows
            ],
        )
        outputs.append("sensitivity.csv")
    _write_manifest(
        out,
        "infer",
        {
            "input": str(args.input),
            "threshold": args.threshold,
            "error": family,
            "level": args.level,
            "seed": args.seed,
            "simex_b": simex_b,
            "sensitivity": bool(args.sensitivity),
        },
        outputs,
    )
    prev = payload["prevalence"]
    print(
        f"n={stats.n} p={stats.p}  prevalence above {args.threshold:g}: "
        f"naive={prev['naive']:.3f}  adaptive={prev['adaptive']:.3f}  "
        f"interval [{prev['interval']['lower']:.3f}, {prev['interval']['upper']:.3f}]"
    )


def cmd_sensitivity(args):
    apply_config(args)
    if args.level is None:
        args.level = 0.95
    if args.grid_size is None:
        args.grid_size = 10
    matrix = read_matrix(args.input)
    out = _out_dir(args)
    rows = sensitivity_scan(matrix, args.threshold, args.level, size=args.grid_size)
    _write_csv(
        out / "sensitivity.csv",
        ["error_variance", "estimate", "lower", "upper",
         "prevalence", "prevalence_lower", "prevalence_upper"],
        [
            (
                repr(r.error_variance), repr(r.estimate),
                repr(r.lower), repr(r.upper),
                repr(1.0 - r.estimate), repr(1.0 - r.upper), repr(1.0 - r.lower),
            )
            for r in rows
        ],
    )
    _write_manifest(
        out,
        "sensitivity",
        {
            "input": str(args.input),
            "threshold": args.threshold,
            "level": args.level,
            "grid_size": args.grid_size,
        },
        ["sensitivity.csv"],
    )
    print(out / "sensitivity.csv")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="deconvcdf",
        description="CDF estimation from error-contaminated samples",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seeded=True):
        p.add_argument("--config", help="flat key=value settings file")
        p.add_argument("--out", help="output directory (default: current)")
        if seeded:
            p.add_argument("--seed", type=int, help="master seed (required)")
        p.add_argument(
            "--full-scale", action="store_true", dest="full_scale",
            help="use full-size Monte Carlo settings",
        )

    p = sub.add_parser("estimate", help="estimate F_X at one point")
    common(p)
    p.add_argument("--input", required=True, help="single-column numeric CSV")
    p.add_argument("--error", required=True,
                   help="error model, e.g. normal:sigma=0.5 or identity")
    p.add_argument("--x0", type=float, required=True, help="evaluation point")
    p.add_argument("--level", type=float, help="confidence level (default 0.95)")
    p.add_argument("--simex-b", type=int, dest="simex_b",
                   help="SIMEX pseudo replications")
    p.add_argument("--curve", type=int,
                   help="also write curve.csv with this many grid points")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="run Monte Carlo scenarios")
    common(p)
    p.add_argument("--table", help="1-5 or 'coverage'")
    p.add_argument("--scenario", nargs="+", help="scenario names")
    p.add_argument("--mc", type=int, help="replicates per scenario")
    p.add_argument("--simex-b", type=int, dest="simex_b")
    p.add_argument("--level", type=float, help="level for the coverage table")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="re-derive the tuning-constant rule")
    common(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("infer", help="prevalence report from repeated measurements")
    common(p)
    p.add_argument("--input", required=True, help="n-by-p numeric CSV (p >= 2)")
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--error", help="error family for the averaged data "
                                   "(normal, laplace, gamma, gamma0)")
    p.add_argument("--level", type=float)
    p.add_argument("--simex-b", type=int, dest="simex_b")
    p.add_argument("--sensitivity", action="store_true",
                   help="also write the sensitivity table")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("sensitivity", help="estimates across error variances")
    common(p, seeded=False)
    p.add_argument("--input", required=True, help="n-by-p numeric CSV (p >= 2)")
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--level", type=float)
    p.add_argument("--grid-size", type=int, dest="grid_size")
    p.set_defaults(func=cmd_sensitivity)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (DeconvError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
