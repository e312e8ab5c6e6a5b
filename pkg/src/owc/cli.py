"""Command-line front end: ``owc run``, ``owc params``, ``owc selftest``."""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

from .analytics import multihop_distribution
from .config import ConfigError, RunConfig, load_config
from .mcsim import mc_evaluate
from .mellin import MellinError
from .metrics import aber, diversity_order, outage, outage_asymptotic

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_STRICT = 0, 1, 2, 3

COLUMN_ORDER = (
    "op_analytic",
    "op_asymptotic",
    "op_mc_bound",
    "op_mc_exact",
    "op_mc_stderr",
    "aber_analytic",
    "aber_mc_bound",
    "aber_mc_exact",
    "aber_mc_stderr",
    "diversity_order",
)

NUMERIC_ERRORS = (MellinError, ArithmeticError, ValueError, FloatingPointError)


def metric_columns(metrics) -> list[str]:
    cols = set()
    if "op" in metrics:
        cols.add("op_analytic")
    if "asymptote" in metrics:
        cols |= {"op_asymptotic", "diversity_order"}
    if "mc" in metrics:
        cols |= {"op_mc_bound", "op_mc_exact", "op_mc_stderr"}
        if "aber" in metrics:
            cols |= {"aber_mc_bound", "aber_mc_exact", "aber_mc_stderr"}
    if "aber" in metrics:
        cols.add("aber_analytic")
    return [c for c in COLUMN_ORDER if c in cols]


def sweep_column(cfg: RunConfig) -> str:
    return "power_dbm" if cfg.sweep.variable == "power-dbm" else "hop_count"


def _guard(fn, label, warnings):
    try:
        return fn()
    except NUMERIC_ERRORS as exc:
        warnings.append(f"{label}: {type(exc).__name__}: {exc}")
        return math.nan


def evaluate_point(cfg: RunConfig, x: float):
    """Rows (one per threshold) for sweep value ``x``, plus warnings and notes."""
    warnings: list[str] = []
    notes: list[str] = []
    label = f"{sweep_column(cfg)}={x:g}"
    try:
        spec = cfg.spec_at(x)
        dist = multihop_distribution(spec)
    except NUMERIC_ERRORS as exc:
        warnings.append(f"{label}: {exc}")
        return [{"_th": th} for th in cfg.thresholds_db], warnings, notes
    thresholds = [10.0 ** (db / 10.0) for db in cfg.thresholds_db]
    m = cfg.metrics
    report = None
    if "mc" in m:
        report = mc_evaluate(spec, cfg.mc, thresholds=thresholds, mod=cfg.modulation if "aber" in m else None)
        if report.violations:
            warnings.append(f"{label}: {report.violations} samples with amgm bound below the exact SNR")
    aber_val = _guard(lambda: aber(dist, cfg.modulation).value, f"{label} aber", warnings) if "aber" in m else None
    rows = []
    for db, th in zip(cfg.thresholds_db, thresholds):
        row = {"_th": db}
        if "op" in m:
            row["op_analytic"] = _guard(lambda: outage(dist, th).value, f"{label} op", warnings)
        if "asymptote" in m:

            def asym():
                r = outage_asymptotic(dist, th)
                if not r.valid:
                    notes.append(f"{label} gamma_th={db:g} dB: asymptote outside validity gate")
                    return math.nan
                return r.value

            row["op_asymptotic"] = _guard(asym, f"{label} asymptote", warnings)
            row["diversity_order"] = diversity_order(spec)
        if report is not None:
            row["op_mc_bound"] = report.op(th, "bound").mean
            row["op_mc_exact"] = report.op(th, "exact").mean
            row["op_mc_stderr"] = report.op(th, "bound").stderr
            if "aber" in m:
                row["aber_mc_bound"] = report.aber("bound").mean
                row["aber_mc_exact"] = report.aber("exact").mean
                row["aber_mc_stderr"] = report.aber("bound").stderr
        if aber_val is not None:
            row["aber_analytic"] = aber_val
        rows.append(row)
    return rows, warnings, notes


def fmt(v: float) -> str:
    return "nan" if v is None or (isinstance(v, float) and math.isnan(v)) else f"{float(v):.9e}"


def run(cfg: RunConfig, out_path: str, workers: int | None = None):
    points = cfg.sweep.points()
    workers = workers or min(len(points), os.cpu_count() or 1)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(lambda x: evaluate_point(cfg, x), points))
    else:
        results = [evaluate_point(cfg, x) for x in points]
    cols = metric_columns(cfg.metrics)
    header = [sweep_column(cfg), "gamma_th_db"] + cols
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    warnings, notes = [], []
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for x, (rows, warn, note) in zip(points, results):
            warnings += warn
            notes += note
            for row in rows:
                w.writerow([fmt(x), fmt(row["_th"])] + [fmt(row.get(c, math.nan)) for c in cols])
    return len(points), warnings, notes


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        if args.seed is not None or args.samples is not None:
            mc = cfg.mc
            mc = replace(mc, seed=args.seed if args.seed is not None else mc.seed, samples=args.samples or mc.samples)
            cfg = replace(cfg, mc=mc)
    except (ConfigError, ValueError) as exc:
        print(f"owc: {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or cfg.output
    n, warnings, notes = run(cfg, out)
    for msg in warnings:
        print(f"warning: {msg}", file=sys.stderr)
    for msg in notes:
        print(f"note: {msg}")
    print(f"wrote {n} sweep points x {len(cfg.thresholds_db)} thresholds to {out}")
    if warnings:
        print(f"{len(warnings)} point(s) failed and were written as nan", file=sys.stderr)
        if args.strict:
            return EXIT_STRICT
    return EXIT_OK


def cmd_params(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"owc: {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    x = cfg.sweep.points()[0]
    spec = cfg.spec_at(x)
    print(f"# {sweep_column(cfg)} = {x:g}, N = {spec.N}, bound = {spec.bound_variant}")
    for i, (p, c, ph, ps) in enumerate(zip(spec.params, spec.gains, spec.phi, spec.psi), start=1):
        print(f"[hop {i}]")
        for key, val in asdict(p).items():
            print(f"  {key:<10} = {val}")
        print(f"  {'rho2':<10} = {p.rho2}")
        print(f"  {'K':<10} = {p.K}")
        print(f"  {'C':<10} = {c}")
        print(f"  {'phi':<10} = {ph}")
        print(f"  {'psi':<10} = {ps}")
        print(f"  {'DO':<10} = {diversity_order(p)}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .validation import run_selftest

    ok = run_selftest(args.level)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="owc", description="Outage and error-rate analysis of multihop optical wireless links.")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute a sweep and write CSV")
    r.add_argument("config", help="TOML run configuration")
    r.add_argument("--strict", action="store_true", help="exit 3 if any sweep point fails")
    r.add_argument("--seed", type=int, help="override mc.seed")
    r.add_argument("--samples", type=int, help="override mc.samples")
    r.add_argument("--out", help="override output.path")
    r.set_defaults(func=cmd_run)

    p = sub.add_parser("params", help="print derived per-hop parameters")
    p.add_argument("config")
    p.set_defaults(func=cmd_params)

    s = sub.add_parser("selftest", help="run the oracle and agreement suites")
    s.add_argument("--level", choices=("quick", "full"), default="quick")
    s.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
