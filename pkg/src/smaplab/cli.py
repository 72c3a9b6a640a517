"""Command-line interface: table builds, experiment runs, norm reports.

Exit codes: 0 success, 2 configuration error (bad flags, missing table or
input file), 3 numerical failure (smallness violations, non-contraction,
inconsistent fields).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
import yaml

from .errors import ParameterError, SmapError
from .experiments import (
    ExperimentSpec,
    load_field,
    norms_report,
    run_instability,
    run_linear_decay,
    run_stability,
    write_spectrum_csv,
    write_summary,
)
from .grid import make_log_grid
from .spectral import build_eigenbasis, load_table, save_table, validate_table

DEFAULT_CACHE = Path("tables")
GRID_DEFAULTS = {"r_min": 1e-4, "r_max": 1e4, "n": 4096}


def _table_path(cache_dir: Path, grid) -> Path:
    return cache_dir / f"eigentable_{grid.fingerprint()}.npz"


def _load_table_or_exit(args) -> tuple:
    grid = make_log_grid(args.r_min, args.r_max, args.n)
    path = _table_path(Path(args.cache_dir), grid)
    if not path.exists():
        print(
            f"error: no eigenfunction table at {path}; run `smaplab table build` "
            "with the same grid parameters first",
            file=sys.stderr,
        )
        raise SystemExit(2)
    return grid, load_table(path, grid=grid)


def _add_grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r-min", type=float, default=GRID_DEFAULTS["r_min"])
    p.add_argument("--r-max", type=float, default=GRID_DEFAULTS["r_max"])
    p.add_argument("--n", type=int, default=GRID_DEFAULTS["n"])
    p.add_argument("--cache-dir", default=str(DEFAULT_CACHE))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="smaplab",
        description="Numerical laboratory for near-soliton equivariant "
        "Schrodinger maps",
    )
    sub = p.add_subparsers(dest="command", required=True)

    p_table = sub.add_parser("table", help="eigenfunction table operations")
    sub_table = p_table.add_subparsers(dest="table_command", required=True)
    p_build = sub_table.add_parser("build", help="build and cache the table")
    _add_grid_args(p_build)
    p_build.add_argument("--band-lo", type=int, default=-10)
    p_build.add_argument("--band-hi", type=int, default=6)
    p_build.add_argument("--per-band", type=int, default=64)

    p_run = sub.add_parser("run", help="run an experiment")
    p_run.add_argument(
        "kind", choices=["stability", "instability", "linear-decay"]
    )
    _add_grid_args(p_run)
    p_run.add_argument("--config", help="YAML file with ExperimentSpec keys")
    p_run.add_argument("--eps", type=float)
    p_run.add_argument("--gamma", type=float)
    p_run.add_argument("--alpha0", type=float)
    p_run.add_argument("--lam0", type=float)
    p_run.add_argument("--dt", type=float)
    p_run.add_argument("--t-end", type=float)
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--refresh-every", type=int)
    p_run.add_argument("--monitor-every", type=int)
    p_run.add_argument("--out", default="out")

    p_norms = sub.add_parser("norms", help="dyadic norms of a stored field")
    p_norms.add_argument("field_file")
    _add_grid_args(p_norms)
    return p


def _spec_from_args(args) -> ExperimentSpec:
    base: dict = {}
    if args.config:
        cfg_path = Path(args.config)
        if not cfg_path.exists():
            print(f"error: config file {cfg_path} not found", file=sys.stderr)
            raise SystemExit(2)
        with open(cfg_path) as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, dict):
            print("error: config file must hold a mapping", file=sys.stderr)
            raise SystemExit(2)
        base.update(loaded)
    base["kind"] = args.kind
    overrides = {
        "eps": args.eps,
        "gamma": args.gamma,
        "alpha0": args.alpha0,
        "lam0": args.lam0,
        "dt": args.dt,
        "t_end": args.t_end,
        "seed": args.seed,
        "refresh_every": args.refresh_every,
        "monitor_every": args.monitor_every,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    defaults = {
        "stability": {"gamma": 0.01, "dt": 2e-3, "t_end": 100.0},
        "instability": {"gamma": 0.1, "dt": 5e-3, "t_end": 1000.0},
        "linear-decay": {"gamma": 1.0, "t_end": 100.0},
    }[args.kind]
    for k, v in defaults.items():
        base.setdefault(k, v)
    try:
        return ExperimentSpec(**base)
    except (TypeError, ParameterError) as exc:
        print(f"error: bad experiment configuration: {exc}", file=sys.stderr)
        raise SystemExit(2)


def cmd_table_build(args) -> int:
    grid = make_log_grid(args.r_min, args.r_max, args.n)
    cache = Path(args.cache_dir)
    cache.mkdir(parents=True, exist_ok=True)
    table = build_eigenbasis(
        grid, band_lo=args.band_lo, band_hi=args.band_hi, per_band=args.per_band
    )
    residuals = validate_table(table)
    path = _table_path(cache, grid)
    save_table(table, path)
    print(f"table written to {path}")
    print(
        "residuals: eigen_h={eigen_h:.2e} conjugation={conjugation:.2e} "
        "eigen_ht={eigen_ht:.2e}".format(**residuals)
    )
    return 0


def cmd_run(args) -> int:
    spec = _spec_from_args(args)
    grid, table = _load_table_or_exit(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    runner = {
        "stability": run_stability,
        "instability": run_instability,
        "linear-decay": run_linear_decay,
    }[spec.kind]
    traj, summary = runner(spec, table)
    traj.to_csv(out_dir / "trajectory.csv")
    write_summary(out_dir / "summary.json", summary)
    write_spectrum_csv(out_dir / "spectrum.csv", table, traj)
    print(f"wrote {out_dir}/trajectory.csv, summary.json, spectrum.csv")
    return 0


def cmd_norms(args) -> int:
    field_path = Path(args.field_file)
    if not field_path.exists():
        print(f"error: field file {field_path} not found", file=sys.stderr)
        raise SystemExit(2)
    kind, values, (r_min, r_max, n) = load_field(field_path)
    ns = argparse.Namespace(
        r_min=r_min, r_max=r_max, n=n, cache_dir=args.cache_dir
    )
    grid, table = _load_table_or_exit(ns)
    report = norms_report(table, kind, values)
    import json

    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "table":
            return cmd_table_build(args)
        if args.command == "run":
            return cmd_run(args)
        if args.command == "norms":
            return cmd_norms(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SmapError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 2


if __name__ == "__main__":
    sys.exit(main())
