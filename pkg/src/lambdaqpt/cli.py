"""Command-line entry point: ``lambdaqpt <subcommand> [options]``."""

from __future__ import annotations

import argparse
import sys

from pydantic import ValidationError

from . import meanfield, scan
from .checks import run_checks
from .config import RunConfig

SUBCOMMANDS = ("meanfield", "scan", "entropy-sweep", "compare", "simplex", "check")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration (unknown keys rejected)")
    p.add_argument("--na", type=int, help="number of atoms N_a")
    p.add_argument("--preset", choices=("fig2", "text-s2"), help="frequency preset (default fig2)")
    p.add_argument("--grid", action="append", metavar="LO:HI:STEP",
                   help="axis range; first use sets x13, second x23 (one use sets both)")
    p.add_argument("--method", choices=scan.METHODS)
    p.add_argument("--methods", help="comma-separated methods for entropy-sweep/simplex")
    p.add_argument("--sector", choices=scan.SECTOR_POLICIES)
    p.add_argument("--dx", type=float, help="susceptibility step (default 1e-3)")
    p.add_argument("--tol", type=float, help="cutoff convergence tolerance (default 1e-8)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--svg", action="store_true", default=None, help="also write an SVG figure")
    p.add_argument("--threads", type=int, help="worker processes")
    p.add_argument("--x13", help="entropy-sweep: comma-separated x13 values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lambdaqpt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "meanfield": "ground regions on a grid plus separatrix curves",
        "scan": "fidelity-susceptibility scan of the coupling plane",
        "entropy-sweep": "entropies and susceptibility along x23 at fixed x13",
        "compare": "fidelity between SAS and exact matter states",
        "simplex": "one-atom occupation probabilities in the triangle",
        "check": "fast invariant suite",
    }
    for name in SUBCOMMANDS:
        _common(sub.add_parser(name, help=helps[name]))
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    data = RunConfig.load(args.config).model_dump() if args.config else {}
    override = {
        "n_atoms": args.na, "preset": args.preset, "method": args.method, "sector": args.sector,
        "dx": args.dx, "tol": args.tol, "out": args.out, "svg": args.svg, "threads": args.threads,
    }
    data.update({k: v for k, v in override.items() if v is not None})
    if args.grid:
        if len(args.grid) > 2:
            raise ValueError("--grid takes at most two axes")
        if args.command == "entropy-sweep":
            data["x23"] = args.grid[-1]
        else:
            data["x13"] = args.grid[0]
            data["x23"] = args.grid[-1]
    if args.methods:
        data["methods"] = [m.strip() for m in args.methods.split(",") if m.strip()]
    if args.x13:
        data["x13_values"] = [float(v) for v in args.x13.split(",")]
    return RunConfig.model_validate(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        results = run_checks()
        for r in results:
            print(f"{'PASS' if r.ok else 'FAIL'}  {r.name}: {r.detail}")
        return 0 if all(r.ok for r in results) else 1
    try:
        cfg = resolve_config(args)
        params = cfg.params()
    except (ValidationError, ValueError, OSError) as exc:
        print(f"lambdaqpt: configuration error: {exc}", file=sys.stderr)
        return 2

    if args.command == "meanfield":
        table, sep = scan.meanfield_tables(params, cfg.grid("meanfield"), cfg.out, svg=cfg.svg)
        xa, xb = meanfield.triple_point(params)
        print(f"wrote {table} and {sep}; triple point ({xa:.12g}, {xb:.12g})")
        return 0
    if args.command == "scan":
        res = scan.run_scan(params, cfg.grid(), cfg.out, cfg.options(), cfg.svg, cfg.threads)
        extra = f" and {res.ridge_csv}" if res.ridge_csv else ""
    elif args.command == "entropy-sweep":
        res = scan.sweep_entropy(params, cfg.x13_values, cfg.axis("x23"), tuple(cfg.methods or ("sas", "exact")),
                                 cfg.sector, cfg.out, cfg.options(), cfg.svg, cfg.threads)
        extra = ""
    elif args.command == "compare":
        res = scan.compare_sas_exact(params, cfg.grid("sas"), cfg.out, cfg.tol, cfg.svg, cfg.threads)
        extra = ""
    else:
        res = scan.sample_simplex(params, cfg.grid(), tuple(cfg.methods or ("exact", "sas")), cfg.out,
                                  cfg.tol, cfg.svg, cfg.threads)
        counts = ", ".join(f"{k}: {v}" for k, v in res.extra["disk_counts"].items())
        extra = f"; points with 1/2 <= S_L <= 2/3 per method: {counts}"
    failed = sum(1 for r in res.rows if r[-1])
    print(f"wrote {res.csv}{extra} ({len(res.rows)} rows, {failed} failed)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
