"""Command line driver.

    splinepml solve <config> [--out DIR] [--heavy]
    splinepml sweep <config> --axis {sigma0,width,degree} [--out DIR]

Exit codes: 0 success, 1 configuration error, 2 solver failure.  The
environment variable SPLINEPML_THREADS caps the BLAS thread count (set it
before heavy work starts; determinism of a single run does not depend on
it).
"""

from __future__ import annotations

import argparse
import os
import sys


def _apply_thread_env() -> None:
    n = os.environ.get("SPLINEPML_THREADS")
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, n)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="splinepml", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_solve = sub.add_parser("solve", help="run every (degree, h) pair of a config")
    p_solve.add_argument("config")
    p_solve.add_argument("--out", default="results")
    p_solve.add_argument("--heavy", action="store_true", help="run configs marked heavy")
    p_sweep = sub.add_parser("sweep", help="sweep one parameter axis of a config")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--axis", required=True, choices=("sigma0", "width", "degree"))
    p_sweep.add_argument("--out", default="results")
    return parser


def main(argv=None) -> int:
    _apply_thread_env()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; those are config errors here
        return 0 if exc.code == 0 else 1

    from splinepml.assembly_solver import SolveError
    from splinepml.experiments import ConfigError, parse_config, run, sweep

    try:
        cfg = parse_config(args.config)
        if args.command == "solve":
            run(cfg, args.out, heavy=args.heavy)
        else:
            sweep(cfg, args.axis, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except SolveError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
