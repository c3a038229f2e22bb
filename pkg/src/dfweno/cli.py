"""Command line front end: run, converge, and sweep subcommands.

Exit code 0 on success, 2 on a failed or invalid run, so shell scripts
can branch on survival.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .cases import get_case
from .config import load_config
from .driver import (
    convergence_study,
    max_mach_sweep,
    run,
    write_convergence_csv,
    write_sweep_csv,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dfweno",
        description="Finite-volume Euler solver with hybrid "
                    "feedback/WENO-AO reconstruction.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="advance one case to its horizon")
    p.add_argument("config", help="path to a key = value config file")
    p.add_argument("--out", help="override the output directory")

    p = sub.add_parser("converge", help="error norms over a mesh sequence")
    p.add_argument("config")
    p.add_argument("--meshes", required=True,
                   help="comma-separated cell counts, e.g. 20,40,80,160")
    p.add_argument("--out", help="override the output directory")

    p = sub.add_parser("sweep", help="bisect for the maximum Mach number")
    p.add_argument("config")
    p.add_argument("--param", required=True, choices=("p0", "v0", "p_side"),
                   help="case parameter swept via its Mach map")
    p.add_argument("--lo", type=float, required=True,
                   help="Mach number expected to survive")
    p.add_argument("--hi", type=float, required=True,
                   help="Mach number expected to fail")
    p.add_argument("--resolution", type=float, default=0.1)
    p.add_argument("--out", help="override the output directory")
    return parser


def _load(args):
    config = load_config(args.config)
    if args.out:
        config = config.with_overrides(out_dir=args.out)
    return config


def _cmd_run(args) -> int:
    config = _load(args)
    result = run(config)
    if result.ok:
        print(f"completed {result.steps} steps to t = {result.t:.6g}")
        return 0
    print(f"FAILED after {result.steps} completed steps: {result.reason}",
          file=sys.stderr)
    return 2


def _cmd_converge(args) -> int:
    config = _load(args)
    sizes = [int(tok) for tok in args.meshes.split(",") if tok.strip()]
    if not sizes:
        raise ValueError("--meshes must list at least one size")
    rows = convergence_study(config, sizes)
    header = f"{'N':>6} {'L1':>13} {'ord':>6} {'L2':>13} {'ord':>6} " \
             f"{'Linf':>13} {'ord':>6}"
    print(header)
    for r in rows:
        def o(v):
            return f"{v:6.2f}" if v is not None else " " * 6
        print(f"{r.n:>6} {r.l1:13.6e} {o(r.l1_order)} {r.l2:13.6e} "
              f"{o(r.l2_order)} {r.linf:13.6e} {o(r.linf_order)}")
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_convergence_csv(rows, out_dir / "converge.csv")
    return 0


def _cmd_sweep(args) -> int:
    config = _load(args)
    spec = get_case(config.case)
    if spec.sweep_param != args.param:
        raise ValueError(
            f"case {spec.name!r} sweeps {spec.sweep_param!r}, "
            f"not {args.param!r}")
    outcome = max_mach_sweep(config, args.lo, args.hi, args.resolution)
    for value, flag in outcome.evaluations:
        print(f"Ma = {value:g}: {'survived' if flag else 'failed'}")
    if outcome.status == "ok":
        print(f"max Mach = {outcome.max_mach:g}")
    else:
        print(f"inconclusive ({outcome.status}) at boundary "
              f"Ma = {outcome.boundary:g}")
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(outcome, out_dir / "sweep.csv")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "converge": _cmd_converge,
               "sweep": _cmd_sweep}[args.command]
    try:
        return handler(args)
    except (OSError, ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
