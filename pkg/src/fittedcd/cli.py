"""Command-line entry point: ``fittedcd {solve,table,orders,verify}``."""

from __future__ import annotations

import argparse
import logging
import sys

from .linsolve import SolverMethod
from .problem import PROBLEMS
from .runner import FORMATS, CellError, ConfigError, ExperimentConfig, emit, run, write_atomic
from .scheme import SchemeVariant

EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG = 0, 1, 2

MODE_OF = {"solve": "solve", "table": "errors", "orders": "orders", "verify": "verify"}


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fittedcd",
        description="Fitted Petrov-Galerkin schemes for convection-diffusion on Shishkin meshes.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log progress (-vv for debug)")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "solve": "solve one (eps, N) configuration and dump the grid solution",
        "table": "global error table over eps x N",
        "orders": "double-mesh differences and orders over eps x N",
        "verify": "M-matrix and layer-exactness checks",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        # defaults are None so that --config values survive unless overridden
        p.add_argument("--config", help="JSON experiment config; flags override its fields")
        p.add_argument("--problem", choices=sorted(PROBLEMS) + (["all"] if name == "verify" else []))
        p.add_argument("--variant", choices=[v.value for v in SchemeVariant] + (["all"] if name == "verify" else []))
        p.add_argument("--eps-exp", type=_int_list, help="exponents k with eps = 2^-k, e.g. 0,4,8")
        p.add_argument("--n", type=_int_list, help="mesh sizes, e.g. 8,16,32")
        p.add_argument("--bench-n", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--max-sweeps", type=int)
        p.add_argument("--solver", choices=[m.value for m in SolverMethod])
        p.add_argument("--reference", choices=["interpolant", "exact"], help="error reference (table)")
        p.add_argument("--dm-grid", choices=["union", "bench"], help="double-mesh comparison grid (orders)")
        p.add_argument("--format", choices=FORMATS)
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--jobs", type=int, help="worker processes")
    return parser


def config_from_args(args) -> ExperimentConfig:
    data = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = ExperimentConfig.from_json(fh.read()).to_dict()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    data["mode"] = MODE_OF[args.command]
    if args.command == "verify" and not args.config:
        data.update(problem="all", variant="all", eps_exponents=[0, 8, 20], n_values=[8, 32])
    solver = dict(data.get("solver", {}))
    for flag, key in (("tol", "tol"), ("max_sweeps", "max_sweeps"), ("solver", "method")):
        if getattr(args, flag) is not None:
            solver[key] = getattr(args, flag)
    if solver:
        data["solver"] = solver
    overrides = {
        "problem": args.problem,
        "variant": args.variant,
        "eps_exponents": args.eps_exp,
        "n_values": args.n,
        "bench_n": args.bench_n,
        "reference": args.reference,
        "dm_grid": args.dm_grid,
        "output": args.format,
        "parallel": args.jobs,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.command == "solve" and "output" not in data:
        data["output"] = "csv"
    return ExperimentConfig.from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = config_from_args(args)
        result = run(config)
        text = emit(result)
    except (ConfigError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CellError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    if result.failed:
        print("verification failed", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
