"""Command-line surface: experiment dispatch, flags, and exit codes.

Exit codes: 0 success, 1 usage error, 2 runtime failure.  The default seed
is fixed (not wall clock) so casual runs are reproducible; rerunning with
identical arguments produces byte-identical outputs.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .dataio import emit_report, parse_contingency_csv, write_density_grid_csv
from .experiments import (
    contraction_curve,
    run_contingency,
    run_gaussian_demo,
    run_sphere_demo,
    run_stiefel_demo,
)
from .samplers import RngStream

__all__ = ["ExperimentConfig", "main", "entry"]

DEFAULT_SEED = 20210617
COMMANDS = ("gaussian-demo", "contingency", "sphere-demo", "stiefel-demo", "contraction")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        raise _UsageError(message)


@dataclass
class ExperimentConfig:
    command: str
    seed: int = DEFAULT_SEED
    samples: int = 10000
    level: float = 0.95
    out: str = "report.json"
    input: str | None = None
    theta0: list[float] = field(default_factory=lambda: [-0.5, 0.0, 0.5])
    alpha: float = 1.0
    n_values: list[int] = field(default_factory=lambda: [10, 100, 1000])
    big_m: float = 3.0
    replicates: int = 20
    p: int = 2
    m: int = 2

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.samples < 100:
            raise ValueError("--samples must be at least 100")
        if not 0.5 < self.level < 1.0:
            raise ValueError("--level must lie in (0.5, 1)")
        if self.seed < 0:
            raise ValueError("--seed must be nonnegative")

    def asdict(self) -> dict:
        return {
            "command": self.command,
            "seed": self.seed,
            "samples": self.samples,
            "level": self.level,
            "out": self.out,
            "input": self.input,
            "theta0": self.theta0,
            "alpha": self.alpha,
            "n_values": self.n_values,
            "big_m": self.big_m,
            "replicates": self.replicates,
            "p": self.p,
            "m": self.m,
        }


def _build_parser() -> _Parser:
    parser = _Parser(prog="postproj", description=__doc__)
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        cmd = sub.add_parser(name, add_help=True)
        cmd.add_argument("--seed", type=int, default=DEFAULT_SEED)
        cmd.add_argument("--samples", type=int, default=10000, help="posterior draws per batch")
        cmd.add_argument("--level", type=float, default=0.95, help="credible-interval level")
        cmd.add_argument("--out", type=str, default="report.json")
        if name == "gaussian-demo":
            cmd.add_argument("--theta0", type=float, action="append", help="true mean; repeatable")
        if name == "contingency":
            cmd.add_argument("--input", type=str, required=True, help="CSV of cell counts")
            cmd.add_argument("--alpha", type=float, default=1.0, help="Dirichlet concentration")
        if name == "contraction":
            cmd.add_argument("--n", type=int, action="append", dest="n_values", help="sample size; repeatable")
            cmd.add_argument("--big-m", type=float, default=3.0, dest="big_m", help="ball radius multiplier")
            cmd.add_argument("--replicates", type=int, default=20)
        if name == "stiefel-demo":
            cmd.add_argument("--p", type=int, default=2, help="frame columns")
            cmd.add_argument("--m", type=int, default=2, help="ambient rows")
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    kwargs = {"command": args.command, "seed": args.seed, "samples": args.samples,
              "level": args.level, "out": args.out}
    if getattr(args, "input", None) is not None:
        kwargs["input"] = args.input
    if getattr(args, "theta0", None):
        kwargs["theta0"] = args.theta0
    if getattr(args, "alpha", None) is not None:
        kwargs["alpha"] = args.alpha
    if getattr(args, "n_values", None):
        kwargs["n_values"] = args.n_values
    if getattr(args, "big_m", None) is not None:
        kwargs["big_m"] = args.big_m
    if getattr(args, "replicates", None) is not None:
        kwargs["replicates"] = args.replicates
    if getattr(args, "p", None) is not None:
        kwargs["p"] = args.p
    if getattr(args, "m", None) is not None:
        kwargs["m"] = args.m
    return ExperimentConfig(**kwargs)


def _run(config: ExperimentConfig) -> dict:
    stream = RngStream(seed=config.seed)
    out_path = Path(config.out)
    if config.command == "gaussian-demo":
        report, grids = run_gaussian_demo(
            config.theta0, stream, n_draws=config.samples, level=config.level
        )
        grid_files = {}
        for key, grid in sorted(grids.items()):
            safe = key.replace("=", "_")
            grid_path = out_path.with_name(f"{out_path.stem}_{safe}.csv")
            write_density_grid_csv(grid, grid_path)
            grid_files[key] = grid_path.name
        results = {"report": report, "grid_files": grid_files}
    elif config.command == "contingency":
        table = parse_contingency_csv(config.input)
        results = {"report": run_contingency(
            table, stream, alpha=config.alpha, n_draws=config.samples, level=config.level
        )}
    elif config.command == "sphere-demo":
        results = {"report": run_sphere_demo(stream, n_draws=config.samples, level=config.level)}
    elif config.command == "stiefel-demo":
        results = {"report": run_stiefel_demo(stream, p=config.p, m=config.m)}
    elif config.command == "contraction":
        results = {"report": contraction_curve(
            "gaussian",
            0.0,
            config.n_values,
            config.big_m,
            config.replicates,
            stream,
            draws_per_replicate=config.samples,
        )}
    else:  # pragma: no cover - guarded by ExperimentConfig
        raise ValueError(f"unknown command {config.command!r}")
    return {"command": config.command, "seed": config.seed,
            "config": config.asdict(), "results": results}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        config = _config_from_args(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit:
        # argparse exits directly for --help; treat as success
        return 0
    try:
        document = _run(config)
        emit_report(document, config.out)
    except Exception as exc:  # runtime failures exit 2 with context
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {config.out}")
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
