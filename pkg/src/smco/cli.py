"""Command-line interface: ``run``, ``list`` and ``hjb``.

Exit status is 2 for bad arguments, 1 for runtime failures and 0 otherwise.
Payloads (CSV/JSON/grid dumps) go to ``--out`` or stdout; timings and other
diagnostics go to stderr so that repeated invocations produce identical
payloads.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from .algorithms import SmcoConfig
from .baselines import BaselineConfig
from .bench import ExperimentSpec, run_experiment
from .core import Box
from .registry import algorithm_names, problem_names

logger = logging.getLogger("smco")

WORKERS_ENV = "SMCO_WORKERS"


class UsageError(Exception):
    """Bad user input detected after argument parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _default_workers():
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise UsageError(f"{WORKERS_ENV} must be >= 1")
    return value


def build_parser():
    parser = _Parser(prog="smco-bench", description="Strategic Monte Carlo optimization benchmarks")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    run = sub.add_parser("run", help="run a replicated experiment")
    run.add_argument("--config", help="file of key=value lines mirroring these flags")
    run.add_argument("--fn", help="problem name (see `list`)")
    run.add_argument("--dim", type=int, default=2)
    run.add_argument("--direction", choices=["min", "max"], default="min")
    run.add_argument("--algo", action="append", help="algorithm name; repeat for several")
    run.add_argument("--starts", type=int, default=1)
    run.add_argument("--start-mode", choices=["uniform", "diagonal"], default="uniform")
    run.add_argument("--reps", type=int, default=1)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--max-iter", type=int, help="iteration cap for every algorithm")
    run.add_argument("--tol", type=float, help="stopping tolerance for every algorithm")
    run.add_argument("--buffer", type=float, help="buffer fraction of the box width")
    run.add_argument("--transform", choices=["none", "full"], default="none")
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--out", help="output path (default: stdout)")
    run.add_argument("--format", choices=["csv", "json"], default="json")
    run.add_argument("--timing", action="store_true",
                     help="include wall times in the payload (makes it non-reproducible)")

    sub.add_parser("list", help="list problems and algorithms")

    hjb = sub.add_parser("hjb", help="solve the 1-D HJB equation and dump the grid")
    hjb.add_argument("--target", type=float, default=0.0,
                     help="peak of the quadratic payoff -(x - target)**2")
    hjb.add_argument("--bounds", type=float, nargs=2, default=[-1.0, 1.0], metavar=("LO", "HI"))
    hjb.add_argument("--eps", type=float, default=0.05)
    hjb.add_argument("--nodes", type=int, default=401)
    hjb.add_argument("--out", help="output path for the t,x,u table (default: stdout)")
    return parser


_RUN_KEYS = {
    "fn", "dim", "direction", "algo", "starts", "start_mode", "reps", "seed", "max_iter",
    "tol", "buffer", "transform", "workers", "out", "format", "timing",
}


def read_config(path):
    """Parse ``key=value`` lines; ``#`` starts a comment, ``algo`` may be comma-separated."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _RUN_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def _config_args(path):
    """Turn a config file into argv tokens so argparse types and choices apply."""
    argv = []
    for key, value in read_config(path).items():
        flag = "--" + key.replace("_", "-")
        if key == "timing":
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append(flag)
            elif value.lower() not in ("0", "false", "no", "off"):
                raise UsageError(f"timing must be a boolean, got {value!r}")
        elif key == "algo":
            for name in value.split(","):
                argv += [flag, name.strip()]
        else:
            argv += [flag, value]
    return argv


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run" and args.config:
        # config values first, so explicit flags parsed later override them
        base = parser.parse_args(["run"] + _config_args(args.config))
        explicit = parser.parse_args(argv)
        defaults = parser.parse_args(["run"])
        for key, value in vars(explicit).items():
            if value != getattr(defaults, key):
                setattr(base, key, value)
        args = base
    return args


def _spec_from_args(args):
    if not args.fn:
        raise UsageError("run: --fn is required")
    smco_changes, base_changes = {}, {}
    if args.max_iter is not None:
        smco_changes["max_iter"] = args.max_iter
        for name in ("gd", "signgd", "spsa"):
            base_changes[f"{name}_max_iter"] = args.max_iter
    if args.tol is not None:
        smco_changes["tol"] = args.tol
        for name in ("gd", "signgd", "spsa"):
            base_changes[f"{name}_tol"] = args.tol
    if args.buffer is not None:
        smco_changes["buffer_fraction"] = args.buffer
        base_changes["buffer_fraction"] = args.buffer
    workers = args.workers if args.workers is not None else _default_workers()
    try:
        return ExperimentSpec(
            problem=args.fn, dim=args.dim, direction=args.direction,
            algorithms=args.algo or ["smco-r"], starts=args.starts,
            start_mode=args.start_mode, reps=args.reps, seed=args.seed,
            transform=args.transform, smco=SmcoConfig(**smco_changes),
            baseline=BaselineConfig(**base_changes), workers=workers,
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"run: {exc}") from None


def _write(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_run(args):
    spec = _spec_from_args(args)
    report = run_experiment(spec)
    if args.format == "json":
        payload = report.to_json(include_time=args.timing)
    else:
        payload = report.to_csv(include_time=args.timing)
    _write(payload, args.out)
    for name, m in report.algorithms.items():
        print(f"{name}: mean time {m.mean_time_s:.3f}s over {spec.reps} reps", file=sys.stderr)
    return 0


def _cmd_list(args):
    lines = ["problems:"] + [f"  {p}" for p in problem_names()]
    lines += ["algorithms:"] + [f"  {a}" for a in algorithm_names()]
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _cmd_hjb(args):
    from .hjb import solve_for_box

    lo, hi = args.bounds
    try:
        box = Box([lo], [hi])
    except ValueError as exc:
        raise UsageError(f"hjb: {exc}") from None
    if args.eps <= 0 or args.nodes < 3:
        raise UsageError("hjb: --eps must be positive and --nodes at least 3")
    target = args.target
    grid = solve_for_box(lambda x: -(x - target) ** 2, box, args.eps, n_nodes=args.nodes)
    if args.out:
        grid.dump(args.out)
    else:
        grid.dump(sys.stdout)
    center = float(np.clip(target, lo, hi))
    print(f"u(0, {center:g}) = {grid.value(0.0, center):.6g}; "
          f"{grid.t.size} time levels, {grid.x.size} nodes", file=sys.stderr)
    return 0


def cli_main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.command is None:
            raise UsageError("a subcommand is required: run, list or hjb")
        handler = {"run": _cmd_run, "list": _cmd_list, "hjb": _cmd_hjb}[args.command]
        return handler(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else 0
    except Exception as exc:  # noqa: BLE001 - surfaced as exit status 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli_main())


__all__ = ["build_parser", "cli_main", "main", "read_config"]
