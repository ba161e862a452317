"""Replication harness and summary metrics.

Errors are measured against the best value found by any algorithm in any
replication, not against the analytic optimum, which is reported separately
when it is known.
"""

from __future__ import annotations

import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_int
from .algorithms import SmcoConfig
from .baselines import BaselineConfig
from .core import MAXIMIZE, MINIMIZE, RngStream, _check_direction
from .multistart import START_STREAM, StartPlan, gen_starts, multistart_run
from .randomfns import (
    ew_objective,
    gen_ew_data,
    gen_ms_data,
    ms_box,
    ms_objective,
)
from .registry import RANDOM_PROBLEMS, algorithm_stream, get_algorithm
from .testfns import KNOWN_MAXIMUM, KNOWN_MINIMUM, NamedTestFn, available, transform_problem

TRANSFORMS = ("none", "full")
PERCENTILES = (50, 95, 99)
CSV_COLUMNS = ("problem", "algo", "rep", "value", "abs_err", "time_s")

# substreams of the master seed; replication r uses substream r
DATA_STREAM = 2**31 - 2
# substreams of a replication's stream
TRANSFORM_STREAM = 2**31 - 3
ALGO_STREAM_BASE = 1000


@dataclass
class ExperimentSpec:
    problem: str
    dim: int = 2
    direction: str = MINIMIZE
    algorithms: list = field(default_factory=lambda: ["smco-r"])
    starts: int = 1
    start_mode: str = "uniform"
    reps: int = 1
    seed: int = 0
    transform: str = "none"
    smco: SmcoConfig = None
    baseline: BaselineConfig = None
    workers: int = 1
    # sample size of the ms/ew datasets; None keeps each generator's default
    data_n: int = None

    def __post_init__(self):
        self.problem = str(self.problem).lower()
        if self.problem not in available() and self.problem not in RANDOM_PROBLEMS:
            raise KeyError(f"unknown problem {self.problem!r}")
        check_int(self.dim, "dim", minimum=1)
        self.direction = _check_direction(self.direction)
        if isinstance(self.algorithms, str):
            self.algorithms = [self.algorithms]
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        self.algorithms = [str(a).lower() for a in self.algorithms]
        for name in self.algorithms:
            get_algorithm(name)
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ValueError("algorithms must not repeat")
        check_int(self.starts, "starts", minimum=1)
        StartPlan(self.start_mode, self.starts)
        check_int(self.reps, "reps", minimum=1)
        check_int(self.seed, "seed")
        if self.transform not in TRANSFORMS:
            raise ValueError(f"transform must be one of {TRANSFORMS}, got {self.transform!r}")
        if self.transform != "none" and self.problem in RANDOM_PROBLEMS:
            raise ValueError("domain transforms apply to test functions only")
        check_int(self.workers, "workers", minimum=1)
        self.smco = self.smco or SmcoConfig()
        self.baseline = self.baseline or BaselineConfig()

    def known_optimum(self):
        if self.transform != "none":
            return None
        table = KNOWN_MINIMUM if self.direction == MINIMIZE else KNOWN_MAXIMUM
        return table.get(self.problem)


@dataclass
class RunRow:
    rep: int
    algo: str
    value: float
    x0: np.ndarray
    time_s: float = float("nan")
    abs_err: float = float("nan")


@dataclass
class AlgoMetrics:
    rmse: float
    ae: dict
    values: list
    errors: list
    mean_time_s: float = float("nan")

    @property
    def ae50(self):
        return self.ae[50]

    @property
    def ae95(self):
        return self.ae[95]

    @property
    def ae99(self):
        return self.ae[99]


@dataclass
class BenchReport:
    direction: str
    best_value: float
    algorithms: dict
    spec: ExperimentSpec = None
    rows: list = field(default_factory=list)

    def to_dict(self, include_time=False):
        out = {
            "best_value": self.best_value,
            "direction": self.direction,
            "algorithms": {},
        }
        if self.spec is not None:
            s = self.spec
            out.update(problem=s.problem, dim=s.dim, transform=s.transform, reps=s.reps,
                       starts=s.starts, start_mode=s.start_mode, seed=s.seed,
                       known_optimum=s.known_optimum())
        for name, m in self.algorithms.items():
            entry = {"rmse": m.rmse, "values": m.values}
            entry.update({f"ae{p}": v for p, v in m.ae.items()})
            if include_time:
                entry["mean_time_s"] = m.mean_time_s
            out["algorithms"][name] = entry
        return out

    def to_json(self, include_time=False):
        return json.dumps(self.to_dict(include_time), indent=2, sort_keys=True) + "\n"

    def to_csv(self, include_time=False):
        problem = self.spec.problem if self.spec is not None else ""
        buf = io.StringIO()
        buf.write(",".join(CSV_COLUMNS) + "\n")
        for row in self.rows:
            t = repr(row.time_s) if include_time else ""
            buf.write(f"{problem},{row.algo},{row.rep},{row.value!r},{row.abs_err!r},{t}\n")
        return buf.getvalue()


def percentile(errors, q):
    """Inverted-empirical-CDF percentile, averaging where the CDF is flat.

    At an exact rank boundary (``q * n / 100`` an integer ``k``) this is the
    mean of the ``k``-th and ``k+1``-th smallest values, so the 50th
    percentile of ``{0, 2}`` is 1; otherwise it is the nearest-rank value.
    """
    return float(np.percentile(np.asarray(errors, dtype=float), q,
                               method="averaged_inverted_cdf"))


def compute_metrics(values, direction, best_value=None, times=None):
    """Summarize ``values`` (``{algorithm: [value per replication]}``).

    ``best_value`` defaults to the best entry over all algorithms and
    replications.
    """
    direction = _check_direction(direction)
    if not values or any(len(v) == 0 for v in values.values()):
        raise ValueError("values must be a nonempty mapping of nonempty lists")
    pooled = np.concatenate([np.asarray(v, dtype=float) for v in values.values()])
    if best_value is None:
        best_value = float(pooled.max() if direction == MAXIMIZE else pooled.min())
    metrics = {}
    for name, vals in values.items():
        vals = [float(v) for v in vals]
        errors = [abs(v - best_value) for v in vals]
        rmse = math.sqrt(sum(e * e for e in errors) / len(errors))
        ae = {p: percentile(errors, p) for p in PERCENTILES}
        mean_time = float(np.mean(times[name])) if times and name in times else float("nan")
        metrics[name] = AlgoMetrics(rmse, ae, vals, errors, mean_time)
    return BenchReport(direction, float(best_value), metrics)


def _fixed_dataset(spec, master):
    rng = master.substream(DATA_STREAM)
    kwargs = {} if spec.data_n is None else {"n": spec.data_n}
    if spec.problem == "ms":
        return gen_ms_data(spec.dim, seed=rng, **kwargs)
    if spec.problem == "ew":
        return gen_ew_data(spec.dim, seed=rng, **kwargs)
    return None


def build_problem(spec, rep_rng, data=None):
    """Objective and box for one replication."""
    if spec.problem == "ms":
        obj = ms_objective(data)
    elif spec.problem == "ew":
        obj = ew_objective(data)
    else:
        fn = NamedTestFn(spec.problem, spec.dim)
        if spec.transform == "full":
            return transform_problem(fn, rep_rng.substream(TRANSFORM_STREAM), spec.direction)
        return fn.objective(spec.direction), fn.default_box()
    if spec.direction == MINIMIZE:
        obj.direction = MINIMIZE
    return obj, ms_box(spec.dim)


def _config_for(name, spec):
    return spec.smco if name.startswith("smco") else spec.baseline


def run_replication(spec, rep, master, data=None):
    """Run every algorithm of ``spec`` once from a shared start set."""
    rep_rng = master.substream(rep)
    obj, box = build_problem(spec, rep_rng, data)
    plan = StartPlan(spec.start_mode, spec.starts, rep_rng.substream(START_STREAM))
    starts = gen_starts(plan, box)
    rows = []
    for name in spec.algorithms:
        algo_rng = rep_rng.substream(ALGO_STREAM_BASE + algorithm_stream(name))
        t0 = time.perf_counter()
        result = multistart_run(obj, box, name, cfg=_config_for(name, spec),
                                rng=algo_rng, starts=starts)
        elapsed = time.perf_counter() - t0
        rows.append(RunRow(rep, name, float(result.returned_value), starts.copy(), elapsed))
    return rows


def run_experiment(spec):
    """Run all replications and summarize them in a :class:`BenchReport`.

    The report (apart from timings) depends only on ``spec``; in particular
    it does not depend on ``spec.workers``.
    """
    master = RngStream(spec.seed)
    data = _fixed_dataset(spec, master)
    if spec.workers == 1 or spec.reps == 1:
        per_rep = [run_replication(spec, r, master, data) for r in range(spec.reps)]
    else:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            per_rep = list(pool.map(lambda r: run_replication(spec, r, master, data),
                                    range(spec.reps)))
    rows = [row for rep_rows in per_rep for row in rep_rows]
    values = {name: [] for name in spec.algorithms}
    times = {name: [] for name in spec.algorithms}
    for row in rows:
        values[row.algo].append(row.value)
        times[row.algo].append(row.time_s)
    report = compute_metrics(values, spec.direction, times=times)
    for row in rows:
        row.abs_err = abs(row.value - report.best_value)
    report.spec = spec
    report.rows = rows
    return report


__all__ = [
    "AlgoMetrics",
    "BenchReport",
    "CSV_COLUMNS",
    "ExperimentSpec",
    "RunRow",
    "build_problem",
    "compute_metrics",
    "percentile",
    "run_experiment",
    "run_replication",
]
