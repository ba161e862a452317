"""Starting-point generation and multi-start orchestration."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_int
from .core import Box, as_rng

logger = logging.getLogger(__name__)

UNIFORM = "uniform"
DIAGONAL = "diagonal"
# substream reserved for drawing start points; per-start runs use 0, 1, ...
START_STREAM = 2**31 - 1


@dataclass
class StartPlan:
    mode: str = UNIFORM
    count: int = 1
    rng: object = None

    def __post_init__(self):
        self.mode = str(self.mode).lower()
        if self.mode not in (UNIFORM, DIAGONAL):
            raise ValueError(f"mode must be 'uniform' or 'diagonal', got {self.mode!r}")
        check_int(self.count, "count", minimum=1)


def gen_starts(plan, box):
    """Return ``plan.count`` starting points in ``box`` as an ``(m, d)`` array.

    Diagonal plans space the points evenly from the lower corner to the upper
    corner (the box center when ``m == 1``) and ignore the random stream.
    """
    m = plan.count
    if plan.mode == DIAGONAL:
        if m == 1:
            return box.center[None, :].copy()
        t = np.linspace(0.0, 1.0, m)[:, None]
        return box.lower + t * box.width
    rng = as_rng(plan.rng)
    return rng.uniform(box.lower, box.upper, size=(m, box.dim))


def default_start_count(d, regime="low"):
    """``round(10 sqrt(d))`` starts in low dimension, ``round(sqrt(d))`` in high."""
    check_int(d, "d", minimum=1)
    regime = str(regime).lower()
    if regime in ("low", "lowdim"):
        return max(1, round(10 * math.sqrt(d)))
    if regime in ("high", "highdim"):
        return max(1, round(math.sqrt(d)))
    raise ValueError(f"regime must be 'low' or 'high', got {regime!r}")


@dataclass
class StartFailure:
    index: int
    error: BaseException


@dataclass
class MultistartResult:
    """Best run over all starts plus the per-start outcomes.

    ``records[i]`` is either a :class:`~smco.core.RunRecord` or a
    :class:`StartFailure` for start ``i``.
    """

    best: object
    best_index: int
    records: list = field(default_factory=list)
    starts: np.ndarray = None

    @property
    def failures(self):
        return [r for r in self.records if isinstance(r, StartFailure)]

    @property
    def returned_value(self):
        """Best ``final_value`` over successful starts (what the algorithm reports)."""
        ok = [r for r in self.records if not isinstance(r, StartFailure)]
        values = [r.final_value for r in ok]
        return max(values) if ok[0].direction == "max" else min(values)


def multistart_run(obj, box, algo, plan=None, cfg=None, rng=None, workers=1, starts=None):
    """Run ``algo`` from every start and keep the best record.

    ``algo`` is a registry name (see :func:`smco.registry.get_algorithm`) or
    a callable with the signature of :func:`smco.algorithms.smco_run`.
    Start ``i`` uses random substream ``i`` of ``rng``, so the result does
    not depend on ``workers``.  Ties on ``best_value`` go to the lowest index.
    """
    from .registry import get_algorithm

    if not isinstance(box, Box):
        box = Box(box)
    run = get_algorithm(algo) if isinstance(algo, str) else algo
    check_int(workers, "workers", minimum=1)
    rng = as_rng(rng)
    if starts is None:
        plan = plan or StartPlan(UNIFORM, 1)
        if plan.rng is None:
            plan = StartPlan(plan.mode, plan.count, rng.substream(START_STREAM))
        starts = gen_starts(plan, box)
    starts = np.atleast_2d(np.asarray(starts, dtype=float))

    def task(i):
        try:
            return run(obj, box, starts[i], cfg, rng.substream(i))
        except Exception as exc:  # noqa: BLE001 - reported per start
            logger.warning("start %d failed: %s", i, exc)
            return StartFailure(i, exc)

    if workers == 1 or len(starts) == 1:
        records = [task(i) for i in range(len(starts))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(task, range(len(starts))))

    best, best_index = None, -1
    for i, rec in enumerate(records):
        if isinstance(rec, StartFailure):
            continue
        if best is None or rec.better(rec.best_value, best.best_value):
            best, best_index = rec, i
    if best is None:
        raise RuntimeError(
            f"all {len(records)} starts failed; first error: {records[0].error!r}"
        )
    return MultistartResult(best, best_index, records, starts)


__all__ = [
    "DIAGONAL",
    "MultistartResult",
    "StartFailure",
    "StartPlan",
    "UNIFORM",
    "default_start_count",
    "gen_starts",
    "multistart_run",
]
