"""Strategic Monte Carlo optimization: the two-armed sampler and its variants.

Each coordinate owns two reward distributions, one centered on the upper
bound of the box and one on the lower bound.  At every iteration the sign of
a finite difference of the objective at the current running mean decides
which arm to pull; the running mean of the pulled rewards is the iterate.

Three drivers are provided:

* :func:`smco_run` -- the plain recursion.
* :func:`smco_r_run` -- two stages (global then boosted local) plus a
  running maximum over every evaluation.
* :func:`smco_br_run` -- two passes of :func:`smco_r_run`, the second pass
  boosted again and started from the first pass's best point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_int, check_open_interval, check_positive, check_vector
from .core import (
    Box,
    BufferedBox,
    EvalTracker,
    Objective,
    Segment,
    as_rng,
    clamp_to_box,
    make_record,
)


@dataclass
class SmcoConfig:
    """Hyperparameters shared by the three SMCO drivers.

    ``boost_n0`` is the starting iteration counter of plain SMCO (and of
    stage one of SMCO-R); ``stage2_counter`` is the counter stage two of
    SMCO-R restarts from; ``br_counter`` is the extra counter SMCO-BR adds
    to both stages of its second pass.
    """

    buffer_fraction: float = 0.05
    tol: float = 1e-6
    max_iter: int = 500
    boost_n0: int = 0
    stage_split: float = 0.5
    stage2_counter: int = 1000
    br_counter: int = 100

    def __post_init__(self):
        check_open_interval(self.buffer_fraction, "buffer_fraction", 0.0, 0.5)
        check_positive(self.tol, "tol")
        check_int(self.max_iter, "max_iter", minimum=1)
        check_int(self.boost_n0, "boost_n0")
        check_open_interval(self.stage_split, "stage_split", 0.0, 1.0, include_high=True)
        check_int(self.stage2_counter, "stage2_counter")
        check_int(self.br_counter, "br_counter")

    def replace(self, **changes):
        params = dict(self.__dict__)
        params.update(changes)
        return SmcoConfig(**params)


class ArmPair:
    """Per-coordinate high/low arms with uniform noise on ``[-delta_j, delta_j]``.

    A high-arm draw for coordinate ``j`` is ``high[j] + xi`` and a low-arm
    draw is ``low[j] + xi'``; the noise has mean zero and variance
    ``delta_j**2 / 3``.
    """

    def __init__(self, high, low, delta, rng):
        self.high = check_vector(high, "high")
        self.low = check_vector(low, "low", dim=self.high.size)
        delta = np.broadcast_to(np.asarray(delta, dtype=float), self.high.shape).copy()
        if np.any(delta < 0) or not np.all(np.isfinite(delta)):
            raise ValueError("delta must be finite and nonnegative")
        self.delta = delta
        self.rng = as_rng(rng)

    @classmethod
    def from_box(cls, box, buffer_fraction, rng):
        return cls(box.upper, box.lower, buffer_fraction * box.width, rng)

    @property
    def dim(self):
        return self.high.size

    @property
    def noise_variance(self):
        return self.delta**2 / 3.0

    @property
    def reach(self):
        """Largest absolute coordinate any draw can take, over all coordinates."""
        return float(
            np.max(np.maximum(np.abs(self.high), np.abs(self.low)) + self.delta)
        )

    def draw(self, signs):
        signs = np.asarray(signs, dtype=bool)
        if signs.shape != (self.dim,):
            raise ValueError(f"signs must have length {self.dim}")
        u = self.rng.random(self.dim)
        noise = self.delta * (2.0 * u - 1.0)
        return np.where(signs, self.high, self.low) + noise


def draw_reward(arms, signs):
    """Pull the high arm where ``signs`` is true and the low arm elsewhere."""
    return arms.draw(signs)


def _fd_diff(tracker, x, n, box, lower, upper):
    d = x.size
    h = box.width / (n + 1.0)
    probes = np.tile(x, (2 * d, 1))
    idx = np.arange(d)
    probes[idx, idx] += h
    probes[d + idx, idx] -= h
    np.clip(probes, lower, upper, out=probes)
    values = tracker.values(probes)
    with np.errstate(invalid="ignore"):
        return values[:d] - values[d:]


def _fd_sign(tracker, x, n, box, lower, upper):
    # NaN compares false, so undefined differences pick the low arm
    return _fd_diff(tracker, x, n, box, lower, upper) >= 0


def fd_sign(obj, x, n, box, buffer_fraction=0.05):
    """Signs of the step-adaptive central differences of ``obj`` at ``x``.

    Component ``j`` is true iff ``f(x + h e_j) - f(x - h e_j) >= 0`` with
    ``h = (upper_j - lower_j) / (n + 1)``, ``f`` taken in maximization form.
    Probes are clipped to the buffered box.  Uses exactly ``2 d``
    evaluations.
    """
    tracker = obj if isinstance(obj, EvalTracker) else EvalTracker(obj)
    x = check_vector(x, "x", dim=box.dim)
    extended = BufferedBox(box, buffer_fraction)
    return _fd_sign(tracker, x, n, box, extended.lower, extended.upper)


def strategic_recursion(tracker, box, arms, x0, max_iter, tol, boost_n0=0,
                        buffer_fraction=None, record=False):
    """Run the sign-strategy recursion from ``x0``.

    With counter ``n0 = max(boost_n0, 1)`` the running sum starts at
    ``n0 * x0`` and the ``k``-th iterate is ``S_k / (n0 + k)``, so the first
    iterate is ``x0`` itself and a boost of 1000 gives
    ``(1000 x0 + Z_1) / 1001``.  Finite-difference steps use the boosted
    counter ``k + boost_n0``.

    The run stops once the iterate's value changes by at most ``tol`` and
    every probe difference taken at the previous iterate is also within
    ``tol``.  On a piecewise-constant objective an unchanged value alone
    does not mean the search has settled.

    Returns ``(x, fx, iterations, converged, segment)`` with ``fx`` in
    maximization form; ``segment`` is ``None`` unless ``record`` is set.
    """
    if buffer_fraction is None:
        margin = arms.delta
    else:
        margin = buffer_fraction * box.width
    lower, upper = box.lower - margin, box.upper + margin

    n0 = max(int(boost_n0), 1)
    x = np.array(x0, dtype=float)
    total = n0 * x
    fx = tracker.value(x)
    points = [x.copy()] if record else None
    divisors = [n0] if record else None
    converged = False
    iterations = 0
    for k in range(max_iter):
        diff = _fd_diff(tracker, x, k + boost_n0, box, lower, upper)
        total += arms.draw(diff >= 0)
        divisor = n0 + k + 1
        x_new = total / divisor
        f_new = tracker.value(x_new)
        iterations = k + 1
        if record:
            points.append(x_new.copy())
            divisors.append(divisor)
        step = abs(f_new - fx)
        x, fx = x_new, f_new
        if step <= tol and np.all(np.abs(diff) <= tol):
            converged = True
            break
    segment = None
    if record:
        segment = Segment(np.array(points), np.array(divisors), int(boost_n0))
    return x, fx, iterations, converged, segment


def _prepare(obj, box, x0, rng):
    if not isinstance(obj, Objective):
        raise TypeError("obj must be an Objective")
    if not isinstance(box, Box):
        box = Box(box)
    if obj.dim != box.dim:
        raise ValueError(f"objective has dimension {obj.dim} but the box has {box.dim}")
    rng = as_rng(rng)
    if x0 is None:
        x0 = rng.substream(0x5EED).uniform(box.lower, box.upper)
    x0 = check_vector(x0, "x0")
    if x0.size != box.dim:
        raise ValueError(f"x0 has length {x0.size} but the box has dimension {box.dim}")
    return box, clamp_to_box(x0, box), rng


def smco_run(obj, box, x0=None, cfg=None, rng=None, record_trajectory=False):
    """Plain SMCO from a single starting point.

    Stops when two consecutive iterate values differ by at most ``cfg.tol``
    and the probes around the iterate are equally flat, or after
    ``cfg.max_iter`` iterations.  ``final_*`` is the last iterate;
    ``best_*`` is the running best over every evaluation, probes included.
    """
    cfg = cfg or SmcoConfig()
    box, x0, rng = _prepare(obj, box, x0, rng)
    tracker = EvalTracker(obj)
    arms = ArmPair.from_box(box, cfg.buffer_fraction, rng)
    x, fx, it, conv, seg = strategic_recursion(
        tracker, box, arms, x0, cfg.max_iter, cfg.tol, cfg.boost_n0,
        cfg.buffer_fraction, record_trajectory,
    )
    return make_record(tracker, x, fx, it, conv, "smco", x0,
                       [seg] if record_trajectory else None)


def _smco_r(tracker, box, arms, x0, cfg, max_iter, extra_boost, record, segments):
    split = int(np.floor(cfg.stage_split * max_iter))
    x1, _, it1, conv1, seg = strategic_recursion(
        tracker, box, arms, x0, split, cfg.tol, cfg.boost_n0 + extra_boost,
        cfg.buffer_fraction, record,
    )
    if record:
        segments.append(seg)
    x2, _, it2, conv2, seg = strategic_recursion(
        tracker, box, arms, x1, max_iter - it1, cfg.tol,
        cfg.stage2_counter + extra_boost, cfg.buffer_fraction, record,
    )
    if record:
        segments.append(seg)
    return it1 + it2, conv2


def smco_r_run(obj, box, x0=None, cfg=None, rng=None, record_trajectory=False):
    """SMCO-R: a global stage, a boosted local stage, and a running maximum.

    Stage one runs ``floor(stage_split * max_iter)`` iterations; stage two
    restarts from stage one's last iterate with counter ``stage2_counter``
    and the rest of the budget.  The returned final point is the best point
    evaluated in either stage.
    """
    cfg = cfg or SmcoConfig()
    box, x0, rng = _prepare(obj, box, x0, rng)
    tracker = EvalTracker(obj)
    arms = ArmPair.from_box(box, cfg.buffer_fraction, rng)
    segments = [] if record_trajectory else None
    it, conv = _smco_r(tracker, box, arms, x0, cfg, cfg.max_iter, 0,
                       record_trajectory, segments)
    return make_record(tracker, tracker.best_point, tracker.best_value, it, conv,
                       "smco-r", x0, segments)


def smco_br_run(obj, box, x0=None, cfg=None, rng=None, record_trajectory=False):
    """SMCO-BR: two half-budget passes of SMCO-R.

    The second pass starts from the first pass's best point (clipped to the
    box) and adds ``br_counter`` to the iteration counter of both of its
    stages.
    """
    cfg = cfg or SmcoConfig()
    box, x0, rng = _prepare(obj, box, x0, rng)
    tracker = EvalTracker(obj)
    arms = ArmPair.from_box(box, cfg.buffer_fraction, rng)
    segments = [] if record_trajectory else None
    half = cfg.max_iter // 2
    it1, _ = _smco_r(tracker, box, arms, x0, cfg, cfg.max_iter - half, 0,
                     record_trajectory, segments)
    restart = np.clip(tracker.best_point, box.lower, box.upper)
    it2, conv = _smco_r(tracker, box, arms, restart, cfg, half, cfg.br_counter,
                        record_trajectory, segments)
    return make_record(tracker, tracker.best_point, tracker.best_value, it1 + it2,
                       conv, "smco-br", x0, segments)


__all__ = [
    "ArmPair",
    "SmcoConfig",
    "draw_reward",
    "fd_sign",
    "smco_br_run",
    "smco_r_run",
    "smco_run",
    "strategic_recursion",
]
