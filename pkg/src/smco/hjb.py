"""One-dimensional HJB solver and the PDE-gradient-sign sampling strategy.

Solves, backward in time on ``[0, 1 + eps]``,

    u_t + max_{p in [lo, hi]} p * u_x + (eps**2 / 2) * u_xx = 0,
    u(1 + eps, x) = fhat(x),

with an explicit monotone upwind scheme: the drift term uses the forward
difference for ``p > 0`` and the backward difference for ``p < 0``, and the
maximum is taken over the discrete candidates ``{lo, hi}`` (plus ``0`` when
it lies inside the control interval).  Reflecting (zero-gradient) boundary
conditions close the grid; the extension ``fhat`` is flat there anyway.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_int, check_positive
from .core import Box, EvalTracker, Objective, as_rng, make_record

MAX_TIME_STEPS = 2_000_000


class _Extended:
    def __init__(self, func, lower, upper):
        self.func = func
        self.lower = lower
        self.upper = upper

    def __call__(self, x):
        x = np.clip(np.asarray(x, dtype=float), self.lower, self.upper)
        if isinstance(self.func, Objective):
            # the solver maximizes, so minimization objectives are negated
            values = self.func.eval_batch(x.reshape(-1, 1)).reshape(x.shape)
            return values if self.func.maximize else -values
        return self.func(x)


def extend_function(f, box, margin=None):
    """Extend ``f`` from ``box`` widened by ``margin`` to the whole line.

    Inside the widened interval the extension equals ``f``; outside it is
    constant at the boundary value.  ``margin`` defaults to 5% of the width.
    A plain ``f`` must accept arrays; an :class:`~smco.core.Objective` is
    evaluated in batch and negated if it is a minimization.
    """
    if not isinstance(box, Box):
        box = Box(box)
    if box.dim != 1:
        raise ValueError("extend_function only supports one-dimensional boxes")
    lo, hi = float(box.lower[0]), float(box.upper[0])
    if margin is None:
        margin = 0.05 * (hi - lo)
    check_positive(margin, "margin", strict=False)
    return _Extended(f, lo - margin, hi + margin)


@dataclass
class HjbGrid:
    """Solution on a uniform space-time grid; ``u[m, k]`` is ``u(t[m], x[k])``."""

    t: np.ndarray
    x: np.ndarray
    u: np.ndarray
    eps: float
    ctrl: tuple

    @property
    def dx(self):
        return float(self.x[1] - self.x[0])

    @property
    def dt(self):
        return float(self.t[1] - self.t[0])

    def _locate(self, t, x):
        if not (self.t[0] - 1e-12 <= t <= self.t[-1] + 1e-12):
            raise ValueError(f"t={t} is outside the time grid [{self.t[0]}, {self.t[-1]}]")
        if not (self.x[0] - 1e-12 <= x <= self.x[-1] + 1e-12):
            raise ValueError(f"x={x} is outside the space grid [{self.x[0]}, {self.x[-1]}]")
        m = int(round((t - self.t[0]) / self.dt))
        k = int(round((x - self.x[0]) / self.dx))
        return min(max(m, 0), self.t.size - 1), min(max(k, 0), self.x.size - 1)

    def value(self, t, x):
        m, k = self._locate(t, x)
        return float(self.u[m, k])

    def gradient(self):
        """Centered ``u_x`` at every node (one-sided at the two ends)."""
        return np.gradient(self.u, self.dx, axis=1)

    def dump(self, path_or_buf):
        """Write ``t,x,u`` rows (one per grid node) with a header line."""
        tt, xx = np.meshgrid(self.t, self.x, indexing="ij")
        table = np.column_stack([tt.ravel(), xx.ravel(), self.u.ravel()])
        own = not hasattr(path_or_buf, "write")
        fh = open(path_or_buf, "w", encoding="utf-8") if own else path_or_buf
        try:
            fh.write("t,x,u\n")
            np.savetxt(fh, table, delimiter=",", fmt="%.10g")
        finally:
            if own:
                fh.close()


def stable_time_step(dx, eps, ctrl):
    """Largest time step for which the explicit scheme stays monotone."""
    speed = max(abs(ctrl[0]), abs(ctrl[1]))
    return dx**2 / (eps**2 + dx * speed)


def hjb_solve_1d(fhat, ctrl, eps, x_range, n_nodes=401, dt=None, horizon=None):
    """Solve the HJB equation on ``x_range`` with ``n_nodes`` points.

    ``dt`` defaults to 90% of the monotonicity limit and is shrunk to that
    limit when given larger.  ``horizon`` defaults to ``1 + eps``.
    """
    lo, hi = float(ctrl[0]), float(ctrl[1])
    if lo > hi:
        raise ValueError("ctrl must satisfy lo <= hi")
    eps = check_positive(eps, "eps")
    check_int(n_nodes, "n_nodes", minimum=3)
    a, b = float(x_range[0]), float(x_range[1])
    if not a < b:
        raise ValueError("x_range must be increasing")
    x = np.linspace(a, b, n_nodes)
    dx = x[1] - x[0]
    horizon = 1.0 + eps if horizon is None else check_positive(horizon, "horizon")
    limit = stable_time_step(dx, eps, (lo, hi))
    if dt is None or dt > limit:
        dt = 0.9 * limit
    steps = math.ceil(horizon / dt)
    if steps > MAX_TIME_STEPS:
        raise ValueError(
            f"stable time step {dt:.3g} needs {steps} steps, above the cap {MAX_TIME_STEPS}"
        )
    dt = horizon / steps

    controls = [lo, hi] + ([0.0] if lo < 0.0 < hi else [])
    u = np.empty((steps + 1, n_nodes))
    u[-1] = np.asarray(fhat(x), dtype=float)
    if not np.all(np.isfinite(u[-1])):
        raise ValueError("terminal condition is not finite on the grid")
    diffusion = 0.5 * eps**2 / dx**2
    for m in range(steps, 0, -1):
        cur = u[m]
        padded = np.concatenate([cur[:1], cur, cur[-1:]])
        fwd = (padded[2:] - cur) / dx
        bwd = (cur - padded[:-2]) / dx
        ham = np.max([max(p, 0.0) * fwd + min(p, 0.0) * bwd for p in controls], axis=0)
        lap = padded[2:] - 2.0 * cur + padded[:-2]
        u[m - 1] = cur + dt * (ham + diffusion * lap)
    if not np.all(np.isfinite(u)):
        raise FloatingPointError("HJB solution became non-finite")
    t = np.linspace(0.0, horizon, steps + 1)
    return HjbGrid(t, x, u, eps, (lo, hi))


def default_x_range(box, margin=None, pad=None):
    """Grid interval: the buffered box plus room for the controlled drift."""
    lo, hi = float(box.lower[0]), float(box.upper[0])
    width = hi - lo
    margin = 0.05 * width if margin is None else margin
    pad = 0.25 * width if pad is None else pad
    return lo - margin - pad, hi + margin + pad


def solve_for_box(f, box, eps, n_nodes=401, margin=None, pad=None):
    """Extend ``f`` off ``box`` and solve with the box as control set."""
    if not isinstance(box, Box):
        box = Box(box)
    fhat = extend_function(f, box, margin)
    ctrl = (float(box.lower[0]), float(box.upper[0]))
    return hjb_solve_1d(fhat, ctrl, eps, default_x_range(box, margin, pad), n_nodes)


def pde_strategy_sign(grid, t, x):
    """True iff the centered ``u_x`` at the nearest node is strictly positive."""
    m, k = grid._locate(t, x)
    row = grid.u[m]
    if 0 < k < row.size - 1:
        slope = row[k + 1] - row[k - 1]
    elif k == 0:
        slope = row[1] - row[0]
    else:
        slope = row[-1] - row[-2]
    return bool(slope > 0)


def simulate_pde_strategy(f, box, eps, n, rng=None, grid=None, x0=None,
                          buffer_fraction=0.05, n_nodes=401, arms=None):
    """Drive the two-armed sampler with the PDE-gradient-sign strategy.

    At step ``i`` the high arm is pulled iff ``u_x(i/n, S_{i-1}/n) > 0``,
    with ``S_0 = x0``.  The record's final point is ``S_n / n``.  ``arms``
    overrides the default pair built from ``box``.
    """
    from .algorithms import ArmPair

    if not isinstance(box, Box):
        box = Box(box)
    if box.dim != 1:
        raise ValueError("simulate_pde_strategy only supports d = 1")
    check_int(n, "n", minimum=1)
    rng = as_rng(rng)
    if grid is None:
        grid = solve_for_box(f, box, eps, n_nodes=n_nodes,
                             margin=buffer_fraction * float(box.width[0]))
    if x0 is None:
        x0 = rng.substream(0x5EED).uniform(box.lower, box.upper)
    x0 = np.clip(np.asarray(x0, dtype=float).reshape(1), box.lower, box.upper)
    if arms is None:
        arms = ArmPair.from_box(box, buffer_fraction, rng)

    slope = np.empty_like(grid.u)
    slope[:, 1:-1] = grid.u[:, 2:] - grid.u[:, :-2]
    slope[:, 0] = grid.u[:, 1] - grid.u[:, 0]
    slope[:, -1] = grid.u[:, -1] - grid.u[:, -2]
    high = slope > 0
    x_lo, dx, dt = grid.x[0], grid.dx, grid.dt
    last_m, last_k = grid.t.size - 1, grid.x.size - 1

    total = x0.copy()
    for i in range(1, n + 1):
        pos = total[0] / n
        m = min(int(round((i / n) / dt)), last_m)
        k = int(round((pos - x_lo) / dx))
        if not 0 <= k <= last_k:
            raise ValueError(f"state {pos} left the PDE grid")
        total += arms.draw(high[m, k:k + 1])
    final = total / n

    obj = f if isinstance(f, Objective) else Objective(f, 1)
    tracker = EvalTracker(obj)
    value = tracker.value(final)
    return make_record(tracker, final, value, n, False, "pde-strategy", x0)


__all__ = [
    "HjbGrid",
    "default_x_range",
    "extend_function",
    "hjb_solve_1d",
    "pde_strategy_sign",
    "simulate_pde_strategy",
    "solve_for_box",
    "stable_time_step",
]
