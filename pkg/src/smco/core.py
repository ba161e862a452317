"""Domain geometry, objectives, random streams and run bookkeeping.

Every optimizer in the package maximizes.  A minimization problem is turned
into a maximization one at the boundary (:func:`negate_objective` and
:class:`EvalTracker`), and results are mapped back to the caller's direction
when a :class:`RunRecord` is built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._validation import check_bounds, check_open_interval, check_vector

MAXIMIZE = "max"
MINIMIZE = "min"
_DIRECTIONS = {
    "max": MAXIMIZE,
    "maximize": MAXIMIZE,
    "min": MINIMIZE,
    "minimize": MINIMIZE,
}


def _check_direction(direction):
    try:
        return _DIRECTIONS[str(direction).lower()]
    except KeyError:
        raise ValueError(f"direction must be 'max' or 'min', got {direction!r}") from None


class Box:
    """Axis-aligned rectangle ``[lower_1, upper_1] x ... x [lower_d, upper_d]``."""

    def __init__(self, lower, upper=None):
        if upper is None:
            lower, upper = check_bounds(lower)
        lower = check_vector(lower, "lower")
        upper = check_vector(upper, "upper", dim=lower.size)
        if np.any(lower >= upper):
            raise ValueError("every lower bound must be strictly below its upper bound")
        self.lower = lower
        self.upper = upper
        self.lower.flags.writeable = False
        self.upper.flags.writeable = False

    @classmethod
    def cube(cls, low, high, dim):
        return cls(np.full(dim, float(low)), np.full(dim, float(high)))

    @property
    def dim(self):
        return self.lower.size

    @property
    def width(self):
        return self.upper - self.lower

    @property
    def center(self):
        return 0.5 * (self.lower + self.upper)

    def contains(self, x, atol=0.0):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol))

    def buffered(self, buffer_fraction):
        return BufferedBox(self, buffer_fraction)

    def __eq__(self, other):
        if not isinstance(other, Box):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(
            self.upper, other.upper
        )

    def __repr__(self):
        if self.dim <= 4:
            pairs = ", ".join(f"[{lo:g}, {hi:g}]" for lo, hi in zip(self.lower, self.upper))
            return f"Box({pairs})"
        return f"Box(dim={self.dim})"


class BufferedBox:
    """A :class:`Box` widened on each side by ``buffer_fraction`` of its width.

    The widened rectangle is the support of the arm noise and the region the
    running-mean iterate can never leave.
    """

    def __init__(self, box, buffer_fraction):
        if not isinstance(box, Box):
            raise TypeError("box must be a Box")
        # zero is accepted so tests can exercise noiseless arms
        if buffer_fraction != 0:
            check_open_interval(buffer_fraction, "buffer_fraction", 0.0, 0.5)
        self.box = box
        self.buffer_fraction = float(buffer_fraction)
        self.delta = self.buffer_fraction * box.width
        self.lower = box.lower - self.delta
        self.upper = box.upper + self.delta

    @property
    def dim(self):
        return self.box.dim

    @property
    def width(self):
        return self.upper - self.lower

    def clip(self, x):
        return np.clip(x, self.lower, self.upper)

    def contains(self, x, atol=1e-12):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol))


def clamp_to_box(x, box):
    """Project ``x`` coordinatewise onto ``box``."""
    x = check_vector(x, "x")
    if x.size != box.dim:
        raise ValueError(f"x has length {x.size} but the box has dimension {box.dim}")
    return np.clip(x, box.lower, box.upper)


class Objective:
    """A black-box scalar function of a ``dim``-vector.

    Parameters
    ----------
    func : callable
        Maps a 1-D array of length ``dim`` to a real number.  With
        ``vectorized=True`` it must also map an ``(m, dim)`` array to ``m``
        values, which lets the optimizers evaluate finite-difference probes
        in one call.
    dim : int
    direction : {"max", "min"}
    vectorized : bool
    name : str, optional
    """

    def __init__(self, func, dim, direction=MAXIMIZE, vectorized=False, name=None):
        if not callable(func):
            raise TypeError("func must be callable")
        if int(dim) < 1:
            raise ValueError("dim must be >= 1")
        self.func = func
        self.dim = int(dim)
        self.direction = _check_direction(direction)
        self.vectorized = bool(vectorized)
        self.name = name or getattr(func, "__name__", "objective")

    def __call__(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float).item()

    def eval_batch(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.vectorized:
            return np.asarray(self.func(points), dtype=float).reshape(points.shape[0])
        return np.array([self(p) for p in points])

    @property
    def maximize(self):
        return self.direction == MAXIMIZE

    def __repr__(self):
        return f"Objective({self.name!r}, dim={self.dim}, direction={self.direction!r})"


class _Negated:
    def __init__(self, func):
        self.inner = func

    def __call__(self, x):
        return -np.asarray(self.inner(x), dtype=float)


def negate_objective(obj):
    """Return the objective ``-f`` with the opposite direction.

    Applying it twice gives back an objective equal to the original.
    """
    if isinstance(obj.func, _Negated):
        func = obj.func.inner
    else:
        func = _Negated(obj.func)
    flipped = MINIMIZE if obj.maximize else MAXIMIZE
    return Objective(func, obj.dim, flipped, vectorized=obj.vectorized, name=obj.name)


class RngStream:
    """Reproducible random stream identified by ``(seed, stream)``.

    Streams with distinct ids are statistically independent; the same pair
    always yields the same draws, regardless of which thread consumes them.
    """

    def __init__(self, seed=0, stream=()):
        if isinstance(stream, (int, np.integer)):
            stream = (int(stream),)
        self.seed = int(seed)
        self.stream = tuple(int(s) for s in stream)
        self.generator = self._make()

    def _make(self):
        seq = np.random.SeedSequence(self.seed, spawn_key=self.stream)
        return np.random.Generator(np.random.PCG64(seq))

    def substream(self, index):
        return RngStream(self.seed, self.stream + (int(index),))

    def reset(self):
        self.generator = self._make()
        return self

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.generator.uniform(low, high, size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self.generator.normal(loc, scale, size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size)

    def random(self, size=None):
        return self.generator.random(size)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream={self.stream})"


def as_rng(rng):
    """Coerce ``None``, an int seed or an :class:`RngStream` to a stream."""
    if rng is None:
        return RngStream(0)
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng))
    raise TypeError(f"expected an RngStream or an integer seed, got {type(rng).__name__}")


class EvalTracker:
    """Counts evaluations and keeps the running best, in maximization form.

    Non-finite outputs are mapped to ``-inf`` so they are never selected.
    """

    def __init__(self, obj):
        self.obj = obj
        self.sign = 1.0 if obj.maximize else -1.0
        self.evaluations = 0
        self.best_value = -math.inf
        self.best_point = None

    def _clean(self, v):
        v = self.sign * v
        return v if math.isfinite(v) else -math.inf

    def value(self, x):
        self.evaluations += 1
        v = self._clean(self.obj(x))
        if v > self.best_value or self.best_point is None:
            self.best_value = v
            self.best_point = np.array(x, dtype=float)
        return v

    def values(self, points):
        raw = self.obj.eval_batch(points)
        self.evaluations += len(raw)
        out = self.sign * raw
        out[~np.isfinite(out)] = -np.inf
        k = int(np.argmax(out))
        if out[k] > self.best_value or self.best_point is None:
            self.best_value = float(out[k])
            self.best_point = np.array(points[k], dtype=float)
        return out

    def to_user(self, v):
        """Map a maximization-form value back to the objective's direction."""
        return self.sign * v


@dataclass
class RunRecord:
    """Summary of one optimizer run, with values in the objective's direction."""

    final_point: np.ndarray
    final_value: float
    best_point: np.ndarray
    best_value: float
    iterations: int
    evaluations: int
    converged: bool
    direction: str = MAXIMIZE
    x0: Optional[np.ndarray] = None
    algorithm: str = ""
    trajectory: Optional[list] = field(default=None, repr=False)

    def better(self, a, b):
        """True when value ``a`` is strictly better than ``b`` for this direction."""
        return a > b if self.direction == MAXIMIZE else a < b


@dataclass
class Segment:
    """Iterates of one uninterrupted running-mean recursion.

    ``divisors[k]`` is the count the running sum was divided by to obtain
    ``points[k]``.
    """

    points: np.ndarray
    divisors: np.ndarray
    boost: int = 0


def make_record(tracker, final_point, final_value, iterations, converged,
                algorithm="", x0=None, trajectory=None):
    return RunRecord(
        final_point=np.array(final_point, dtype=float),
        final_value=float(tracker.to_user(final_value)),
        best_point=np.array(tracker.best_point, dtype=float),
        best_value=float(tracker.to_user(tracker.best_value)),
        iterations=int(iterations),
        evaluations=int(tracker.evaluations),
        converged=bool(converged),
        direction=tracker.obj.direction,
        x0=None if x0 is None else np.array(x0, dtype=float),
        algorithm=algorithm,
        trajectory=trajectory,
    )


def as_objective(func, dim=None, direction=MAXIMIZE):
    if isinstance(func, Objective):
        return func
    if dim is None:
        raise ValueError("dim is required when passing a plain callable")
    return Objective(func, dim, direction)


__all__ = [
    "Box",
    "BufferedBox",
    "EvalTracker",
    "MAXIMIZE",
    "MINIMIZE",
    "Objective",
    "RngStream",
    "RunRecord",
    "Segment",
    "as_objective",
    "as_rng",
    "clamp_to_box",
    "make_record",
    "negate_objective",
]
