"""Deterministic benchmark functions and randomized domain transforms.

Formulas follow the usual definitions from the Virtual Library of Simulated
Experiments (https://www.sfu.ca/~ssurjano/optimization.html).  All functions
accept either a single point of shape ``(d,)`` or a batch of shape
``(m, d)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Box, Objective, as_rng


def rastrigin(x):
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    return 10.0 * d + np.sum(x**2 - 10.0 * np.cos(2.0 * np.pi * x), axis=-1)


def ackley(x, a=20.0, b=0.2, c=2.0 * np.pi):
    x = np.asarray(x, dtype=float)
    mean_sq = np.mean(x**2, axis=-1)
    mean_cos = np.mean(np.cos(c * x), axis=-1)
    return -a * np.exp(-b * np.sqrt(mean_sq)) - np.exp(mean_cos) + a + np.e


def griewank(x):
    x = np.asarray(x, dtype=float)
    i = np.arange(1, x.shape[-1] + 1)
    return np.sum(x**2, axis=-1) / 4000.0 - np.prod(np.cos(x / np.sqrt(i)), axis=-1) + 1.0


def michalewicz(x, m=10):
    x = np.asarray(x, dtype=float)
    i = np.arange(1, x.shape[-1] + 1)
    terms = np.sin(x) * np.sin(i * x**2 / np.pi) ** (2 * m)
    # subnormal terms are rounding residue (e.g. sin of the float nearest pi)
    terms[np.abs(terms) < np.finfo(float).tiny] = 0.0
    return -np.sum(terms, axis=-1)


_DEFAULT_BOUNDS = {
    "rastrigin": (-5.12, 5.12),
    "ackley": (-32.768, 32.768),
    "griewank": (-600.0, 600.0),
    "michalewicz": (0.0, np.pi),
}

_FUNCTIONS = {
    "rastrigin": rastrigin,
    "ackley": ackley,
    "griewank": griewank,
    "michalewicz": michalewicz,
}

# analytic minimum where it is known in every dimension
KNOWN_MINIMUM = {"rastrigin": 0.0, "ackley": 0.0, "griewank": 0.0}
KNOWN_MAXIMUM = {"michalewicz": 0.0}


def available():
    return sorted(_FUNCTIONS)


def register(name, func, bounds):
    """Add a vectorized test function with default per-coordinate bounds."""
    _FUNCTIONS[name] = func
    _DEFAULT_BOUNDS[name] = tuple(float(b) for b in bounds)


def eval_testfn(name, x):
    try:
        func = _FUNCTIONS[name.lower()]
    except KeyError:
        raise KeyError(f"unknown test function {name!r}; known: {available()}") from None
    return func(x)


@dataclass(frozen=True)
class NamedTestFn:
    name: str
    dim: int

    def __post_init__(self):
        if self.name.lower() not in _FUNCTIONS:
            raise KeyError(f"unknown test function {self.name!r}; known: {available()}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    @property
    def func(self):
        return _FUNCTIONS[self.name.lower()]

    def default_box(self):
        low, high = _DEFAULT_BOUNDS[self.name.lower()]
        return Box.cube(low, high, self.dim)

    def objective(self, direction="max"):
        return Objective(self.func, self.dim, direction, vectorized=True, name=self.name)


def random_rotation(d, rng):
    """Haar-distributed orthonormal matrix from the QR factorization of a
    standard normal matrix, with the sign of ``R``'s diagonal folded into Q."""
    rng = as_rng(rng)
    a = rng.normal(size=(d, d))
    q, r = np.linalg.qr(a)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


@dataclass
class DomainTransform:
    """Random shift, asymmetrization and rotation of a test problem.

    The search box becomes the shifted and asymmetrized rectangle; the
    rotation acts only inside the objective,
    ``f_mod(x) = f(Q (x - v * width))``.
    """

    r: np.ndarray
    v: np.ndarray
    nu: np.ndarray
    rotation: np.ndarray
    base_box: Box

    @classmethod
    def draw(cls, base_box, rng):
        rng = as_rng(rng)
        d = base_box.dim
        r = (rng.random(d) < 0.5).astype(float)
        v = rng.normal(size=d)
        nu = rng.random(d)
        q = random_rotation(d, rng)
        return cls(r, v, nu, q, base_box)

    @property
    def shift(self):
        return self.v * self.base_box.width

    def box(self):
        lo, hi, w = self.base_box.lower, self.base_box.upper, self.base_box.width
        r, v, nu = self.r, self.v, self.nu
        lower = lo + (v + r * (0.2 + 0.1 * nu) - (1 - r) * (0.4 + 0.2 * nu)) * w
        upper = hi + (v + r * (0.4 + 0.2 * nu) - (1 - r) * (0.2 + 0.1 * nu)) * w
        return Box(lower, upper)

    def inner(self, x):
        """Map search coordinates to the base function's coordinates."""
        x = np.asarray(x, dtype=float)
        return (x - self.shift) @ self.rotation.T

    def wrap(self, func):
        return _Transformed(func, self)


class _Transformed:
    def __init__(self, func, transform):
        self.func = func
        self.transform = transform

    def __call__(self, x):
        return self.func(self.transform.inner(x))


def transform_problem(fn, rng, direction="max"):
    """Return ``(objective, box)`` for a randomly transformed copy of ``fn``."""
    base = fn.default_box()
    tr = DomainTransform.draw(base, rng)
    obj = Objective(tr.wrap(fn.func), fn.dim, direction, vectorized=True,
                    name=f"{fn.name}-mod")
    obj.transform = tr
    return obj, tr.box()


__all__ = [
    "DomainTransform",
    "KNOWN_MAXIMUM",
    "KNOWN_MINIMUM",
    "NamedTestFn",
    "ackley",
    "available",
    "eval_testfn",
    "griewank",
    "michalewicz",
    "random_rotation",
    "rastrigin",
    "register",
    "transform_problem",
]
