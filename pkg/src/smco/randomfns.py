"""Random econometric criteria on synthetic data, and a penalty wrapper.

Two piecewise-constant objectives are provided:

* the maximum score criterion
  ``f_MS(b) = mean(Y * 1{X1 + X_rest @ b >= 0})``, and
* the empirical welfare criterion of a linear treatment rule
  ``f_EW(b) = mean((D/p - (1-D)/(1-p)) * Y * 1{b1 + X @ b_rest >= 0})``.

Both are flat almost everywhere, so gradient methods see no signal.

The welfare data are synthetic.  Covariates imitate pre-program earnings
and education with its square and cube (all standardized), padded with
standard normals; treatment is Bernoulli(2/3); the outcome is::

    Y = 0.8 * earn + 600 * (edu - 11.5)
        + D * (1500 + 700 * (edu - 11.5) - 0.15 * (earn - 8000))
        + N(0, 6000**2)

with ``earn ~ lognormal(9, 0.8)`` and ``edu = clip(round(N(11.5, 2)), 7, 18)``.
The treatment effect changes sign across the covariate space, so the best
linear rule treats some people and not others.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._validation import check_int, check_positive
from .core import MAXIMIZE, Box, Objective, as_rng

MS_SEARCH_BOUND = 20.0
EW_PROPENSITY = 2.0 / 3.0


@dataclass
class MsDataset:
    """Binary-choice sample; ``x`` holds ``X1`` in column 0 and ``X_rest`` after."""

    x: np.ndarray
    y: np.ndarray
    beta0: np.ndarray

    @property
    def n(self):
        return self.y.size

    @property
    def dim(self):
        return self.x.shape[1] - 1


def gen_ms_data(d, n=500, seed=0, errors="normal"):
    """Simulate a maximum score sample.

    ``X1 ~ N(0, d)``, the other ``d`` covariates are standard normal,
    ``beta0_j ~ N(0, 1)`` and the error is ``N(0, d)``.  ``errors`` may be
    ``"normal"``, ``"cauchy"`` (scaled by ``sqrt(d)``) or ``"none"``.
    """
    check_int(d, "d", minimum=1)
    check_int(n, "n", minimum=1)
    rng = as_rng(seed)
    beta0 = rng.normal(size=d)
    x1 = rng.normal(0.0, np.sqrt(d), size=n)
    rest = rng.normal(size=(n, d))
    if errors == "normal":
        eps = rng.normal(0.0, np.sqrt(d), size=n)
    elif errors == "cauchy":
        eps = np.sqrt(d) * rng.generator.standard_cauchy(size=n)
    elif errors == "none":
        eps = np.zeros(n)
    else:
        raise ValueError(f"errors must be 'normal', 'cauchy' or 'none', got {errors!r}")
    y = (x1 + rest @ beta0 + eps >= 0).astype(float)
    return MsDataset(np.column_stack([x1, rest]), y, beta0)


def eval_ms(data, beta):
    """Maximum score criterion at ``beta`` (shape ``(d,)`` or ``(m, d)``)."""
    beta = np.asarray(beta, dtype=float)
    index = data.x[:, 0] + beta @ data.x[:, 1:].T
    return np.mean(data.y * (index >= 0), axis=-1)


def ms_objective(data):
    return Objective(lambda b: eval_ms(data, b), data.dim, MAXIMIZE,
                     vectorized=True, name="ms")


def ms_box(d, bound=MS_SEARCH_BOUND):
    return Box.cube(-bound, bound, d)


@dataclass
class EwDataset:
    """Treatment-assignment sample; ``x`` has ``d - 1`` covariate columns."""

    d: np.ndarray
    x: np.ndarray
    y: np.ndarray
    propensity: float = EW_PROPENSITY

    def __post_init__(self):
        if not 0.0 < self.propensity < 1.0:
            raise ValueError("propensity must lie strictly between 0 and 1")

    @property
    def n(self):
        return self.y.size

    @property
    def dim(self):
        return self.x.shape[1] + 1

    @property
    def weights(self):
        p = self.propensity
        return (self.d / p - (1.0 - self.d) / (1.0 - p)) * self.y


def _standardize(v):
    sd = v.std()
    return (v - v.mean()) / (sd if sd > 0 else 1.0)


def gen_ew_data(d, n=2000, seed=0):
    """Simulate an empirical welfare sample with ``d - 1`` covariates."""
    check_int(d, "d", minimum=1)
    check_int(n, "n", minimum=1)
    rng = as_rng(seed)
    earn = np.exp(rng.normal(9.0, 0.8, size=n))
    edu = np.clip(np.round(rng.normal(11.5, 2.0, size=n)), 7, 18)
    treat = (rng.random(n) < EW_PROPENSITY).astype(float)
    effect = 1500.0 + 700.0 * (edu - 11.5) - 0.15 * (earn - 8000.0)
    y = 0.8 * earn + 600.0 * (edu - 11.5) + treat * effect + rng.normal(0.0, 6000.0, size=n)
    base = [_standardize(earn), _standardize(edu), _standardize(edu**2), _standardize(edu**3)]
    k = d - 1
    cols = base[:k]
    if k > len(base):
        cols += list(rng.normal(size=(k - len(base), n)))
    x = np.column_stack(cols) if cols else np.empty((n, 0))
    return EwDataset(treat, x, y)


def eval_ew(data, beta):
    """Empirical welfare of the rule ``1{b1 + X @ b_rest >= 0}``."""
    beta = np.asarray(beta, dtype=float)
    index = beta[..., :1] + beta[..., 1:] @ data.x.T
    return np.mean(data.weights * (index >= 0), axis=-1)


def ew_objective(data):
    return Objective(lambda b: eval_ew(data, b), data.dim, MAXIMIZE,
                     vectorized=True, name="ew")


@dataclass
class PenaltySpec:
    """Equality constraints ``g_i(x) = 0`` and inequalities ``h_j(x) <= 0``."""

    equalities: Sequence[Callable] = field(default_factory=list)
    inequalities: Sequence[Callable] = field(default_factory=list)
    lambda_eq: float = 1.0
    lambda_ineq: float = 1.0

    def __post_init__(self):
        check_positive(self.lambda_eq, "lambda_eq")
        check_positive(self.lambda_ineq, "lambda_ineq")

    def penalty(self, x):
        eq = sum(float(g(x)) ** 2 for g in self.equalities)
        ineq = sum(max(0.0, float(h(x))) ** 2 for h in self.inequalities)
        return self.lambda_eq * eq + self.lambda_ineq * ineq


class _Penalized:
    def __init__(self, obj, spec):
        self.obj = obj
        self.spec = spec
        self.sign = 1.0 if obj.maximize else -1.0

    def __call__(self, x):
        return self.obj(x) - self.sign * self.spec.penalty(x)


def penalize(obj, spec):
    """Fold constraints into the objective as squared penalties.

    For a maximization objective the result is
    ``f(x) - lambda_eq * sum g_i(x)**2 - lambda_ineq * sum max(0, h_j(x))**2``;
    for minimization the penalties are added instead.
    """
    return Objective(_Penalized(obj, spec), obj.dim, obj.direction,
                     name=f"{obj.name}-penalized")


def save_dataset(data, path_or_buf):
    """Write a dataset as comma-separated text with one header row."""
    if isinstance(data, MsDataset):
        names = [f"x{j + 1}" for j in range(data.x.shape[1])] + ["y"]
        table = np.column_stack([data.x, data.y])
        meta = "# kind=ms beta0=" + " ".join(repr(float(b)) for b in data.beta0)
    elif isinstance(data, EwDataset):
        names = ["d", "y"] + [f"x{j + 1}" for j in range(data.x.shape[1])]
        table = np.column_stack([data.d, data.y, data.x])
        meta = f"# kind=ew propensity={data.propensity!r}"
    else:
        raise TypeError(f"cannot save {type(data).__name__}")
    buf = io.StringIO()
    buf.write(meta + "\n")
    buf.write(",".join(names) + "\n")
    np.savetxt(buf, table, delimiter=",", fmt="%.17g")
    text = buf.getvalue()
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(text)
    else:
        with open(path_or_buf, "w", encoding="utf-8") as fh:
            fh.write(text)


def load_dataset(path_or_buf):
    if hasattr(path_or_buf, "read"):
        text = path_or_buf.read()
    else:
        with open(path_or_buf, encoding="utf-8") as fh:
            text = fh.read()
    meta_line, header, body = text.split("\n", 2)
    meta = dict(item.split("=", 1) for item in meta_line.lstrip("# ").split(" ", 1))
    table = np.loadtxt(io.StringIO(body), delimiter=",", ndmin=2)
    if meta["kind"] == "ms":
        beta0 = np.array([float(v) for v in meta["beta0"].split()])
        return MsDataset(table[:, :-1], table[:, -1], beta0)
    if meta["kind"] == "ew":
        return EwDataset(table[:, 0], table[:, 2:], table[:, 1], float(meta["propensity"]))
    raise ValueError(f"unknown dataset kind {meta['kind']!r}")


__all__ = [
    "EwDataset",
    "MsDataset",
    "PenaltySpec",
    "eval_ew",
    "eval_ms",
    "ew_objective",
    "gen_ew_data",
    "gen_ms_data",
    "load_dataset",
    "ms_box",
    "ms_objective",
    "penalize",
    "save_dataset",
]
