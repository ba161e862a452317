"""scikit-learn style front ends.

``SmcoOptimizer`` wraps the optimizers behind ``get_params``/``set_params``;
``MaximumScoreEstimator`` and ``EmpiricalWelfareRule`` fit linear rules by
maximizing their piecewise-constant sample criteria.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .algorithms import SmcoConfig
from .baselines import BaselineConfig
from .core import MAXIMIZE, MINIMIZE, Box, Objective, RngStream
from .multistart import StartPlan, multistart_run
from .randomfns import EW_PROPENSITY, EwDataset, MsDataset, ew_objective, ms_objective


class SmcoOptimizer(BaseEstimator):
    """Multi-start box-constrained optimizer.

    Parameters
    ----------
    algorithm : str
        Registry name: ``smco``, ``smco-r``, ``smco-br``, ``gd``, ``signgd``
        or ``spsa``.
    max_iter, tol, buffer_fraction :
        Forwarded to the algorithm's configuration.
    n_starts : int
    start_mode : {"uniform", "diagonal"}
    random_state : int or None
    n_jobs : int
        Threads used across starts; results do not depend on it.

    Attributes
    ----------
    x_ : ndarray
    fun_ : float
    result_ : MultistartResult
    """

    def __init__(self, algorithm="smco-r", max_iter=500, tol=1e-6, buffer_fraction=0.05,
                 n_starts=1, start_mode="uniform", random_state=None, n_jobs=1):
        self.algorithm = algorithm
        self.max_iter = max_iter
        self.tol = tol
        self.buffer_fraction = buffer_fraction
        self.n_starts = n_starts
        self.start_mode = start_mode
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _config(self):
        if str(self.algorithm).lower().startswith("smco"):
            return SmcoConfig(max_iter=self.max_iter, tol=self.tol,
                              buffer_fraction=self.buffer_fraction)
        kw = {"buffer_fraction": self.buffer_fraction}
        for name in ("gd", "signgd", "spsa"):
            kw[f"{name}_max_iter"] = self.max_iter
            kw[f"{name}_tol"] = self.tol
        return BaselineConfig(**kw)

    def _run(self, func, bounds, direction):
        bounds = np.asarray(bounds, dtype=float)
        if bounds.ndim != 2 or bounds.shape[1] != 2:
            raise ValueError("bounds must have shape (d, 2)")
        box = Box(bounds[:, 0], bounds[:, 1])
        obj = func if isinstance(func, Objective) else Objective(func, box.dim, direction)
        if obj.direction != direction:
            raise ValueError(f"objective direction is {obj.direction!r}, expected {direction!r}")
        seed = 0 if self.random_state is None else self.random_state
        self.result_ = multistart_run(
            obj, box, self.algorithm, StartPlan(self.start_mode, self.n_starts),
            cfg=self._config(), rng=RngStream(seed), workers=self.n_jobs,
        )
        self.x_ = self.result_.best.best_point
        self.fun_ = self.result_.best.best_value
        return self

    def minimize(self, func, bounds):
        """Minimize ``func`` over the box given by ``bounds`` rows ``(low, high)``."""
        return self._run(func, bounds, MINIMIZE)

    def maximize(self, func, bounds):
        return self._run(func, bounds, MAXIMIZE)


class _CriterionEstimator(BaseEstimator):
    def __init__(self, algorithm="smco-r", max_iter=500, n_starts=2, bound=20.0,
                 random_state=None, n_jobs=1):
        self.algorithm = algorithm
        self.max_iter = max_iter
        self.n_starts = n_starts
        self.bound = bound
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _maximize(self, obj):
        opt = SmcoOptimizer(self.algorithm, max_iter=self.max_iter, n_starts=self.n_starts,
                            random_state=self.random_state, n_jobs=self.n_jobs)
        bounds = np.tile([-self.bound, self.bound], (obj.dim, 1))
        opt.maximize(obj, bounds)
        return opt


class MaximumScoreEstimator(ClassifierMixin, _CriterionEstimator):
    """Binary-choice index ``X[:, 0] + X[:, 1:] @ coef_`` fit by maximum score.

    The coefficient of the first column is normalized to one.  ``y`` must be
    coded 0/1.
    """

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float)
        if X.shape[1] < 2:
            raise ValueError("X needs the normalized column plus at least one more")
        if not np.all(np.isin(y, (0.0, 1.0))):
            raise ValueError("y must be coded 0/1")
        self.classes_ = np.array([0, 1])
        data = MsDataset(X, y, np.zeros(X.shape[1] - 1))
        opt = self._maximize(ms_objective(data))
        self.coef_ = opt.x_
        self.criterion_ = opt.fun_
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=float)
        return X[:, 0] + X[:, 1:] @ self.coef_

    def predict(self, X):
        return (self.decision_function(X) >= 0).astype(int)


class EmpiricalWelfareRule(_CriterionEstimator):
    """Linear treatment rule ``1{coef_[0] + X @ coef_[1:] >= 0}`` fit by
    maximizing inverse-propensity-weighted welfare."""

    def fit(self, X, y, treatment, propensity=EW_PROPENSITY):
        X, y = check_X_y(X, y, dtype=float)
        treatment = check_array(treatment, ensure_2d=False, dtype=float)
        if treatment.shape != y.shape:
            raise ValueError("treatment must have one entry per sample")
        data = EwDataset(treatment, X, y, float(propensity))
        opt = self._maximize(ew_objective(data))
        self.coef_ = opt.x_
        self.welfare_ = opt.fun_
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=float)
        return (self.coef_[0] + X @ self.coef_[1:] >= 0).astype(int)


__all__ = ["EmpiricalWelfareRule", "MaximumScoreEstimator", "SmcoOptimizer"]
