"""Local comparison optimizers: GD with momentum, SignGD and SPSA.

All three work in maximization form, take gradients from central finite
differences (or simultaneous perturbations for SPSA) and keep their
iterates inside the buffered box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_int, check_positive
from .algorithms import _prepare
from .core import BufferedBox, EvalTracker, make_record


@dataclass
class BaselineConfig:
    gd_lr: float = 0.1
    gd_momentum: float = 0.9
    gd_max_iter: int = 1000
    gd_tol: float = 1e-6
    signgd_lr: float = 0.1
    signgd_decay: float = 0.995
    signgd_max_iter: int = 1000
    signgd_tol: float = 1e-6
    spsa_a: float = 0.1
    spsa_A: float = 50.0
    spsa_alpha: float = 0.602
    spsa_gamma: float = 0.101
    spsa_c: float = 1e-3
    spsa_max_iter: int = 1000
    spsa_tol: float = 1e-7
    # relative step of the central differences used by GD and SignGD
    fd_step: float = 1e-6
    buffer_fraction: float = 0.05

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if name.endswith("max_iter"):
                check_int(value, name, minimum=1)
            elif name == "gd_momentum":
                check_positive(value, name, strict=False)
            else:
                check_positive(value, name)


def central_gradient(tracker, x, step, lower, upper):
    d = x.size
    idx = np.arange(d)
    probes = np.tile(x, (2 * d, 1))
    probes[idx, idx] += step
    probes[d + idx, idx] -= step
    np.clip(probes, lower, upper, out=probes)
    values = tracker.values(probes)
    spacing = probes[idx, idx] - probes[d + idx, idx]
    with np.errstate(invalid="ignore", divide="ignore"):
        grad = (values[:d] - values[d:]) / spacing
    return np.where(np.isfinite(grad), grad, 0.0)


def _setup(obj, box, x0, cfg, rng):
    cfg = cfg if isinstance(cfg, BaselineConfig) else BaselineConfig()
    box, x0, rng = _prepare(obj, box, x0, rng)
    ext = BufferedBox(box, cfg.buffer_fraction)
    return cfg, box, x0, rng, ext, EvalTracker(obj)


def gd_run(obj, box, x0=None, cfg=None, rng=None):
    """Gradient ascent with heavy-ball momentum.

    Stops once an update moves the iterate by at most ``gd_tol`` in every
    coordinate.
    """
    cfg, box, x0, rng, ext, tracker = _setup(obj, box, x0, cfg, rng)
    step = cfg.fd_step * box.width
    x = x0.copy()
    fx = tracker.value(x)
    velocity = np.zeros_like(x)
    converged, it = False, 0
    for it in range(1, cfg.gd_max_iter + 1):
        grad = central_gradient(tracker, x, step, ext.lower, ext.upper)
        velocity = cfg.gd_momentum * velocity + cfg.gd_lr * grad
        x_new = ext.clip(x + velocity)
        moved = np.max(np.abs(x_new - x))
        x = x_new
        fx = tracker.value(x)
        if moved <= cfg.gd_tol:
            converged = True
            break
    return make_record(tracker, x, fx, it, converged, "gd", x0)


def signgd_run(obj, box, x0=None, cfg=None, rng=None):
    """Sign gradient ascent, ``x += lr * decay**n * sign(grad)``.

    Stops when the step length ``lr * decay**n`` falls to ``signgd_tol``.
    """
    cfg, box, x0, rng, ext, tracker = _setup(obj, box, x0, cfg, rng)
    step = cfg.fd_step * box.width
    x = x0.copy()
    fx = tracker.value(x)
    converged, it = False, 0
    for it in range(1, cfg.signgd_max_iter + 1):
        rate = cfg.signgd_lr * cfg.signgd_decay ** (it - 1)
        if rate <= cfg.signgd_tol:
            converged = True
            break
        grad = central_gradient(tracker, x, step, ext.lower, ext.upper)
        x = ext.clip(x + rate * np.sign(grad))
        fx = tracker.value(x)
    return make_record(tracker, x, fx, it, converged, "signgd", x0)


def signgd_step_size(cfg, n):
    """Per-coordinate step magnitude of SignGD at (zero-based) iteration ``n``."""
    return cfg.signgd_lr * cfg.signgd_decay**n


def spsa_run(obj, box, x0=None, cfg=None, rng=None):
    """Simultaneous perturbation stochastic approximation (ascent form).

    Gains ``a_k = a / (k + 1 + A)**alpha`` and ``c_k = c / (k + 1)**gamma``
    with Rademacher perturbations; stops once an update moves the iterate
    by at most ``spsa_tol``.
    """
    cfg, box, x0, rng, ext, tracker = _setup(obj, box, x0, cfg, rng)
    x = x0.copy()
    fx = tracker.value(x)
    converged, it = False, 0
    for k in range(cfg.spsa_max_iter):
        it = k + 1
        a_k = cfg.spsa_a / (k + 1 + cfg.spsa_A) ** cfg.spsa_alpha
        c_k = cfg.spsa_c / (k + 1) ** cfg.spsa_gamma
        delta = 2.0 * rng.integers(0, 2, size=x.size) - 1.0
        probes = ext.clip(np.stack([x + c_k * delta, x - c_k * delta]))
        plus, minus = tracker.values(probes)
        diff = plus - minus
        if not np.isfinite(diff):
            diff = 0.0
        grad = diff / (2.0 * c_k * delta)
        x_new = ext.clip(x + a_k * grad)
        moved = np.max(np.abs(x_new - x))
        x = x_new
        fx = tracker.value(x)
        if moved <= cfg.spsa_tol:
            converged = True
            break
    return make_record(tracker, x, fx, it, converged, "spsa", x0)


__all__ = [
    "BaselineConfig",
    "central_gradient",
    "gd_run",
    "signgd_run",
    "signgd_step_size",
    "spsa_run",
]
