"""Strategic Monte Carlo optimization.

Derivative-free box-constrained optimizers that move a running mean of
two-armed draws toward the optimum, plus test problems, baselines, a 1-D
HJB solver and a replication harness.
"""

from .algorithms import SmcoConfig, fd_sign, smco_br_run, smco_r_run, smco_run
from .baselines import BaselineConfig, gd_run, signgd_run, spsa_run
from .bench import BenchReport, ExperimentSpec, compute_metrics, run_experiment
from .core import (
    MAXIMIZE,
    MINIMIZE,
    Box,
    BufferedBox,
    Objective,
    RngStream,
    RunRecord,
    negate_objective,
)
from .estimators import EmpiricalWelfareRule, MaximumScoreEstimator, SmcoOptimizer
from .multistart import StartPlan, default_start_count, gen_starts, multistart_run
from .randomfns import PenaltySpec, penalize

__version__ = "0.1.0"

__all__ = [
    "BaselineConfig",
    "BenchReport",
    "Box",
    "BufferedBox",
    "EmpiricalWelfareRule",
    "ExperimentSpec",
    "MAXIMIZE",
    "MINIMIZE",
    "MaximumScoreEstimator",
    "Objective",
    "PenaltySpec",
    "RngStream",
    "RunRecord",
    "SmcoConfig",
    "SmcoOptimizer",
    "StartPlan",
    "compute_metrics",
    "default_start_count",
    "fd_sign",
    "gd_run",
    "gen_starts",
    "multistart_run",
    "negate_objective",
    "penalize",
    "run_experiment",
    "signgd_run",
    "smco_br_run",
    "smco_r_run",
    "smco_run",
    "spsa_run",
]
