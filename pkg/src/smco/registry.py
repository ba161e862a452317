"""Name-addressable algorithms and problems used by the harness and CLI."""

from __future__ import annotations

from .algorithms import SmcoConfig, smco_br_run, smco_r_run, smco_run
from .baselines import BaselineConfig, gd_run, signgd_run, spsa_run


def _smco_wrapper(func):
    def run(obj, box, x0, cfg, rng):
        return func(obj, box, x0, cfg if isinstance(cfg, SmcoConfig) else None, rng)

    run.__name__ = func.__name__
    run.__doc__ = func.__doc__
    return run


def _baseline_wrapper(func):
    def run(obj, box, x0, cfg, rng):
        return func(obj, box, x0, cfg if isinstance(cfg, BaselineConfig) else None, rng)

    run.__name__ = func.__name__
    run.__doc__ = func.__doc__
    return run


# the integer is the algorithm's random substream id inside a replication;
# never renumber existing entries or old seeds stop reproducing
ALGORITHMS = {
    "smco": (0, _smco_wrapper(smco_run)),
    "smco-r": (1, _smco_wrapper(smco_r_run)),
    "smco-br": (2, _smco_wrapper(smco_br_run)),
    "gd": (3, _baseline_wrapper(gd_run)),
    "signgd": (4, _baseline_wrapper(signgd_run)),
    "spsa": (5, _baseline_wrapper(spsa_run)),
}

RANDOM_PROBLEMS = ("ms", "ew")


def _normalize(name):
    return str(name).lower().replace("_", "-")


def get_algorithm(name):
    try:
        return ALGORITHMS[_normalize(name)][1]
    except KeyError:
        raise KeyError(f"unknown algorithm {name!r}; known: {sorted(ALGORITHMS)}") from None


def algorithm_stream(name):
    return ALGORITHMS[_normalize(name)][0]


def algorithm_names():
    return list(ALGORITHMS)


def problem_names():
    from .testfns import available

    return available() + list(RANDOM_PROBLEMS)
