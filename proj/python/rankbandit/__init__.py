"""Ranking with position-biased attention windows: bandit policies, admissible polytope tools and an experiment runner."""

import json as _json

from ._core import (
    ConfigError,
    InfeasibleTargetError,
    InputError,
    best_fixed_hindsight,
    bound_report,
    check_admissible,
    decompose,
    feasible_matrix,
    inversion_budget,
    lazy_alpha,
    optimal_permutation,
    regret_upper_bound,
    selection_matrix,
    tail_dominates,
    user_select,
)
from ._core import run_experiment as _run_experiment


def run_experiment(config, base_dir=""):
    """Run an experiment from a config dict (or JSON text) and return the report as a dict."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _json.loads(_run_experiment(text, base_dir))


__all__ = [
    "ConfigError",
    "InfeasibleTargetError",
    "InputError",
    "best_fixed_hindsight",
    "bound_report",
    "check_admissible",
    "decompose",
    "feasible_matrix",
    "inversion_budget",
    "lazy_alpha",
    "optimal_permutation",
    "regret_upper_bound",
    "run_experiment",
    "selection_matrix",
    "tail_dominates",
    "user_select",
]
