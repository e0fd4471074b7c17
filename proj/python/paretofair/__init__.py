"""Pareto descent optimization for fairness-aware classification."""

from ._core import (
    Bundle,
    ConfigError,
    DataError,
    Dataset,
    Error,
    NumericError,
    UsageError,
    __version__,
    dominates,
    evaluate_metrics,
    fairness_bundle,
    gaussian_pair,
    kl_objective,
    load_dataset,
    non_dominated,
    project_simplex,
    run_pbpdo,
    run_pdo,
    softmax_scores,
    solve_inner,
)

__all__ = [
    "Bundle",
    "ConfigError",
    "DataError",
    "Dataset",
    "Error",
    "NumericError",
    "UsageError",
    "__version__",
    "dominates",
    "evaluate_metrics",
    "fairness_bundle",
    "gaussian_pair",
    "kl_objective",
    "load_dataset",
    "non_dominated",
    "project_simplex",
    "run_pbpdo",
    "run_pdo",
    "softmax_scores",
    "solve_inner",
]
