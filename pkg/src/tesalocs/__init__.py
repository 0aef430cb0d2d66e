"""Hybrid optimizer: tensor-train sampling of starting points, local search
refinement, and likelihood updates of the sampler toward refined elites."""

from .benchmarks import BenchmarkFunction, catalog, get, register
from .driver import RunTrace, TesalocsConfig, run, run_baseline
from .grid import SearchSpace, to_index, to_point
from .learning import (
    LearnerConfig,
    ModelCorruptionError,
    OptimizerState,
    grad_cores,
    log_prob,
    neg_log_likelihood,
    update,
)
from .local_search import (
    BudgetExhaustedError,
    LocalSearchConfig,
    LocalSearchResult,
    MeteredObjective,
    numerical_gradient,
    refine,
)
from .sampling import SampleBatch, sample
from .tt import (
    DegenerateModelError,
    TTDistribution,
    evaluate,
    init_random,
    load_checkpoint,
    mass,
    random_distribution,
    save_checkpoint,
    suffix_interfaces,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkFunction",
    "BudgetExhaustedError",
    "DegenerateModelError",
    "LearnerConfig",
    "LocalSearchConfig",
    "LocalSearchResult",
    "MeteredObjective",
    "ModelCorruptionError",
    "OptimizerState",
    "RunTrace",
    "SampleBatch",
    "SearchSpace",
    "TTDistribution",
    "TesalocsConfig",
    "catalog",
    "evaluate",
    "get",
    "grad_cores",
    "init_random",
    "load_checkpoint",
    "log_prob",
    "mass",
    "neg_log_likelihood",
    "numerical_gradient",
    "random_distribution",
    "refine",
    "register",
    "run",
    "run_baseline",
    "sample",
    "save_checkpoint",
    "suffix_interfaces",
    "to_index",
    "to_point",
    "update",
]
