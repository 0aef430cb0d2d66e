"""Outer optimization loop: sample starts from the TT model, refine them
locally, and update the model toward the refined elite points.

Minimization throughout; maximize by negating the objective.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .grid import SearchSpace, to_index, to_point
from .learning import LearnerConfig, OptimizerState, update
from .local_search import LocalSearchConfig, MeteredObjective, refine, resolve_config
from .sampling import sample
from .tt import TTDistribution, random_distribution


@dataclass
class TesalocsConfig:
    budget: int = 10_000
    grid_nodes: int = 2**10
    rank: int = 5
    batch: int = 100
    elite: int = 10
    expected_outer_iterations: int = 20
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    local: LocalSearchConfig = field(default_factory=LocalSearchConfig)
    seed: int = 0

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be positive")
        if not 1 <= self.elite <= self.batch:
            raise ValueError("need 1 <= elite <= batch")
        if self.grid_nodes < 2 or self.rank < 1:
            raise ValueError("grid_nodes >= 2 and rank >= 1 required")


@dataclass
class RunTrace:
    """Per-iteration progress plus the final population winner."""

    rows: list  # (iteration, evaluations_used, best_value_so_far)
    best_point: np.ndarray | None
    best_value: float
    evaluations_used: int
    iterations: int
    degenerate_modes: int = 0
    final_model: TTDistribution | None = None


def run(f, space: SearchSpace, cfg: TesalocsConfig, vectorized: bool = False,
        keep_model: bool = False) -> RunTrace:
    """One full optimization run under the evaluation budget.

    Per iteration: draw ``batch`` multi-indices from the model, project them
    to points, refine, keep the ``elite`` best refined candidates, project
    those back to indices and take a learner step on them.  Stops the first
    time the spent budget reaches ``cfg.budget``.
    """
    d = space.ndim
    master = np.random.SeedSequence(cfg.seed)
    model_seed, sample_stream_seed, local_stream_seed = master.spawn(3)
    model = random_distribution(space.nodes, cfg.rank, np.random.default_rng(model_seed))
    sample_seeds = np.random.default_rng(sample_stream_seed)
    local_seeds = np.random.default_rng(local_stream_seed)

    local_cfg = resolve_config(
        cfg.local, (space.lower, space.upper), cfg.budget, cfg.batch, d,
        cfg.expected_outer_iterations,
    )
    metered = MeteredObjective(f, evaluation_cap=cfg.budget, vectorized=vectorized)
    opt_state = OptimizerState()

    rows = []
    best_point, best_value = None, np.inf
    degenerate = 0
    iteration = 0
    while metered.evaluations_used < cfg.budget:
        batch = sample(model, cfg.batch, int(sample_seeds.integers(2**63)))
        degenerate += batch.degenerate_modes
        starts = to_point(batch.indices, space)
        iter_cfg = replace(local_cfg, seed=int(local_seeds.integers(2**63)))
        result = refine(metered, starts, iter_cfg)
        if len(result) == 0:
            break
        order = np.argsort(result.values, kind="stable")
        top = order[: cfg.elite]
        if result.values[top[0]] < best_value:
            best_value = float(result.values[top[0]])
            best_point = result.refined_points[top[0]].copy()
        rows.append((iteration, metered.evaluations_used, best_value))
        elite_idx = to_index(result.refined_points[top], space)
        model = update(model, elite_idx, cfg.learner, opt_state)
        iteration += 1

    return RunTrace(
        rows=rows,
        best_point=best_point,
        best_value=best_value,
        evaluations_used=metered.evaluations_used,
        iterations=iteration,
        degenerate_modes=degenerate,
        final_model=model if keep_model else None,
    )


def run_baseline(f, space: SearchSpace, local: LocalSearchConfig, M: int, seed: int,
                 vectorized: bool = False) -> RunTrace:
    """Uniform-random restarts of the same local method under the same budget."""
    if M < 1:
        raise ValueError("budget must be positive")
    master = np.random.SeedSequence(seed)
    start_seed, local_stream_seed = master.spawn(2)
    starts_rng = np.random.default_rng(start_seed)
    local_seeds = np.random.default_rng(local_stream_seed)
    # ~20 restarts by default; a caller-fixed per-run cap passes through.
    local_cfg = resolve_config(local, (space.lower, space.upper), M, 1, space.ndim, 20)
    metered = MeteredObjective(f, evaluation_cap=M, vectorized=vectorized)

    rows = []
    best_point, best_value = None, np.inf
    round_idx = 0
    while metered.evaluations_used < M:
        x0 = starts_rng.uniform(space.lower, space.upper)
        iter_cfg = replace(local_cfg, seed=int(local_seeds.integers(2**63)))
        result = refine(metered, x0[None, :], iter_cfg)
        if len(result) == 0:
            break
        if result.values[0] < best_value:
            best_value = float(result.values[0])
            best_point = result.refined_points[0].copy()
        rows.append((round_idx, metered.evaluations_used, best_value))
        round_idx += 1

    return RunTrace(
        rows=rows,
        best_point=best_point,
        best_value=best_value,
        evaluations_used=metered.evaluations_used,
        iterations=round_idx,
    )
