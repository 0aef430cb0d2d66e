"""Log-likelihood loss over elite multi-indices and core update steps.

The loss is the negative sum of log probabilities of the elites under the
normalized TT model.  Its gradient w.r.t. core i splits into a mass term
(outer product of the mode-summed prefix/suffix interfaces over the
normalizer) and a per-elite term (outer product of the left/right partial
chain products over the chain value); both are computed with unit-max
normalized interfaces so the scale factors cancel exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .tt import DegenerateModelError, TTDistribution, log_mass

LOG_FLOOR = np.log(1e-300)

_OPTIMIZERS = ("plain-sgd", "adaptive-moment")


class ModelCorruptionError(RuntimeError):
    """A gradient or update produced non-finite core entries."""


@dataclass
class LearnerConfig:
    learning_rate: float = 0.05
    steps_per_iteration: int = 1
    clamp_floor: float = 1e-12
    optimizer_kind: str = "adaptive-moment"

    def __post_init__(self):
        if self.learning_rate < 0.0:
            raise ValueError("learning_rate must be non-negative")
        if self.steps_per_iteration < 1:
            raise ValueError("steps_per_iteration must be positive")
        if not 0.0 < self.clamp_floor < 1.0:
            raise ValueError("clamp_floor must be in (0, 1)")
        if self.optimizer_kind not in _OPTIMIZERS:
            raise ValueError(f"optimizer_kind must be one of {_OPTIMIZERS}")


def log_prob(t: TTDistribution, idx) -> float:
    """log of the normalized model probability at one multi-index."""
    idx = np.asarray(idx, dtype=np.int64).reshape(1, -1)
    log_value = float(kernels.log_eval_many(t.cores, idx)[0])
    return max(log_value, LOG_FLOOR) - log_mass(t)


def neg_log_likelihood(t: TTDistribution, elites) -> float:
    """Negative sum of elite log probabilities; duplicates count multiply."""
    elites = _as_elites(t, elites)
    log_values = kernels.log_eval_many(t.cores, elites)
    log_values = np.maximum(log_values, LOG_FLOOR)
    return float(elites.shape[0] * log_mass(t) - log_values.sum())


def _as_elites(t: TTDistribution, elites) -> np.ndarray:
    elites = np.asarray(elites, dtype=np.int64)
    if elites.ndim == 1:
        elites = elites.reshape(1, -1)
    if elites.size == 0:
        raise ValueError("elite set must be non-empty")
    if elites.shape[1] != t.ndim:
        raise ValueError(f"elite indices must have length {t.ndim}")
    if np.any(elites < 0) or np.any(elites >= np.asarray(t.dims)):
        raise IndexError("elite multi-index out of range")
    return elites


def _unit(v: np.ndarray, axis=None) -> np.ndarray:
    m = v.max(axis=axis, keepdims=axis is not None)
    m = np.where(m > 0.0, m, 1.0)
    return v / m


def grad_cores(t: TTDistribution, elites) -> list[np.ndarray]:
    """Analytic gradient of the loss w.r.t. every core.

    Non-finite core entries propagate into the result (update() turns them
    into ModelCorruptionError), so intermediate inf/inf noise is silenced.
    """
    with np.errstate(invalid="ignore", over="ignore"):
        return _grad_cores(t, elites)


def _grad_cores(t: TTDistribution, elites) -> list[np.ndarray]:
    elites = _as_elites(t, elites)
    cores = t.cores
    d = t.ndim
    n_elites = elites.shape[0]

    # Mode-summed prefix/suffix interfaces (unit-max normalized).
    mode_sums = [c.sum(axis=1) for c in cores]
    prefix = [np.ones(1)]
    for i in range(d - 1):
        prefix.append(_unit(prefix[i] @ mode_sums[i]))
    suffix = [np.ones(1)] * (d + 1)
    for i in range(d - 1, -1, -1):
        suffix[i] = _unit(mode_sums[i] @ suffix[i + 1])

    # Per-elite partial chain products at the elite indices.
    slices = [np.swapaxes(cores[i][:, elites[:, i], :], 0, 1) for i in range(d)]  # (E, r, q)
    left = [None] * d
    v = np.ones((n_elites, 1))
    for i in range(d):
        left[i] = v
        v = _unit(np.einsum("er,erq->eq", v, slices[i]), axis=1)
    right = [None] * d
    v = np.ones((n_elites, 1))
    for i in range(d - 1, -1, -1):
        right[i] = v
        v = _unit(np.einsum("erq,eq->er", slices[i], v), axis=1)

    grads = []
    for i in range(d):
        mass_denom = float(prefix[i] @ mode_sums[i] @ suffix[i + 1])
        if mass_denom <= 0.0:
            raise DegenerateModelError("zero normalizer during gradient")
        z_part = np.outer(prefix[i], suffix[i + 1]) / mass_denom
        grad = np.broadcast_to(
            n_elites * z_part[:, None, :], cores[i].shape
        ).copy()

        denom = np.einsum("er,erq,eq->e", left[i], slices[i], right[i])
        if np.any(denom <= 0.0):
            raise DegenerateModelError("zero chain value at an elite index")
        contrib = left[i][:, :, None] * right[i][:, None, :] / denom[:, None, None]
        grad_by_mode = np.swapaxes(grad, 0, 1)  # view (N, r, q)
        np.add.at(grad_by_mode, elites[:, i], -contrib)
        grads.append(grad)
    return grads


@dataclass
class OptimizerState:
    """Adaptive-moment accumulators, persisted across outer iterations."""

    step: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)


def update(
    t: TTDistribution,
    elites,
    cfg: LearnerConfig,
    state: OptimizerState | None = None,
) -> TTDistribution:
    """Descend the loss for cfg.steps_per_iteration steps and clamp cores.

    With optimizer_kind "adaptive-moment", pass the same ``state`` on every
    call to keep the moment estimates across outer iterations; a fresh state
    is created (and discarded) otherwise.
    """
    elites = _as_elites(t, elites)
    adaptive = cfg.optimizer_kind == "adaptive-moment"
    if adaptive and state is None:
        state = OptimizerState()
    if adaptive and not state.m:
        state.m = [np.zeros_like(c) for c in t.cores]
        state.v = [np.zeros_like(c) for c in t.cores]

    beta1, beta2, eps = 0.9, 0.999, 1e-8
    cores = list(t.cores)
    for _ in range(cfg.steps_per_iteration):
        grads = grad_cores(TTDistribution(tuple(cores)), elites)
        if not all(np.all(np.isfinite(g)) for g in grads):
            raise ModelCorruptionError("non-finite gradient")
        if adaptive:
            state.step += 1
            bc1 = 1.0 - beta1**state.step
            bc2 = 1.0 - beta2**state.step
            for i, g in enumerate(grads):
                m, v = state.m[i], state.v[i]
                m *= beta1
                m += (1.0 - beta1) * g
                np.square(g, out=g)  # g is not reused below
                v *= beta2
                v += (1.0 - beta2) * g
                denom = np.sqrt(v / bc2)
                denom += eps
                step = (cfg.learning_rate / bc1) * m
                step /= denom
                cores[i] = np.maximum(cores[i] - step, cfg.clamp_floor)
        else:
            for i, g in enumerate(grads):
                cores[i] = np.maximum(cores[i] - cfg.learning_rate * g, cfg.clamp_floor)
    return TTDistribution(tuple(cores))
