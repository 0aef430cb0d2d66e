"""Tensor-train distribution: storage, evaluation and contraction primitives.

A distribution is a chain of non-negative 3-way cores; core ``i`` has shape
``(ranks[i], dims[i], ranks[i+1])`` with boundary ranks equal to one.  The
chain value at a multi-index is the matrix product of the corresponding
core slices, and the total mass is the full contraction over all indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels


class DegenerateModelError(RuntimeError):
    """The distribution has no mass left (total contraction is zero)."""


@dataclass(frozen=True)
class TTDistribution:
    """Non-negative tensor-train weights over a discrete grid.

    Treated as immutable: learning steps build a new instance instead of
    mutating cores in place, so concurrent readers are safe.
    """

    cores: tuple[np.ndarray, ...]
    dims: tuple[int, ...] = field(init=False)
    ranks: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        cores = tuple(np.asarray(c, dtype=np.float64) for c in self.cores)
        if not cores:
            raise ValueError("need at least one core")
        for i, core in enumerate(cores):
            if core.ndim != 3:
                raise ValueError(f"core {i} must be 3-way, got shape {core.shape}")
            if np.min(core) < 0.0:
                raise ValueError(f"core {i} contains negative entries")
        ranks = [c.shape[0] for c in cores] + [cores[-1].shape[2]]
        if ranks[0] != 1 or ranks[-1] != 1:
            raise ValueError("boundary ranks must be 1")
        for i in range(len(cores) - 1):
            if cores[i].shape[2] != cores[i + 1].shape[0]:
                raise ValueError(f"rank mismatch between cores {i} and {i + 1}")
        object.__setattr__(self, "cores", cores)
        object.__setattr__(self, "dims", tuple(c.shape[1] for c in cores))
        object.__setattr__(self, "ranks", tuple(ranks))

    @property
    def ndim(self) -> int:
        return len(self.cores)


def random_distribution(dims, rank: int, rng: np.random.Generator) -> TTDistribution:
    """Random TT with entries uniform on (0, 1] and the given interior rank."""
    dims = [int(n) for n in dims]
    d = len(dims)
    if d < 1:
        raise ValueError("need at least one dimension")
    if any(n < 2 for n in dims):
        raise ValueError("every mode needs at least 2 nodes")
    if rank < 1:
        raise ValueError("rank must be positive")
    ranks = [1] + [rank] * (d - 1) + [1]
    # 1 - U[0,1) is uniform on (0,1]: no index starts with zero weight.
    cores = [
        1.0 - rng.random((ranks[i], dims[i], ranks[i + 1])) for i in range(d)
    ]
    return TTDistribution(tuple(cores))


def init_random(d: int, n: int, r: int, seed: int) -> TTDistribution:
    """Random TT with d modes of n nodes each and interior rank r."""
    if d < 1 or n < 2 or r < 1:
        raise ValueError(f"invalid TT shape: d={d}, n={n}, r={r}")
    return random_distribution([n] * d, r, np.random.default_rng(seed))


def _check_index(t: TTDistribution, idx) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    if idx.shape != (t.ndim,):
        raise ValueError(f"multi-index must have length {t.ndim}")
    if np.any(idx < 0) or np.any(idx >= np.asarray(t.dims)):
        raise IndexError(f"multi-index {idx.tolist()} out of range for dims {t.dims}")
    return idx


def evaluate(t: TTDistribution, idx) -> float:
    """Chain value at one multi-index (raw product, no rescaling)."""
    idx = _check_index(t, idx)
    v = t.cores[0][:, idx[0], :]
    for i in range(1, t.ndim):
        v = v @ t.cores[i][:, idx[i], :]
    return float(v[0, 0])


def log_evaluate_many(t: TTDistribution, indices) -> np.ndarray:
    """Scale-safe log chain values for a (k, d) array of multi-indices."""
    return kernels.log_eval_many(t.cores, indices)


def suffix_interfaces(t: TTDistribution) -> list[np.ndarray]:
    """Raw suffix contractions: S[d] = [1], S[i-1] = (sum over mode of core i) @ S[i].

    Exact (unscaled); on deep chains with extreme entries this can
    over/underflow, in which case use :func:`scaled_suffix_interfaces`.
    """
    out = [np.ones(1)]
    for core in reversed(t.cores):
        out.append(core.sum(axis=1) @ out[-1])
    out.reverse()
    return out


def scaled_suffix_interfaces(t: TTDistribution):
    """Suffix interfaces as (unit-max vectors, per-position log scales)."""
    d = t.ndim
    units = [None] * (d + 1)
    logs = np.zeros(d + 1)
    units[d] = np.ones(1)
    for i in range(d - 1, -1, -1):
        v = t.cores[i].sum(axis=1) @ units[i + 1]
        m = float(v.max())
        if m <= 0.0:
            raise DegenerateModelError(f"zero mass under mode {i}")
        units[i] = v / m
        logs[i] = logs[i + 1] + np.log(m)
    return units, logs


def log_mass(t: TTDistribution) -> float:
    """log of the total mass; raises DegenerateModelError when the mass is zero."""
    units, logs = scaled_suffix_interfaces(t)
    return float(logs[0] + np.log(units[0][0]))


def mass(t: TTDistribution) -> float:
    """Total mass Z = sum of the chain value over every multi-index.

    Computed by mode-summed contraction in O(d n r^2).  The returned float
    can overflow to inf on very deep chains; the log is always finite.
    """
    try:
        return float(np.exp(log_mass(t)))
    except DegenerateModelError:
        raise DegenerateModelError("total mass underflowed to zero") from None


def save_checkpoint(t: TTDistribution, path) -> None:
    """Write cores to JSON as (shape, row-major values) records."""
    payload = {
        "format": "tt-checkpoint-v1",
        "dims": list(t.dims),
        "ranks": list(t.ranks),
        "cores": [
            {"shape": list(c.shape), "values": c.ravel(order="C").tolist()}
            for c in t.cores
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_checkpoint(path) -> TTDistribution:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format") != "tt-checkpoint-v1":
        raise ValueError("not a TT checkpoint file")
    cores = [
        np.asarray(rec["values"], dtype=np.float64).reshape(rec["shape"], order="C")
        for rec in payload["cores"]
    ]
    return TTDistribution(tuple(cores))
