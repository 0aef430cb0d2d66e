"""Search space and the affine maps between grid multi-indices and points."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SearchSpace:
    """Box [lower, upper] discretized with ``nodes`` points per dimension."""

    lower: np.ndarray
    upper: np.ndarray
    nodes: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=np.float64))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=np.float64))
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=np.int64))
        if not (lower.shape == upper.shape == nodes.shape):
            raise ValueError("lower, upper and nodes must have matching shapes")
        if np.any(lower >= upper):
            raise ValueError("need lower < upper in every dimension")
        if np.any(nodes < 2):
            raise ValueError("need at least 2 nodes per dimension")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "nodes", nodes)

    @property
    def ndim(self) -> int:
        return self.lower.size

    @classmethod
    def uniform(cls, d: int, lower: float, upper: float, nodes: int) -> "SearchSpace":
        return cls(np.full(d, lower), np.full(d, upper), np.full(d, nodes))


def to_point(idx, space: SearchSpace) -> np.ndarray:
    """Map multi-indices (last axis = dimension) to points on the grid."""
    idx = np.asarray(idx)
    if np.any(idx < 0) or np.any(idx > space.nodes - 1):
        raise IndexError("multi-index outside the grid")
    span = space.upper - space.lower
    return idx / (space.nodes - 1) * span + space.lower


def to_index(x, space: SearchSpace) -> np.ndarray:
    """Map points to the nearest grid multi-index (round half to even, clamped).

    Total on any finite input: off-grid and out-of-box points produced by
    local search are snapped back to a valid index.
    """
    x = np.asarray(x, dtype=np.float64)
    span = space.upper - space.lower
    c = (x - space.lower) / span * (space.nodes - 1)
    # clamp before the integer cast: huge off-box points must not overflow
    c = np.clip(np.rint(c), 0, space.nodes - 1)
    return c.astype(np.int64)
