"""Analytic benchmark functions with their standard boxes and known minima.

Each function accepts a single point of shape (d,) or a batch (m, d) and
reduces over the last axis.  Where the literature offers several variants
under one name, the formula used here is the one written in the docstring;
values at the known minimizer are validated by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid import SearchSpace


@dataclass(frozen=True)
class BenchmarkFunction:
    """An objective together with its default box and known optimum."""

    name: str
    evaluate: Callable
    _box: Callable[[int], tuple[float, float]]
    _fmin: Callable[[int], float]
    _xmin: Callable[[int], np.ndarray | None]
    landmarks: dict = field(default_factory=dict)

    def default_box(self, d: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self._box(d)
        return np.full(d, lo, dtype=np.float64), np.full(d, hi, dtype=np.float64)

    def minimum_value(self, d: int) -> float:
        return float(self._fmin(d))

    def minimizer(self, d: int) -> np.ndarray | None:
        x = self._xmin(d)
        return None if x is None else np.asarray(x, dtype=np.float64)

    def search_space(self, d: int, nodes: int) -> SearchSpace:
        lo, hi = self.default_box(d)
        return SearchSpace(lo, hi, np.full(d, nodes, dtype=np.int64))

    def __call__(self, x):
        return self.evaluate(x)


def _dim(x) -> int:
    return np.asarray(x).shape[-1]


def ackley(x):
    """-20 exp(-0.2 sqrt(mean x^2)) - exp(mean cos(2 pi x)) + 20 + e."""
    x = np.asarray(x, dtype=np.float64)
    d = _dim(x)
    radial = np.sqrt(np.square(x).sum(axis=-1) / d)
    return -20.0 * np.exp(-0.2 * radial) - np.exp(np.cos(2.0 * np.pi * x).sum(axis=-1) / d) + 20.0 + np.e


def alpine(x):
    """sum |x sin(x) + 0.1 x|."""
    x = np.asarray(x, dtype=np.float64)
    return np.abs(x * np.sin(x) + 0.1 * x).sum(axis=-1)


def chung(x):
    """Chung-Reynolds: (sum x^2)^2."""
    x = np.asarray(x, dtype=np.float64)
    return np.square(np.square(x).sum(axis=-1))


def dixon(x):
    """Dixon-Price: (x1 - 1)^2 + sum_i i (2 x_i^2 - x_{i-1})^2."""
    x = np.asarray(x, dtype=np.float64)
    i = np.arange(2, _dim(x) + 1, dtype=np.float64)
    head = np.square(x[..., 0] - 1.0)
    return head + (i * np.square(2.0 * np.square(x[..., 1:]) - x[..., :-1])).sum(axis=-1)


def _dixon_minimizer(d):
    i = np.arange(1, d + 1, dtype=np.float64)
    return 2.0 ** (2.0 ** (1.0 - i) - 1.0)


def exp_fn(x):
    """-exp(-0.5 sum x^2); minimum -1 at the origin."""
    x = np.asarray(x, dtype=np.float64)
    return -np.exp(-0.5 * np.square(x).sum(axis=-1))


def griewank(x):
    """sum x^2/4000 - prod cos(x_i / sqrt(i)) + 1."""
    x = np.asarray(x, dtype=np.float64)
    i = np.arange(1, _dim(x) + 1, dtype=np.float64)
    return np.square(x).sum(axis=-1) / 4000.0 - np.cos(x / np.sqrt(i)).prod(axis=-1) + 1.0


def pathological(x):
    """sum over neighbours of 0.5 + (sin^2 sqrt(100 x_i^2 + x_j^2) - 0.5) / (1 + 0.001 (x_i^2 - 2 x_i x_j + x_j^2)^2)."""
    x = np.asarray(x, dtype=np.float64)
    a, b = x[..., :-1], x[..., 1:]
    num = np.square(np.sin(np.sqrt(100.0 * np.square(a) + np.square(b)))) - 0.5
    den = 1.0 + 0.001 * np.square(np.square(a) - 2.0 * a * b + np.square(b))
    return (0.5 + num / den).sum(axis=-1)


def pinter(x):
    """sum i x_i^2 + sum 20 i sin^2(A) + sum i log10(1 + i B^2), cyclic neighbours.

    A = x_{i-1} sin x_i + sin x_{i+1};  B = x_{i-1}^2 - 2 x_i + 3 x_{i+1} - cos x_i + 1.
    """
    x = np.asarray(x, dtype=np.float64)
    i = np.arange(1, _dim(x) + 1, dtype=np.float64)
    prev_x = np.roll(x, 1, axis=-1)
    next_x = np.roll(x, -1, axis=-1)
    a = prev_x * np.sin(x) + np.sin(next_x)
    b = np.square(prev_x) - 2.0 * x + 3.0 * next_x - np.cos(x) + 1.0
    return (
        (i * np.square(x)).sum(axis=-1)
        + (20.0 * i * np.square(np.sin(a))).sum(axis=-1)
        + (i * np.log10(1.0 + i * np.square(b))).sum(axis=-1)
    )


def powell(x):
    """Powell sum: sum |x_i|^(i+1)."""
    x = np.asarray(x, dtype=np.float64)
    exponents = np.arange(2, _dim(x) + 2, dtype=np.float64)
    return np.power(np.abs(x), exponents).sum(axis=-1)


def qing(x):
    """sum (x_i^2 - i)^2."""
    x = np.asarray(x, dtype=np.float64)
    i = np.arange(1, _dim(x) + 1, dtype=np.float64)
    return np.square(np.square(x) - i).sum(axis=-1)


def rastrigin(x):
    """10 d + sum (x^2 - 10 cos(2 pi x))."""
    x = np.asarray(x, dtype=np.float64)
    return 10.0 * _dim(x) + (np.square(x) - 10.0 * np.cos(2.0 * np.pi * x)).sum(axis=-1)


def rosenbrock(x):
    """sum 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2."""
    x = np.asarray(x, dtype=np.float64)
    a, b = x[..., :-1], x[..., 1:]
    return (100.0 * np.square(b - np.square(a)) + np.square(1.0 - a)).sum(axis=-1)


def salomon(x):
    """1 - cos(2 pi ||x||) + 0.1 ||x||."""
    x = np.asarray(x, dtype=np.float64)
    norm = np.sqrt(np.square(x).sum(axis=-1))
    return 1.0 - np.cos(2.0 * np.pi * norm) + 0.1 * norm


def schaffer(x):
    """Chained Schaffer F6 over neighbouring pairs."""
    x = np.asarray(x, dtype=np.float64)
    ss = np.square(x[..., :-1]) + np.square(x[..., 1:])
    num = np.square(np.sin(np.sqrt(ss))) - 0.5
    den = np.square(1.0 + 0.001 * ss)
    return (0.5 + num / den).sum(axis=-1)


def sphere(x):
    """sum x^2."""
    x = np.asarray(x, dtype=np.float64)
    return np.square(x).sum(axis=-1)


def squares(x):
    """Sum-of-squares ellipsoid: sum i x_i^2."""
    x = np.asarray(x, dtype=np.float64)
    i = np.arange(1, _dim(x) + 1, dtype=np.float64)
    return (i * np.square(x)).sum(axis=-1)


def trid(x):
    """sum (x_i - 1)^2 - sum x_i x_{i-1}; minimum -d(d+4)(d-1)/6 at x_i = i(d+1-i)."""
    x = np.asarray(x, dtype=np.float64)
    return np.square(x - 1.0).sum(axis=-1) - (x[..., 1:] * x[..., :-1]).sum(axis=-1)


def trigonometric(x):
    """sum_i [d - sum_j cos x_j + i (1 - cos x_i - sin x_i)]^2 on [0, pi]."""
    x = np.asarray(x, dtype=np.float64)
    d = _dim(x)
    i = np.arange(1, d + 1, dtype=np.float64)
    c = np.cos(x)
    inner = d - c.sum(axis=-1, keepdims=True) + i * (1.0 - c - np.sin(x))
    return np.square(inner).sum(axis=-1)


def wavy(x):
    """1 - mean(cos(10 x) exp(-x^2 / 2))."""
    x = np.asarray(x, dtype=np.float64)
    return 1.0 - (np.cos(10.0 * x) * np.exp(-0.5 * np.square(x))).mean(axis=-1)


def yang(x):
    """(sum |x|) exp(-sum sin(x^2)); non-negative with minimum 0 at the origin."""
    x = np.asarray(x, dtype=np.float64)
    return np.abs(x).sum(axis=-1) * np.exp(-np.sin(np.square(x)).sum(axis=-1))


def _origin(d):
    return np.zeros(d)


def _make(name, fn, lo, hi, fmin=lambda d: 0.0, xmin=_origin, landmarks=None):
    return BenchmarkFunction(
        name=name,
        evaluate=fn,
        _box=lambda d: (lo, hi),
        _fmin=fmin,
        _xmin=xmin,
        landmarks=landmarks or {},
    )


_CATALOG = [
    _make("ackley", ackley, -32.768, 32.768),
    _make("alpine", alpine, -10.0, 10.0),
    _make("chung", chung, -10.0, 10.0),
    _make(
        "dixon", dixon, -10.0, 10.0, xmin=_dixon_minimizer,
        # Well-known secondary valley where descent methods flatline.
        landmarks={"local_minimum_plateau": 2.0 / 3.0},
    ),
    _make("exp", exp_fn, -1.0, 1.0, fmin=lambda d: -1.0),
    _make("griewank", griewank, -100.0, 100.0),
    _make("pathological", pathological, -100.0, 100.0),
    _make("pinter", pinter, -10.0, 10.0),
    _make("powell", powell, -1.0, 1.0),
    _make("qing", qing, -500.0, 500.0, xmin=lambda d: np.sqrt(np.arange(1, d + 1, dtype=np.float64))),
    _make("rastrigin", rastrigin, -5.12, 5.12),
    _make("rosenbrock", rosenbrock, -2.048, 2.048, xmin=lambda d: np.ones(d)),
    _make("salomon", salomon, -100.0, 100.0),
    _make("schaffer", schaffer, -100.0, 100.0),
    _make("sphere", sphere, -5.12, 5.12),
    _make("squares", squares, -10.0, 10.0),
]


def _trid_box(d):
    return (-float(d * d), float(d * d))


def _trid_fmin(d):
    return -d * (d + 4) * (d - 1) / 6.0


def _trid_xmin(d):
    i = np.arange(1, d + 1, dtype=np.float64)
    return i * (d + 1 - i)


_CATALOG += [
    BenchmarkFunction("trid", trid, _trid_box, _trid_fmin, _trid_xmin),
    _make("trigonometric", trigonometric, 0.0, np.pi),
    _make("wavy", wavy, -np.pi, np.pi),
    _make("yang", yang, -2.0 * np.pi, 2.0 * np.pi),
]

_REGISTRY = {fn.name: fn for fn in _CATALOG}
_STANDARD_NAMES = tuple(fn.name for fn in _CATALOG)


def catalog() -> list[BenchmarkFunction]:
    """The 20 standard benchmark functions, in table order."""
    return [_REGISTRY[name] for name in _STANDARD_NAMES]


def get(name: str) -> BenchmarkFunction:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown benchmark function {name!r}") from None


def register(fn: BenchmarkFunction) -> None:
    """Hook for custom functions: makes them addressable by name."""
    if fn.name in _REGISTRY:
        raise ValueError(f"function name {fn.name!r} already registered")
    _REGISTRY[fn.name] = fn
