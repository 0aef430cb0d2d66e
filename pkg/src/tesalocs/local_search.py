"""Budget-metered objective wrapper and pluggable local refinement methods.

Every scalar evaluation of the target, finite-difference probes included,
counts against the budget.  Refinement methods stop on their own
convergence test, on the per-run evaluation cap, or when the global budget
runs out, whichever comes first; partial results are always kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

METHODS = ("bfgs", "cg", "pso", "spsa", "none")


class BudgetExhaustedError(RuntimeError):
    """The metered objective refused an evaluation: the cap is spent."""


class MeteredObjective:
    """Counts every scalar evaluation of the wrapped objective.

    With ``vectorized=True`` the target is assumed to accept an (m, d)
    array and return m values in one call; the counter still advances by m.
    """

    def __init__(self, target, evaluation_cap: int | None = None, vectorized: bool = False):
        self.target = target
        self.evaluation_cap = evaluation_cap
        self.vectorized = vectorized
        self.evaluations_used = 0

    @property
    def remaining(self) -> float:
        if self.evaluation_cap is None:
            return math.inf
        return self.evaluation_cap - self.evaluations_used

    def __call__(self, x) -> float:
        if self.remaining < 1:
            raise BudgetExhaustedError(f"evaluation cap {self.evaluation_cap} reached")
        self.evaluations_used += 1
        return float(self.target(np.asarray(x, dtype=np.float64)))

    def eval_many(self, points) -> np.ndarray:
        """Evaluate a whole (m, d) batch; raises before consuming anything
        if the batch does not fit in the remaining budget."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        m = points.shape[0]
        if self.remaining < m:
            raise BudgetExhaustedError(
                f"batch of {m} exceeds remaining budget {self.remaining}"
            )
        self.evaluations_used += m
        if self.vectorized:
            return np.asarray(self.target(points), dtype=np.float64).reshape(m)
        return np.array([float(self.target(p)) for p in points])


@dataclass
class LocalSearchConfig:
    """Method choice plus every numeric knob of the refiners.

    ``max_evals_per_candidate=None`` means no per-run cap (the global budget
    still applies); ``refine_top=None`` runs the method from every start,
    an integer j screens all starts first and refines only the j best.
    """

    method: str = "bfgs"
    max_evals_per_candidate: int | None = None
    refine_top: int | None = None
    fd_step: float = 1e-6
    gradient_tol: float = 1e-8
    value_tol: float = 1e-12
    armijo_c1: float = 1e-4
    backtrack_factor: float = 0.5
    max_backtracks: int = 30
    swarm_size: int = 10
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    init_radius: float = 0.1
    spsa_step_scale: float = 0.1
    spsa_probe_scale: float = 0.01
    spsa_step_exponent: float = 0.602
    spsa_probe_exponent: float = 0.101
    bounds: tuple | None = None
    seed: int = 0
    record_history: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        for name in (
            "fd_step", "gradient_tol", "value_tol", "armijo_c1",
            "backtrack_factor", "inertia", "cognitive", "social",
            "init_radius", "spsa_step_scale", "spsa_probe_scale",
            "spsa_step_exponent", "spsa_probe_exponent",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.max_backtracks < 1 or self.swarm_size < 2:
            raise ValueError("max_backtracks >= 1 and swarm_size >= 2 required")


@dataclass
class LocalSearchResult:
    refined_points: np.ndarray
    values: np.ndarray
    evals_spent: int
    histories: list | None = None

    def __len__(self) -> int:
        return self.values.shape[0]


def numerical_gradient(f: MeteredObjective, x, fd_step: float) -> np.ndarray:
    """Central differences with per-component step fd_step * max(1, |x_i|).

    Consumes exactly 2d evaluations; raises BudgetExhaustedError upfront
    (without consuming) when they do not fit.
    """
    x = np.asarray(x, dtype=np.float64)
    d = x.size
    if f.remaining < 2 * d:
        raise BudgetExhaustedError("not enough budget for a gradient")
    h = fd_step * np.maximum(1.0, np.abs(x))
    probes = np.repeat(x[None, :], 2 * d, axis=0)
    rows = np.arange(d)
    probes[2 * rows, rows] += h
    probes[2 * rows + 1, rows] -= h
    y = f.eval_many(probes)
    return (y[0::2] - y[1::2]) / (2.0 * h)


class _RunBudget:
    """Per-run allowance on top of the shared global meter."""

    def __init__(self, f: MeteredObjective, cap: int | None):
        self.f = f
        self.start = f.evaluations_used
        self.cap = math.inf if cap is None else cap

    @property
    def spent(self) -> int:
        return self.f.evaluations_used - self.start

    def fits(self, n: int) -> bool:
        return self.spent + n <= self.cap and self.f.remaining >= n


def _armijo(f, budget, x, fx, direction, slope, cfg):
    """Backtracking line search with quadratic interpolation.

    Returns (x_new, f_new, alpha) or None when no acceptable step was found
    within max_backtracks or the budget.
    """
    alpha = 1.0
    for _ in range(cfg.max_backtracks):
        if not budget.fits(1):
            return None
        trial = x + alpha * direction
        f_trial = f(trial)
        if math.isfinite(f_trial) and f_trial <= fx + cfg.armijo_c1 * alpha * slope:
            return trial, f_trial, alpha
        if math.isfinite(f_trial):
            # Minimizer of the quadratic through (0, fx), slope, (alpha, f_trial);
            # safeguarded into [0.1, 0.9] of the rejected step.
            denom = 2.0 * (f_trial - fx - slope * alpha)
            cand = -slope * alpha * alpha / denom if denom > 0 else math.inf
            alpha = min(max(cand, 0.1 * alpha), 0.9 * alpha)
        else:
            alpha *= cfg.backtrack_factor
    return None


def _run_bfgs(f, x0, f0, cfg, budget, rng):
    x, fx = np.asarray(x0, dtype=np.float64), f0
    d = x.size
    history = [fx]
    eye = np.eye(d)
    h_inv = eye.copy()
    grad = None
    try:
        if not budget.fits(2 * d):
            return x, fx, history
        grad = numerical_gradient(f, x, cfg.fd_step)
        while True:
            gnorm = float(np.linalg.norm(grad))
            if gnorm < cfg.gradient_tol:
                break
            direction = -h_inv @ grad
            slope = float(direction @ grad)
            if slope >= 0.0:
                h_inv = eye.copy()
                direction = -grad
                slope = -gnorm * gnorm
            step = _armijo(f, budget, x, fx, direction, slope, cfg)
            if step is None:
                break
            x_new, f_new, _ = step
            history.append(f_new)
            converged = abs(fx - f_new) <= cfg.value_tol * max(1.0, abs(fx))
            if converged or not budget.fits(2 * d):
                x, fx = x_new, f_new
                break
            grad_new = numerical_gradient(f, x_new, cfg.fd_step)
            s = x_new - x
            y = grad_new - grad
            sy = float(s @ y)
            if sy > 1e-10 * np.linalg.norm(s) * np.linalg.norm(y):
                rho = 1.0 / sy
                left = eye - rho * np.outer(s, y)
                h_inv = left @ h_inv @ left.T + rho * np.outer(s, s)
            x, fx, grad = x_new, f_new, grad_new
    except BudgetExhaustedError:
        pass
    return x, fx, history


def _run_cg(f, x0, f0, cfg, budget, rng):
    x, fx = np.asarray(x0, dtype=np.float64), f0
    d = x.size
    history = [fx]
    try:
        if not budget.fits(2 * d):
            return x, fx, history
        grad = numerical_gradient(f, x, cfg.fd_step)
        direction = -grad
        while True:
            gg = float(grad @ grad)
            if math.sqrt(gg) < cfg.gradient_tol:
                break
            slope = float(direction @ grad)
            if slope >= 0.0:  # restart on a non-descent direction
                direction = -grad
                slope = -gg
            step = _armijo(f, budget, x, fx, direction, slope, cfg)
            if step is None:
                break
            x_new, f_new, _ = step
            history.append(f_new)
            converged = abs(fx - f_new) <= cfg.value_tol * max(1.0, abs(fx))
            if converged or not budget.fits(2 * d):
                x, fx = x_new, f_new
                break
            grad_new = numerical_gradient(f, x_new, cfg.fd_step)
            beta = max(0.0, float(grad_new @ (grad_new - grad)) / gg)  # Polak-Ribiere+
            direction = -grad_new + beta * direction
            x, fx, grad = x_new, f_new, grad_new
    except BudgetExhaustedError:
        pass
    return x, fx, history


def _run_pso(f, x0, f0, cfg, budget, rng):
    lower, upper = cfg.bounds
    x0 = np.asarray(x0, dtype=np.float64)
    d = x0.size
    span = upper - lower
    radius = cfg.init_radius * span
    swarm = np.clip(
        x0 + rng.uniform(-radius, radius, size=(cfg.swarm_size, d)), lower, upper
    )
    swarm[0] = x0
    velocity = np.zeros_like(swarm)
    best_x, best_f = x0.copy(), f0
    history = [f0]

    def eval_swarm(points):
        n_fit = int(min(len(points), budget.cap - budget.spent, f.remaining))
        if n_fit <= 0:
            raise BudgetExhaustedError("no budget left for the swarm")
        return f.eval_many(points[:n_fit]), n_fit

    try:
        values, n = eval_swarm(swarm)
        pbest_x = swarm[:n].copy()
        pbest_f = values.copy()
        while True:
            i_best = int(np.argmin(pbest_f))
            if pbest_f[i_best] < best_f:
                best_x, best_f = pbest_x[i_best].copy(), float(pbest_f[i_best])
                history.append(best_f)
            if not budget.fits(1):
                break
            r_cog = rng.random(pbest_x.shape)
            r_soc = rng.random(pbest_x.shape)
            velocity = (
                cfg.inertia * velocity[: len(pbest_x)]
                + cfg.cognitive * r_cog * (pbest_x - swarm[: len(pbest_x)])
                + cfg.social * r_soc * (pbest_x[i_best] - swarm[: len(pbest_x)])
            )
            swarm = np.clip(swarm[: len(pbest_x)] + velocity, lower, upper)
            values, n = eval_swarm(swarm)
            improved = values < pbest_f[:n]
            pbest_x[:n][improved] = swarm[:n][improved]
            pbest_f[:n][improved] = values[improved]
    except BudgetExhaustedError:
        pass
    return best_x, best_f, history


def _run_spsa(f, x0, f0, cfg, budget, rng):
    lower, upper = cfg.bounds
    x = np.asarray(x0, dtype=np.float64).copy()
    d = x.size
    span = upper - lower
    best_x, best_f = x.copy(), f0
    history = [f0]
    expected_iters = max(1.0, (budget.cap if math.isfinite(budget.cap) else 1000) / 2.0)
    stability = 0.1 * expected_iters
    k = 0
    try:
        while budget.fits(2):
            a_k = cfg.spsa_step_scale / (k + 1.0 + stability) ** cfg.spsa_step_exponent
            c_k = cfg.spsa_probe_scale / (k + 1.0) ** cfg.spsa_probe_exponent
            delta = rng.choice([-1.0, 1.0], size=d)
            x_plus = np.clip(x + c_k * span * delta, lower, upper)
            x_minus = np.clip(x - c_k * span * delta, lower, upper)
            y_plus = f(x_plus)
            y_minus = f(x_minus)
            for xi, yi in ((x_plus, y_plus), (x_minus, y_minus)):
                if math.isfinite(yi) and yi < best_f:
                    best_x, best_f = xi.copy(), float(yi)
                    history.append(best_f)
            if not (math.isfinite(y_plus) and math.isfinite(y_minus)):
                break
            # Gradient estimate in box-normalized coordinates; the move per
            # iteration is clipped to a quarter of the box to survive wildly
            # scaled objectives.
            g_hat = (y_plus - y_minus) / (2.0 * c_k * delta)
            move = np.clip(a_k * g_hat, -0.25, 0.25) * span
            x = np.clip(x - move, lower, upper)
            k += 1
    except BudgetExhaustedError:
        pass
    return best_x, best_f, history


_RUNNERS = {"bfgs": _run_bfgs, "cg": _run_cg, "pso": _run_pso, "spsa": _run_spsa}


def refine(f: MeteredObjective, starts, cfg: LocalSearchConfig) -> LocalSearchResult:
    """Refine a batch of starting points with the configured method.

    Every start is first evaluated once (this screen is the whole result
    for method "none").  The method then runs from the ``refine_top`` best
    starts (all of them when None), each under the per-run cap.  When the
    global budget dies mid-batch, the completed part is returned.
    """
    starts = np.atleast_2d(np.asarray(starts, dtype=np.float64))
    if starts.shape[0] < 1:
        raise ValueError("need at least one starting point")
    if cfg.bounds is not None:
        starts = np.clip(starts, cfg.bounds[0], cfg.bounds[1])
    elif cfg.method in ("pso", "spsa"):
        raise ValueError(f"method {cfg.method!r} requires cfg.bounds")

    used_at_entry = f.evaluations_used
    n_screen = int(min(starts.shape[0], f.remaining))
    points = starts[:n_screen].copy()
    values = f.eval_many(points) if n_screen else np.empty(0)
    values = np.where(np.isfinite(values), values, np.inf)
    histories = [None] * n_screen if cfg.record_history else None

    if cfg.method != "none" and n_screen:
        order = np.argsort(values, kind="stable")
        if cfg.refine_top is not None:
            order = order[: cfg.refine_top]
        runner = _RUNNERS[cfg.method]
        for run_id, idx in enumerate(order):
            if f.remaining < 1:
                break
            budget = _RunBudget(f, cfg.max_evals_per_candidate)
            rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, run_id)))
            x_best, f_best, history = runner(
                f, points[idx], float(values[idx]), cfg, budget, rng
            )
            if f_best <= values[idx]:
                points[idx] = x_best
                values[idx] = f_best
            if histories is not None:
                histories[idx] = history

    return LocalSearchResult(
        refined_points=points,
        values=values,
        evals_spent=f.evaluations_used - used_at_entry,
        histories=histories,
    )


def resolve_config(
    cfg: LocalSearchConfig,
    bounds,
    budget: int,
    batch: int,
    dim: int,
    expected_iterations: int,
) -> LocalSearchConfig:
    """Fill budget-aware defaults: bounds, refine_top and the per-run cap.

    The cap splits the budget so that roughly ``expected_iterations``
    outer iterations fit: each costs the batch screen plus ``refine_top``
    capped runs.  A floor of one gradient plus a few line-search probes
    (2d + 8) keeps gradient methods able to move.
    """
    out = replace(cfg)
    if out.bounds is None:
        out.bounds = (np.asarray(bounds[0], dtype=np.float64),
                      np.asarray(bounds[1], dtype=np.float64))
    if out.method == "none":
        return out
    if out.refine_top is None:
        out.refine_top = 1
    if out.max_evals_per_candidate is None:
        per_iteration = max(budget // max(expected_iterations, 1), batch + 1)
        cap = (per_iteration - batch) // max(out.refine_top, 1)
        out.max_evals_per_candidate = max(cap, 2 * dim + 8)
    return out
