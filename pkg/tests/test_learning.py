import itertools

import numpy as np
import pytest

from tesalocs import (
    LearnerConfig,
    TTDistribution,
    evaluate,
    grad_cores,
    init_random,
    log_prob,
    mass,
    neg_log_likelihood,
    update,
)
from tesalocs.learning import OptimizerState


def fd_loss_gradient(t, elites, rel_step=1e-6):
    """Oracle: central finite differences of the loss w.r.t. every core entry."""
    grads = []
    for ci, core in enumerate(t.cores):
        g = np.zeros_like(core)
        for pos in np.ndindex(core.shape):
            h = rel_step * max(1.0, abs(core[pos]))
            plus = [c.copy() for c in t.cores]
            plus[ci][pos] += h
            minus = [c.copy() for c in t.cores]
            minus[ci][pos] -= h
            g[pos] = (
                neg_log_likelihood(TTDistribution(tuple(plus)), elites)
                - neg_log_likelihood(TTDistribution(tuple(minus)), elites)
            ) / (2.0 * h)
        grads.append(g)
    return grads


def uniform_tt(dims):
    ranks = [1] * (len(dims) + 1)
    return TTDistribution(
        tuple(np.ones((ranks[i], n, ranks[i + 1])) for i, n in enumerate(dims))
    )


class TestLogProb:
    def test_uniform_tensor(self):
        t = uniform_tt([3, 3])
        for idx in itertools.product(range(3), repeat=2):
            assert log_prob(t, idx) == pytest.approx(np.log(1.0 / 9.0), rel=1e-12)

    def test_point_mass_certainty(self):
        core = np.zeros((1, 4, 1))
        core[0, 2, 0] = 1.0
        t = TTDistribution((core,))
        assert log_prob(t, [2]) == pytest.approx(0.0, abs=1e-12)

    def test_probabilities_sum_to_one(self):
        t = init_random(3, 3, 2, seed=31)
        total = sum(
            np.exp(log_prob(t, idx))
            for idx in itertools.product(range(3), repeat=3)
        )
        assert total == pytest.approx(1.0, abs=1e-8)


class TestNegLogLikelihood:
    def test_single_elite_uniform(self):
        t = uniform_tt([4])
        assert neg_log_likelihood(t, [[1]]) == pytest.approx(np.log(4.0))

    def test_duplicates_count_twice(self):
        t = init_random(3, 4, 2, seed=1)
        single = neg_log_likelihood(t, [[0, 1, 2]])
        double = neg_log_likelihood(t, [[0, 1, 2], [0, 1, 2]])
        assert double == pytest.approx(2.0 * single, rel=1e-12)

    def test_matches_enumeration(self):
        t = init_random(3, 3, 2, seed=5)
        elites = [[0, 1, 2], [2, 2, 0], [1, 0, 1]]
        z = mass(t)
        expected = -sum(np.log(evaluate(t, e) / z) for e in elites)
        assert neg_log_likelihood(t, elites) == pytest.approx(expected, rel=1e-10)

    def test_rejects_empty(self):
        t = init_random(2, 3, 1, seed=0)
        with pytest.raises(ValueError):
            neg_log_likelihood(t, [])


class TestGradCores:
    def test_single_mode_analytic(self):
        # all-ones single core: d loss / d entry_j = 1/N - [j = m]
        n = 5
        t = uniform_tt([n])
        g = grad_cores(t, [[2]])[0][0, :, 0]
        expected = np.full(n, 1.0 / n)
        expected[2] -= 1.0
        np.testing.assert_allclose(g, expected, rtol=1e-12)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 5))
        n = int(rng.integers(2, 5))
        r = int(rng.integers(1, 4))
        t = init_random(d, n, r, seed=seed + 100)
        elites = rng.integers(0, n, size=(3, d))
        analytic = grad_cores(t, elites)
        numeric = fd_loss_gradient(t, elites)
        for a, b in zip(analytic, numeric):
            scale = np.maximum(np.abs(a), np.abs(b))
            scale[scale < 1e-8] = 1.0
            assert np.max(np.abs(a - b) / scale) < 1e-5

    def test_scale_invariance_directional_derivative(self):
        # loss is invariant to scaling a core, so grad . core == 0 per core
        t = init_random(4, 3, 2, seed=9)
        elites = [[0, 1, 2, 1], [2, 0, 1, 2]]
        grads = grad_cores(t, elites)
        for g, core in zip(grads, t.cores):
            assert abs(np.sum(g * core)) < 1e-8


class TestUpdate:
    def test_zero_learning_rate_bitwise_stable(self):
        t = init_random(3, 4, 2, seed=3)
        for kind in ("plain-sgd", "adaptive-moment"):
            cfg = LearnerConfig(learning_rate=0.0, optimizer_kind=kind)
            t2 = update(t, [[0, 1, 2]], cfg)
            for a, b in zip(t.cores, t2.cores):
                np.testing.assert_array_equal(a, b)

    def test_single_step_raises_elite_weight(self):
        t = uniform_tt([6])
        cfg = LearnerConfig(learning_rate=0.1, optimizer_kind="plain-sgd")
        t2 = update(t, [[4]], cfg)
        w = t2.cores[0][0, :, 0]
        assert w[4] / w.sum() > 1.0 / 6.0

    def test_argmax_probability_grows_monotonically(self):
        t = init_random(2, 4, 2, seed=12)
        flat = np.array(
            [evaluate(t, idx) for idx in itertools.product(range(4), repeat=2)]
        )
        best = list(itertools.product(range(4), repeat=2))[int(np.argmax(flat))]
        cfg = LearnerConfig(learning_rate=0.02, optimizer_kind="plain-sgd")
        probs = []
        for _ in range(50):
            probs.append(np.exp(log_prob(t, best)))
            t = update(t, [best], cfg)
        probs.append(np.exp(log_prob(t, best)))
        diffs = np.diff(probs)
        assert np.all(diffs > -1e-12)
        assert probs[-1] > probs[0]

    def test_loss_decreases_under_sgd(self):
        t = init_random(3, 4, 2, seed=8)
        elites = [[0, 1, 2], [3, 2, 1], [0, 0, 0]]
        cfg = LearnerConfig(learning_rate=0.01, optimizer_kind="plain-sgd")
        losses = [neg_log_likelihood(t, elites)]
        for _ in range(10):
            t = update(t, elites, cfg)
            losses.append(neg_log_likelihood(t, elites))
        decreases = sum(b < a for a, b in zip(losses, losses[1:]))
        assert decreases >= 9

    def test_clamping_keeps_invariants(self):
        t = init_random(3, 3, 2, seed=4)
        cfg = LearnerConfig(learning_rate=5.0, optimizer_kind="plain-sgd",
                            clamp_floor=1e-12)
        for _ in range(5):
            t = update(t, [[0, 0, 0]], cfg)
        for core in t.cores:
            assert np.min(core) >= 1e-12
        assert mass(t) > 0.0

    def test_adaptive_state_persists(self):
        t = init_random(3, 4, 2, seed=6)
        cfg = LearnerConfig(learning_rate=0.05)
        state = OptimizerState()
        update(t, [[1, 1, 1]], cfg, state)
        assert state.step == 1
        update(t, [[1, 1, 1]], cfg, state)
        assert state.step == 2

    def test_non_finite_gradient_is_model_corruption(self):
        from tesalocs import ModelCorruptionError

        core = np.ones((1, 3, 1))
        core[0, 0, 0] = np.inf
        t = TTDistribution((core, np.ones((1, 3, 1))))
        with pytest.raises(ModelCorruptionError):
            update(t, [[0, 0]], LearnerConfig(optimizer_kind="plain-sgd"))
