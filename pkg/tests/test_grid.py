import itertools

import numpy as np
import pytest

from tesalocs import SearchSpace, to_index, to_point


def random_space(rng, max_dim=8, max_nodes=64):
    d = int(rng.integers(1, max_dim + 1))
    lower = rng.uniform(-100, 100, size=d)
    upper = lower + rng.uniform(0.1, 50, size=d)
    nodes = rng.integers(2, max_nodes + 1, size=d)
    return SearchSpace(lower, upper, nodes)


class TestSearchSpace:
    def test_rejects_inverted_bounds(self):
        with pytest.raises(ValueError):
            SearchSpace([0.0, 1.0], [1.0, 0.5], [4, 4])

    def test_rejects_single_node(self):
        with pytest.raises(ValueError):
            SearchSpace([0.0], [1.0], [1])


class TestToPoint:
    def test_endpoints(self):
        space = SearchSpace([-5.0], [5.0], [11])
        assert to_point([0], space)[0] == -5.0
        assert to_point([10], space)[0] == 5.0

    def test_interior_node(self):
        # idx 2 on an 11-node grid over [-5, 5] sits at -3
        space = SearchSpace([-5.0], [5.0], [11])
        assert to_point([2], space)[0] == pytest.approx(-3.0)

    def test_rejects_out_of_range(self):
        space = SearchSpace([0.0], [1.0], [5])
        with pytest.raises(IndexError):
            to_point([5], space)

    def test_strictly_monotone(self):
        space = SearchSpace([-2.0], [7.0], [33])
        pts = [to_point([i], space)[0] for i in range(33)]
        assert all(a < b for a, b in zip(pts, pts[1:]))

    def test_batch_shape(self):
        space = SearchSpace([0.0, 0.0], [1.0, 2.0], [3, 5])
        idx = np.array([[0, 0], [2, 4]])
        pts = to_point(idx, space)
        np.testing.assert_allclose(pts, [[0.0, 0.0], [1.0, 2.0]])


class TestToIndex:
    def test_round_half_to_even(self):
        # continuous index 1.04 rounds to 1
        space = SearchSpace([0.0], [1.0], [5])
        assert to_index([0.26], space)[0] == 1

    def test_clamps_below(self):
        space = SearchSpace([0.0], [1.0], [5])
        assert to_index([-3.7], space)[0] == 0

    def test_clamps_above(self):
        space = SearchSpace([0.0], [1.0], [5])
        assert to_index([42.0], space)[0] == 4

    def test_total_on_extreme_inputs(self):
        space = SearchSpace([-1.0, -1.0], [1.0, 1.0], [7, 7])
        idx = to_index([1e300, -1e300], space)
        assert idx.tolist() == [6, 0]


class TestRoundTrip:
    def test_exhaustive_small_grid(self):
        space = SearchSpace([-5.0, 0.0], [5.0, 0.125], [11, 6])
        for idx in itertools.product(range(11), range(6)):
            back = to_index(to_point(np.array(idx), space), space)
            assert back.tolist() == list(idx)

    def test_fifty_random_spaces(self):
        rng = np.random.default_rng(2024)
        for _ in range(50):
            space = random_space(rng)
            # every per-dimension index value appears at least once
            grids = rng.integers(0, space.nodes, size=(4096, space.ndim))
            for j, n in enumerate(space.nodes):
                grids[: int(n), j] = np.arange(n)
            back = to_index(to_point(grids, space), space)
            np.testing.assert_array_equal(back, grids)
