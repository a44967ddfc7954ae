import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lwnb.dataset import AttributeSpec, DatasetSchema
from lwnb.neighbors import distance, k_nearest, squared_distances
from lwnb.preprocess import Binarizer

from oracles import brute_force_neighbors

MIXED = Binarizer.from_schema(DatasetSchema(
    (AttributeSpec.numeric("x"), AttributeSpec.nominal("c", ["r", "g", "b"]), AttributeSpec.nominal("cls", ["a"])),
    2))


class TestDistance:
    def test_identity(self):
        assert distance([0.3, 0.7], [0.3, 0.7]) == 0

    def test_unit(self):
        assert distance([0, 0], [1, 0]) == 1

    def test_one_hot_mismatch(self):
        assert distance([1, 0, 0], [0, 1, 0]) == pytest.approx(math.sqrt(2), abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            distance([0, 1], [0, 1, 2])

    def test_missing_numeric_counts_one(self):
        assert distance([np.nan, 0.0, 1, 0, 0], [0.5, 0.0, 1, 0, 0], MIXED) == 1.0

    def test_missing_nominal_block_counts_two(self):
        a = [0.5, np.nan, np.nan, np.nan]
        b = [0.5, 0, 1, 0]
        assert distance(a, b, MIXED) == pytest.approx(math.sqrt(2))
        # both sides missing is still the maximum
        assert distance(a, a, MIXED) == pytest.approx(math.sqrt(2))

    def test_layout_agrees_without_missing(self):
        a = np.array([0.25, 0, 0, 1])
        b = np.array([0.75, 1, 0, 0])
        assert distance(a, b, MIXED) == distance(a, b)

    @settings(max_examples=50, deadline=None)
    @given(arrays(float, 4, elements=st.floats(0, 1)), arrays(float, 4, elements=st.floats(0, 1)))
    def test_symmetric_nonnegative(self, a, b):
        assert distance(a, b) == distance(b, a) >= 0
        assert distance(a, a) == 0


class TestKNearest:
    def test_k_equals_n(self):
        train = np.random.default_rng(0).random((7, 2))
        nb = k_nearest(train, np.array([0.5, 0.5]), 7)
        assert sorted(nb.indices.tolist()) == list(range(7))

    def test_exact_match(self):
        train = np.array([[0.0, 0.0], [0.2, 0.9], [1.0, 1.0]])
        nb = k_nearest(train, np.array([0.2, 0.9]), 1)
        assert nb.indices.tolist() == [1] and nb.distances[0] == 0 and nb.bandwidth == 0

    def test_ties_at_bandwidth(self):
        train = np.array([[1.0], [2.0], [-2.0], [3.0]])
        nb = k_nearest(train, np.array([0.0]), 2)
        assert nb.distances.tolist() == [1.0, 2.0, 2.0]
        assert nb.bandwidth == 2.0 and len(nb) == 3
        assert nb.indices.tolist() == [0, 1, 2]

    def test_k_out_of_range(self):
        train = np.zeros((3, 1))
        with pytest.raises(ValueError):
            k_nearest(train, np.zeros(1), 0)
        with pytest.raises(ValueError):
            k_nearest(train, np.zeros(1), 4)

    def test_matches_brute_force_on_random_instances(self):
        rng = np.random.default_rng(123)
        for _ in range(200):
            n = int(rng.integers(1, 201))
            dims = int(rng.integers(1, 5))
            # a coarse grid makes distance ties common
            train = rng.integers(0, 4, size=(n, dims)) / 4.0
            query = rng.integers(0, 4, size=dims) / 4.0
            k = int(rng.integers(1, n + 1))
            nb = k_nearest(train, query, k)
            dists = [math.sqrt(sum((t - q) ** 2 for t, q in zip(row, query))) for row in train.tolist()]
            want, d_k = brute_force_neighbors(dists, k)
            assert nb.indices.tolist() == want
            assert nb.bandwidth == pytest.approx(d_k, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 40), st.integers(0, 2**32 - 1))
    def test_bandwidth_monotone_in_k(self, n, seed):
        rng = np.random.default_rng(seed)
        train = rng.random((n, 3))
        q = rng.random(3)
        bws = [k_nearest(train, q, k).bandwidth for k in range(1, n + 1)]
        assert all(a <= b for a, b in zip(bws, bws[1:]))

    def test_distances_sorted(self):
        rng = np.random.default_rng(9)
        nb = k_nearest(rng.random((50, 3)), rng.random(3), 20)
        assert (np.diff(nb.distances) >= 0).all()
        assert nb.bandwidth == nb.distances[-1]

    def test_squared_distances_vectorized_matches_pairwise(self):
        rng = np.random.default_rng(2)
        train = rng.random((30, 5))
        q = rng.random(5)
        sq = squared_distances(train, q)
        for row, s in zip(train, sq):
            assert s == pytest.approx(distance(row, q) ** 2, rel=1e-12)
