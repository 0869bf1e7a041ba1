import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from labeltnc.core import LabeledDataset, NonFinite
from labeltnc.metricspace import (
    DistanceOracle,
    canonical_condensed,
    canonicalize,
    class_centroids,
    pairwise_distances,
    rank_table,
)

coords = st.floats(-100, 100, allow_nan=False, width=64)


class TestOracle:
    def test_affine_wrap(self):
        pts = np.array([[0.0, 0.0], [3.0, 4.0]])
        d = DistanceOracle(2.0, 1.0).pairwise(pts)
        assert d.tolist() == [[1.0, 11.0], [11.0, 1.0]]

    def test_between(self):
        d = DistanceOracle(alpha=0.5).between(np.array([[0.0, 0.0]]), np.array([[6.0, 8.0], [0.0, 2.0]]))
        assert d.tolist() == [[5.0, 1.0]]

    @pytest.mark.parametrize("alpha, beta", [(0.0, 0.0), (-1.0, 0.0), (1.0, -0.5)])
    def test_invalid(self, alpha, beta):
        with pytest.raises(ValueError):
            DistanceOracle(alpha, beta)

    def test_non_finite(self):
        with pytest.raises(NonFinite):
            pairwise_distances(np.array([[0.0], [np.inf]]))


class TestCanonicalize:
    def test_min_max(self):
        d = pairwise_distances(np.array([[0.0], [1.0], [3.0]]))
        c, cmap = canonicalize(d)
        assert (cmap.lo, cmap.hi) == (1.0, 3.0)
        assert np.allclose(c, [[0, 0, 1], [0, 0, 0.5], [1, 0.5, 0]])

    def test_all_equal_maps_to_one(self):
        c, cmap = canonicalize(pairwise_distances(np.eye(3)))
        assert cmap.degenerate
        assert c[0, 1] == 1.0 and c[0, 0] == 0.0

    def test_apply_clamps(self):
        _, cmap = canonicalize(pairwise_distances(np.array([[0.0], [2.0], [4.0]])))
        assert cmap.apply(np.array([1.0, 3.0, 6.0])).tolist() == [0.0, 0.5, 2.0]

    @settings(max_examples=60, deadline=None)
    @given(
        arrays(np.float64, st.tuples(st.integers(3, 15), st.integers(1, 4)), elements=coords),
        st.floats(0.1, 10.0),
        st.floats(0.0, 100.0),
    )
    def test_affine_invariance(self, pts, alpha, beta):
        base = canonicalize(pairwise_distances(pts))[0]
        moved = canonicalize(pairwise_distances(pts, DistanceOracle(alpha, beta)))[0]
        assert np.allclose(base, moved, atol=1e-9)

    def test_condensed_matches_square(self, rng):
        pts = rng.normal(size=(9, 3))
        from scipy.spatial.distance import pdist, squareform

        assert np.allclose(squareform(canonical_condensed(pdist(pts))), canonicalize(pairwise_distances(pts))[0])


class TestRankTable:
    def test_ties_go_to_lower_index(self):
        # point 1 is equidistant from 0 and 2
        rt = rank_table(pairwise_distances(np.array([[0.0], [1.0], [2.0]])))
        assert rt.ranks[1].tolist() == [1, 0, 2]
        assert rt.knn(1, 1).tolist() == [0]

    def test_known_ranks(self):
        rt = rank_table(pairwise_distances(np.array([[0.0], [1.0], [5.0], [3.0]])))
        assert rt.ranks[0].tolist() == [0, 1, 3, 2]
        assert rt.order[0].tolist() == [1, 3, 2]
        assert rt.knn_mask(1)[0].tolist() == [False, True, False, False]

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(2, 20), st.integers(1, 3)), elements=coords))
    def test_rows_are_permutations(self, pts):
        rt = rank_table(pairwise_distances(pts))
        n = len(pts)
        for i in range(n):
            assert rt.ranks[i, i] == 0
            assert sorted(rt.ranks[i].tolist()) == list(range(n))
            # ranks follow distance order
            d = pairwise_distances(pts)[i]
            nb = rt.order[i]
            assert np.all(np.diff(d[nb]) >= 0)


def test_class_centroids():
    ds = LabeledDataset(np.array([[0.0, 0.0], [2.0, 2.0], [10.0, 0.0]]), [5, 5, 1])
    cents, mean = class_centroids(ds)
    assert cents.tolist() == [[1.0, 1.0], [10.0, 0.0]]
    assert np.allclose(mean, [4.0, 2.0 / 3.0])
