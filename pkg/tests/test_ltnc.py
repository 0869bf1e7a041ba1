import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labeltnc import CvmConfig, EvalPair, LabeledDataset, clm_matrix, interpret, label_tnc
from labeltnc.core import DegenerateLabels
from labeltnc.cvm import evaluate_cvm
from labeltnc.ltnc import GUIDELINES, ClmMatrix, class_pairs, distortions

from conftest import random_pair

CVMS = ["dsc", "ch_btwn"]


def blobs(centers, n=20, seed=0):
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=float)
    pts = np.vstack([c + 0.1 * rng.normal(size=(n, centers.shape[1])) for c in centers])
    return LabeledDataset(pts, np.repeat(np.arange(len(centers)), n))


class TestClmMatrix:
    @pytest.mark.parametrize("cvm", CVMS)
    def test_symmetric_zero_diagonal_matches_pairwise_cvm(self, cvm, rng):
        pair = random_pair(rng, k=4)
        cfg = CvmConfig(cvm, 100, 3)
        m = clm_matrix(pair.original, cfg).values
        assert np.array_equal(m, m.T) and np.all(np.diag(m) == 0)
        for i, j in class_pairs(4):
            sub = pair.original.restrict((i, j))
            assert m[i, j] == evaluate_cvm(sub, cfg, stream=(i, j)).score

    def test_threads_do_not_change_values(self, rng):
        pair = random_pair(rng, k=5)
        cfg = CvmConfig("ch_btwn", 100, 1)
        one = clm_matrix(pair.original, cfg, threads=1).values
        assert np.array_equal(one, clm_matrix(pair.original, cfg, threads=4).values)

    def test_single_class_rejected(self):
        with pytest.raises(DegenerateLabels):
            clm_matrix(LabeledDataset(np.zeros((4, 2)), [1, 1, 1, 1]), CvmConfig())

    def test_read_only(self, rng):
        m = clm_matrix(random_pair(rng).original, CvmConfig()).values
        with pytest.raises(ValueError):
            m[0, 1] = 0.5


class TestDistortions:
    def test_split_into_parts(self):
        mx = ClmMatrix(np.array([[0, 0.9, 0.2], [0.9, 0, 0.5], [0.2, 0.5, 0]]))
        mz = ClmMatrix(np.array([[0, 0.4, 0.7], [0.4, 0, 0.5], [0.7, 0.5, 0]]))
        star, fg, mg = distortions(mx, mz)
        assert fg[0, 1] == pytest.approx(0.5) and mg[0, 1] == 0
        assert mg[0, 2] == pytest.approx(0.5) and fg[0, 2] == 0
        assert np.allclose(star, fg - mg)


class TestLabelTnc:
    @pytest.mark.parametrize("cvm", CVMS)
    def test_identity(self, cvm, rng):
        pair = random_pair(rng)
        rep = label_tnc(EvalPair(pair.original, pair.original), CvmConfig(cvm, 100))
        assert rep.label_t == 1.0 and rep.label_c == 1.0 and rep.quadrant == "A"

    def test_false_groups_lower_trustworthiness(self):
        # three separated classes collapse into one spot in the embedding
        x = blobs([[0, 0], [10, 0], [0, 10]])
        z = x.with_points(x.points * 0.0 + np.random.default_rng(1).normal(size=x.points.shape))
        rep = label_tnc(EvalPair(x, z), CvmConfig("dsc"))
        assert rep.label_t < 0.4 and rep.label_c == 1.0
        assert rep.quadrant == "C"

    def test_missing_groups_lower_continuity(self):
        x = blobs([[0, 0], [10, 0], [0, 10]])
        z = x.with_points(x.points * 0.0 + np.random.default_rng(1).normal(size=x.points.shape))
        rep = label_tnc(EvalPair(z, x), CvmConfig("dsc"))
        assert rep.label_c < 0.4 and rep.label_t == 1.0
        assert rep.quadrant == "B"

    def test_pair_contributions(self, rng):
        rep = label_tnc(random_pair(rng, k=3), CvmConfig())
        assert [(c["i"], c["j"]) for c in rep.pair_contributions] == [(0, 1), (0, 2), (1, 2)]
        fg = np.mean([c["fg"] for c in rep.pair_contributions])
        assert rep.label_t == pytest.approx(1 - fg, abs=1e-15)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(CVMS))
    def test_tradeoff(self, seed, cvm):
        rep = label_tnc(random_pair(np.random.default_rng(seed)), CvmConfig(cvm, 50))
        assert rep.label_t + rep.label_c >= 1.0
        assert 0.0 <= rep.label_t <= 1.0 and 0.0 <= rep.label_c <= 1.0

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(CVMS))
    def test_swap_antisymmetry(self, seed, cvm):
        pair = random_pair(np.random.default_rng(seed))
        cfg = CvmConfig(cvm, 50)
        fwd, back = label_tnc(pair, cfg), label_tnc(pair.swapped(), cfg)
        assert fwd.label_t == back.label_c and fwd.label_c == back.label_t


class TestInterpret:
    @pytest.mark.parametrize(
        "t, c, quadrant, unlikely",
        [(1.0, 1.0, "A", False), (0.95, 0.5, "B", False), (0.5, 0.95, "C", False), (0.5, 0.6, "D", True)],
    )
    def test_quadrants(self, t, c, quadrant, unlikely):
        out = interpret(t, c)
        assert out.quadrant == quadrant and out.unlikely == unlikely
        assert out.guideline == GUIDELINES[quadrant]

    def test_boundary_is_high(self):
        assert interpret(0.9, 0.9).quadrant == "A"

    def test_severity(self):
        assert interpret(0.8, 1.0).severe is False
        assert interpret(0.6, 1.0).severe is True

    def test_bad_thresholds(self):
        with pytest.raises(ValueError):
            interpret(1, 1, hi=0.5, lo=0.7)
