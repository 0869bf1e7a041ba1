from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labeltnc.core import ClassTooSmall, CvmConfig, DegenerateLabels, LabeledDataset
from labeltnc.cvm import (
    AXIOMS,
    ch_btwn,
    check_axioms,
    dsc,
    dsc_pair_matrix,
    evaluate_cvm,
    silhouette_cvm,
)
from labeltnc.metricspace import DistanceOracle
from labeltnc.synthbench import uniform_ball

from conftest import random_dataset


def line(values, labels):
    return LabeledDataset(np.asarray(values, dtype=float), labels)


class TestDsc:
    def test_hand_computed(self):
        # centroids 0.5 and 6; only the point at 2 is nearer the other centroid
        res = dsc(line([0, 1, 2, 10], [0, 0, 1, 1]))
        assert res.diagnostics["f_own"] == 0.75
        assert res.score == 0.5

    def test_tie_counts_for_own_class(self):
        # the point at 1 is equidistant from both centroids (0 and 2)
        assert dsc(line([-1, 1, 1, 2, 3], [0, 0, 0, 1, 1])).diagnostics["f_own"] == 1.0

    def test_chance_is_clamped_to_zero(self):
        assert dsc(line([0, 10, 1, 11], [0, 0, 1, 1])).score == 0.0

    def test_needs_two_classes(self):
        with pytest.raises(DegenerateLabels):
            dsc(line([0, 1], [0, 0]))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.1, 10.0), st.floats(0.0, 100.0))
    def test_exactly_invariant_to_scale_and_shift(self, seed, alpha, beta):
        data = random_dataset(np.random.default_rng(seed))
        assert dsc(data, DistanceOracle(alpha, beta)).score == dsc(data).score

    def test_pair_matrix_equals_per_pair_scores(self, rng):
        for _ in range(10):
            data = random_dataset(rng, k=int(rng.integers(2, 7)))
            oracle = DistanceOracle(float(rng.uniform(0.1, 5)), float(rng.uniform(0, 20)))
            m = dsc_pair_matrix(data, oracle)
            for i, j in combinations(range(data.k), 2):
                assert m[i, j] == m[j, i] == dsc(data.restrict((i, j)), oracle).score


class TestChBtwn:
    # points 0, 2 | 3, 4. Canonical squared distances give total scatter 5/12
    # and within scatter 1/18, so raw = 13/15. The three size-preserving
    # partitions have raw 13/15, 1/3 and -1/5, so the null mean is exactly 1/3
    # and the chance-corrected score is (13/15 - 1/3) / (2/3) = 0.8.
    data = line([0, 2, 3, 4], [0, 0, 1, 1])

    def test_raw_ratio(self):
        res = ch_btwn(self.data, config=CvmConfig("ch_btwn", 10, 0))
        assert res.diagnostics["raw"] == pytest.approx(13 / 15, abs=1e-10)
        assert res.diagnostics["separability"] == pytest.approx(13 / 36, abs=1e-12)
        assert res.diagnostics["compactness"] == pytest.approx(1 / 18, abs=1e-12)

    def test_null_mean_and_score(self):
        res = ch_btwn(self.data, config=CvmConfig("ch_btwn", 20000, 3))
        assert res.diagnostics["null_mean"] == pytest.approx(1 / 3, abs=0.01)
        assert res.score == pytest.approx(0.8, abs=0.02)

    def test_well_separated_scores_high(self):
        rng = np.random.default_rng(1)
        pts = np.vstack([rng.normal(size=(50, 5)), rng.normal(size=(50, 5)) + 100])
        assert ch_btwn(LabeledDataset(pts, np.repeat([0, 1], 50))).score > 0.95

    def test_random_labels_on_one_blob_near_zero(self):
        rng = np.random.default_rng(4)
        data = LabeledDataset(rng.normal(size=(200, 5)), rng.permutation(np.repeat([0, 1], 100)))
        assert ch_btwn(data, config=CvmConfig("ch_btwn", 2000, 0)).score <= 0.1

    def test_unit_balls_far_apart(self):
        rng = np.random.default_rng(5)
        pts = np.vstack([uniform_ball(rng, 100, 3, 1.0), uniform_ball(rng, 100, 3, 1.0) + [100, 0, 0]])
        assert ch_btwn(LabeledDataset(pts, np.repeat([0, 1], 100))).score >= 0.9

    def test_seeded_and_stream_dependent(self, rng):
        data = random_dataset(rng)
        cfg = CvmConfig("ch_btwn", 300, 5)
        a = ch_btwn(data, config=cfg, stream=(0, 1)).score
        assert a == ch_btwn(data, config=cfg, stream=(0, 1)).score
        assert ch_btwn(data, config=cfg, stream=(0, 2)).diagnostics["null_mean"] != pytest.approx(
            ch_btwn(data, config=cfg, stream=(0, 1)).diagnostics["null_mean"], abs=0
        )

    def test_mc_count_above_one_chunk(self, rng):
        data = random_dataset(rng, n=40)
        res = ch_btwn(data, config=CvmConfig("ch_btwn", 1300, 9))
        assert 0.0 <= res.score <= 1.0 and res.diagnostics["mc_count"] == 1300

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.1, 10.0), st.floats(0.0, 100.0))
    def test_invariant_to_scale_and_shift(self, seed, alpha, beta):
        data = random_dataset(np.random.default_rng(seed), n=40)
        cfg = CvmConfig("ch_btwn", 100, 1)
        base = ch_btwn(data, config=cfg).score
        assert ch_btwn(data, DistanceOracle(alpha, beta), cfg).score == pytest.approx(base, abs=1e-9)


class TestSilhouette:
    def test_hand_computed(self):
        # s = 7/9 and 5/7 for each side; mean 47/63 mapped to (s + 1) / 2
        assert silhouette_cvm(line([0, 1, 4, 5], [0, 0, 1, 1])).score == pytest.approx(55 / 63, abs=1e-12)

    def test_singleton_class(self):
        with pytest.raises(ClassTooSmall):
            silhouette_cvm(line([0, 1, 4], [0, 0, 1]))

    def test_not_shift_invariant(self):
        data = line([0, 1, 4, 5], [0, 0, 1, 1])
        assert silhouette_cvm(data, DistanceOracle(beta=50)).score < silhouette_cvm(data).score - 0.1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["dsc", "ch_btwn", "silhouette"]))
def test_scores_in_unit_interval(seed, cvm):
    data = random_dataset(np.random.default_rng(seed), n=30)
    if cvm == "silhouette" and data.class_sizes().min() < 2:
        return
    assert 0.0 <= evaluate_cvm(data, CvmConfig(cvm, 50)).score <= 1.0


class TestAxiomHarness:
    def test_dsc_passes_everything(self):
        rep = check_axioms(CvmConfig("dsc"), trials=30, seed=0)
        assert rep.all_passed
        assert rep.results["scale"].max_delta == 0.0
        assert rep.results["shift"].max_delta == 0.0

    def test_silhouette_fails_shift_with_witness(self):
        rep = check_axioms(CvmConfig("silhouette"), trials=30, seed=0)
        shift = rep.results["shift"]
        assert not shift.passed and shift.max_delta > 0.05
        assert shift.witness["delta"] == shift.max_delta
        assert rep.results["scale"].passed
        text = "\n".join(rep.lines())
        assert "shift" in text and "FAIL" in text and "witness" in text

    def test_ch_btwn_passes_small_run(self):
        rep = check_axioms(CvmConfig("ch_btwn", 300, 0), trials=10, seed=1, stability_trials=1)
        assert rep.results["scale"].passed and rep.results["shift"].passed
        assert rep.results["range"].passed

    def test_report_dict(self):
        d = check_axioms(CvmConfig("dsc"), trials=2).to_dict()
        assert list(d["axioms"]) == list(AXIOMS)
