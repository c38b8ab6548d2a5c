import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vocbench import (
    MonotoneRescale,
    PredictionRecord,
    ScoredDataset,
    VocError,
    accuracy,
    apply_rescale,
    discrimination,
    ece,
    isotonic_rescale,
    optimize_threshold,
    preset,
    realize,
)
from vocbench.calibration import bin_index
from vocbench.core import value_at_threshold
from vocbench.synth import ConfidenceDistribution

from gen import random_dataset


def data_of(pairs):
    """[(confidence, correct), ...] with unit weights."""
    return ScoredDataset(PredictionRecord(c, 1, 1 if ok else 2) for c, ok in pairs)


class TestAccuracy:
    def test_d1(self, d1):
        assert accuracy(d1) == 0.6

    def test_all_correct(self):
        assert accuracy(data_of([(0.3, True), (0.9, True)])) == 1.0

    def test_calibrated_single_atom(self):
        assert accuracy(realize(ConfidenceDistribution(((0.6, 1.0),)))) == 0.6


class TestEce:
    def test_constant_matches_accuracy(self):
        data = data_of([(0.7, True)] * 7 + [(0.7, False)] * 3)
        assert ece(data) == pytest.approx(0.0, abs=1e-12)

    def test_constant_overconfident(self):
        data = data_of([(0.9, True)] * 6 + [(0.9, False)] * 4)
        assert ece(data) == pytest.approx(0.3, abs=1e-15)

    def test_calibrated_atoms_at_bin_centers(self):
        n_bins = 15
        centers = [(k + 0.5) / n_bins for k in (1, 4, 8, 13)]
        dist = ConfidenceDistribution(tuple((c, 0.25) for c in centers))
        assert ece(realize(dist), n_bins) == pytest.approx(0.0, abs=1e-12)

    def test_one_goes_to_last_bin(self):
        assert bin_index(1.0, 15) == 14 and bin_index(0.0, 15) == 0

    def test_bins_validated(self, d1):
        with pytest.raises(VocError):
            ece(d1, 0)


class TestIsotonic:
    def test_calibrated_atoms_identity(self):
        dist = preset("m2")
        m = isotonic_rescale(realize(dist))
        for c, _ in dist.atoms:
            assert m(c) == pytest.approx(c, abs=1e-15)

    def test_reversed_pair_pools(self):
        m = isotonic_rescale(data_of([(0.9, False), (0.1, True)]))
        assert m.breakpoints == ((0.1, 0.5), (0.9, 0.5))

    def test_ordered_pair(self):
        m = isotonic_rescale(data_of([(0.2, False), (0.8, True)]))
        assert m.breakpoints == ((0.2, 0.0), (0.8, 1.0))

    def test_matches_reference_isotonic_regression(self):
        sklearn_isotonic = pytest.importorskip("sklearn.isotonic")
        rng = np.random.default_rng(5)
        for _ in range(30):
            data = random_dataset(rng, 60)
            m = isotonic_rescale(data)
            ys = [y for _, y in m.breakpoints]
            assert all(b >= a for a, b in zip(ys, ys[1:]))
            assert all(0 <= y <= 1 for y in ys)
            ref = sklearn_isotonic.IsotonicRegression().fit(
                [r.confidence for r in data], [float(r.correct) for r in data], sample_weight=[r.weight for r in data])
            for r in data:
                assert m(r.confidence) == pytest.approx(ref.predict([r.confidence])[0], abs=1e-9)

    def test_reduces_ece_in_sample(self):
        rng = np.random.default_rng(6)
        for _ in range(40):
            data = random_dataset(rng, 150)
            fitted = apply_rescale(data, isotonic_rescale(data))
            assert ece(fitted) <= ece(data) + 1e-12

    def test_value_not_degraded_at_matched_thresholds(self):
        # isotonic outputs can merge confidences; the optimum never gets worse than any
        # threshold on the original that maps onto a fitted level
        rng = np.random.default_rng(7)
        for _ in range(30):
            data = random_dataset(rng, 100)
            fitted = apply_rescale(data, isotonic_rescale(data))
            for omega in (0.3, 1, 2.5):
                assert optimize_threshold(fitted, omega).achieved_value >= optimize_threshold(data, omega).achieved_value - 1e-12

    def test_rescale_validation(self):
        with pytest.raises(VocError):
            MonotoneRescale(((0.5, 0.2), (0.4, 0.3)))
        with pytest.raises(VocError):
            MonotoneRescale(((0.1, 0.5), (0.4, 0.3)))
        with pytest.raises(VocError):
            MonotoneRescale(((0.1, 1.5),))

    def test_linear_interpolation(self):
        m = MonotoneRescale(((0.0, 0.1), (1.0, 0.9)), "linear")
        assert m(0.5) == pytest.approx(0.5) and m(-1) == 0.1 and m(2) == 0.9


class TestApplyRescale:
    def test_identity(self, d1):
        assert apply_rescale(d1, MonotoneRescale.identity()) == d1

    def test_square(self, d1):
        sq = apply_rescale(d1, lambda c: c * c)
        assert sorted(sq.confidences) == pytest.approx([0.25, 0.36, 0.49, 0.64, 0.81])
        assert [r.correct for r in sq] == [r.correct for r in d1]

    def test_constant(self, d1):
        assert set(apply_rescale(d1, lambda c: 0.5).confidences) == {0.5}

    def test_strict_rescale_keeps_value(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            data = random_dataset(rng, 100)
            for fn in (np.sqrt, lambda c: c ** 3):
                mapped = apply_rescale(data, fn)
                for omega in (0.3, 1, 2.5):
                    assert optimize_threshold(mapped, omega).achieved_value == optimize_threshold(data, omega).achieved_value


class TestDiscrimination:
    def test_constant(self):
        assert discrimination(data_of([(0.7, True), (0.7, False)])).discrimination == pytest.approx(0.04, abs=1e-15)

    def test_maximum(self):
        assert discrimination(data_of([(0.0, False), (1.0, True)])).discrimination == 0.25

    def test_m2(self):
        d = discrimination(realize(preset("m2")))
        brute = 0.5 * (0.5 - 0.4) ** 2 + 0.5 * (0.5 - 0.8) ** 2
        assert d.discrimination == pytest.approx(0.05, abs=1e-15)
        assert d.discrimination == pytest.approx(brute, abs=1e-15)

    def test_d1(self, d1):
        # (0.16 + 0.09 + 0.04 + 0.01 + 0) / 5
        assert discrimination(d1).discrimination == pytest.approx(0.06, abs=1e-15)


dyadic = st.integers(0, 2 ** 20).map(lambda k: k / 2 ** 20)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(dyadic, st.booleans(), st.floats(0.01, 10)), min_size=1, max_size=30))
def test_discrimination_properties(rows):
    data = ScoredDataset(PredictionRecord(c, 1, 1 if ok else 2, w) for c, ok, w in rows)
    rep = discrimination(data)
    assert 0 <= rep.discrimination <= 0.25
    assert (rep.high_component + rep.low_component) / 2 - 0.25 == pytest.approx(rep.discrimination, abs=1e-12)
    flipped = apply_rescale(data, lambda c: 1 - c)
    assert discrimination(flipped).discrimination == rep.discrimination
