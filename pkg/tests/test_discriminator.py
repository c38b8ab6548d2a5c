from pathlib import Path

import numpy as np
import pytest

from vocbench import (
    Discriminator,
    PredictionRecord,
    ScoredDataset,
    VocError,
    accuracy,
    apply_discriminator,
    apply_rescale,
    apply_threshold,
    count_outcomes,
    discrimination,
    ece,
    omega_aware_voc,
    optimize_threshold,
    preset,
    realize,
    train_bin_remap,
    voc_auc,
)
from vocbench.io import read_predictions
from vocbench.synth import ConfidenceDistribution

from gen import random_dataset

FIXTURE = Path(__file__).parent / "data" / "discriminator_fixture.csv"


def per_class_fixture():
    rows = [(0.8, 1, 1)] * 4 + [(0.81, 2, 2)] * 2 + [(0.81, 2, 1)] * 2
    return ScoredDataset(PredictionRecord(c, p, y) for c, p, y in rows)


class TestTrain:
    def test_calibrated_atoms_identity(self):
        centers = (0.15, 0.45, 0.85)
        data = realize(ConfidenceDistribution(tuple((c, 1 / 3) for c in centers)))
        h = train_bin_remap(data, 10)
        for c in centers:
            assert h(1, c) == pytest.approx(c, abs=1e-15)

    def test_per_class(self):
        h = train_bin_remap(per_class_fixture(), 10, per_class=True)
        assert h(1, 0.8) == 1.0 and h(2, 0.81) == 0.5

    def test_single_bin_is_global_accuracy(self, d1):
        h = train_bin_remap(d1, 1)
        assert {h(r.predicted_class, r.confidence) for r in d1} == {accuracy(d1)}

    def test_unseen_bin_falls_back(self, d1):
        h = train_bin_remap(d1, 10)
        assert h(1, 0.05) == 0.05

    def test_validation(self, d1):
        with pytest.raises(VocError):
            train_bin_remap(d1, 0)
        with pytest.raises(VocError):
            Discriminator("bogus")
        with pytest.raises(VocError):
            Discriminator("bin_remap", 2, {0: 1.5})


class TestApply:
    def test_identity_is_neutral(self, d1):
        out = apply_discriminator(d1, Discriminator())
        assert out == d1
        assert omega_aware_voc(out) == omega_aware_voc(d1)
        assert ece(out) == ece(d1) and discrimination(out) == discrimination(d1)

    def test_zero_threshold_decisions_unchanged(self, d1):
        h = train_bin_remap(d1, 4, per_class=True)
        before = apply_threshold(d1, 0)
        after = apply_threshold(apply_discriminator(d1, h), 0)
        assert sorted((p.decided_class, p.true_label) for p in before) == sorted((p.decided_class, p.true_label) for p in after)

    def test_accuracy_preserved(self):
        rng = np.random.default_rng(14)
        for _ in range(40):
            data = random_dataset(rng, 100)
            train = random_dataset(rng, 100)
            for h in (train_bin_remap(train, int(rng.integers(1, 20)), bool(rng.integers(2))),):
                assert accuracy(apply_discriminator(data, h)) == accuracy(data)

    def test_outcome_taxonomy(self):
        # accepted-correct = true positives, accepted-wrong = false positives, abstain = TN + FN
        rng = np.random.default_rng(15)
        for _ in range(20):
            data = apply_discriminator(random_dataset(rng, 80), train_bin_remap(random_dataset(rng, 80), 8, True))
            t = float(rng.random())
            counts = count_outcomes(apply_threshold(data, t))
            tp = sum(r.weight for r in data if r.confidence >= t and r.correct)
            fp = sum(r.weight for r in data if r.confidence >= t and not r.correct)
            neg = sum(r.weight for r in data if r.confidence < t)
            assert float(counts.n_correct) == pytest.approx(tp)
            assert float(counts.n_wrong) == pytest.approx(fp)
            assert float(counts.n_abstain) == pytest.approx(neg)


class TestBeyondCalibration:
    def test_fixture_improves_on_every_rescale(self):
        data = read_predictions(FIXTURE)
        h = train_bin_remap(data, 10, per_class=True)
        revised = apply_discriminator(data, h)
        gained = optimize_threshold(revised, 1).achieved_value
        for fn in (lambda c: c, np.sqrt, lambda c: c ** 2, lambda c: 0.1 + 0.8 * c):
            base = optimize_threshold(apply_rescale(data, fn), 1).achieved_value
            assert gained >= base + 0.01
        assert voc_auc(omega_aware_voc(revised), (0, 5)) > voc_auc(omega_aware_voc(data), (0, 5))
