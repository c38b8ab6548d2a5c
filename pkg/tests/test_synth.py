import math

import numpy as np
import pytest

from vocbench import (
    VocError,
    accuracy,
    discrimination,
    dominates,
    ece,
    omega_aware_voc,
    polarize,
    preset,
    push_up,
    realize,
)
from vocbench.synth import ConfidenceDistribution

from gen import random_distribution


def atoms(dist):
    return [(c, pytest.approx(m, abs=1e-15)) for c, m in dist.atoms]


class TestDistribution:
    @pytest.mark.parametrize("pairs", [
        (), ((0.5, 0.5),), ((0.5, 0.5), (0.5, 0.5)), ((1.5, 1.0),), ((0.5, 1.2), (0.2, -0.2)),
    ])
    def test_invalid(self, pairs):
        with pytest.raises(VocError):
            ConfidenceDistribution(pairs)

    def test_sorted(self):
        assert ConfidenceDistribution(((0.9, 0.5), (0.1, 0.5))).atoms == ((0.1, 0.5), (0.9, 0.5))


class TestRealize:
    def test_single_atom(self):
        data = realize(ConfidenceDistribution(((0.6, 1.0),)))
        assert [(r.confidence, r.correct, r.weight) for r in data] == [(0.6, True, 0.6), (0.6, False, 0.4)]
        assert accuracy(data) == 0.6 and ece(data) == pytest.approx(0, abs=1e-15)

    def test_zero_weight_omitted(self):
        data = realize(ConfidenceDistribution(((1.0, 0.5), (0.2, 0.5))))
        assert [(r.confidence, r.correct, r.weight) for r in data] == [
            (1.0, True, 0.5), (0.2, True, 0.1), (0.2, False, 0.4)]

    def test_sample_concentrates(self):
        data = realize(ConfidenceDistribution(((0.6, 1.0),)), "sample", 100_000, 42)
        assert len(data) == 100_000 and abs(accuracy(data) - 0.6) < 0.01

    def test_sample_deterministic(self):
        a = realize(preset("m3"), "sample", 500, 3)
        b = realize(preset("m3"), "sample", 500, 3)
        c = realize(preset("m3"), "sample", 500, 4)
        assert a == b and a != c

    def test_sample_converges(self):
        for name in ("m1", "m2", "m3"):
            pop = realize(preset(name))
            smp = realize(preset(name), "sample", 100_000, 1)
            assert abs(accuracy(smp) - accuracy(pop)) < 0.01
            assert abs(discrimination(smp).discrimination - discrimination(pop).discrimination) < 0.01

    def test_bad_mode(self):
        with pytest.raises(VocError):
            realize(preset("m1"), "bogus")
        with pytest.raises(VocError):
            realize(preset("m1"), "sample", 0)


class TestPolarize:
    def test_full_split(self):
        out = polarize(ConfidenceDistribution(((0.7, 1.0),)), 0.7, 1, 1.0, 0.0)
        assert out.atoms == ((0.0, pytest.approx(0.3, abs=1e-15)), (1.0, 0.7))
        assert accuracy(realize(out)) == pytest.approx(0.7, abs=1e-15)

    def test_m1_to_m2(self):
        out = polarize(preset("m1"), 0.6, 1, 0.8, 0.4)
        assert atoms(out) == atoms(preset("m2"))

    def test_m2_to_m3(self):
        out = polarize(polarize(preset("m2"), 0.4, 1, 1.0, 0.2), 0.8, 1, 1.0, 0.2)
        assert atoms(out) == atoms(preset("m3"))

    @pytest.mark.parametrize("args", [(0.6, 0.0, 0.8, 0.4), (0.6, 1, 0.6, 0.4), (0.6, 1, 0.8, 0.6), (0.5, 1, 0.8, 0.4)])
    def test_invalid(self, args):
        with pytest.raises(VocError):
            polarize(preset("m1"), *args)

    def test_properties(self):
        rng = np.random.default_rng(9)
        for _ in range(60):
            dist = random_distribution(rng)
            c0 = float(rng.choice([c for c, _ in dist.atoms]))
            if not 0 < c0 < 1:
                continue
            frac = float(rng.uniform(0.05, 1))
            out = polarize(dist, c0, frac, 1.0, 0.0)
            assert math.fsum(m for _, m in out.atoms) == pytest.approx(1.0, abs=1e-12)
            assert out.mean == pytest.approx(dist.mean, abs=1e-12)
            before, after = realize(dist), realize(out)
            assert discrimination(after).discrimination > discrimination(before).discrimination
            assert dominates(omega_aware_voc(after), omega_aware_voc(before), (0, math.inf), tol=1e-12)


class TestPushUp:
    def test_move(self):
        out = push_up(ConfidenceDistribution(((0.5, 1.0),)), 0.5, 0.5, 0.9)
        assert out.atoms == ((0.5, 0.5), (0.9, 0.5))
        assert out.mean > 0.5

    def test_dominates(self):
        rng = np.random.default_rng(10)
        for _ in range(40):
            dist = random_distribution(rng)
            c0, m = dist.atoms[int(rng.integers(len(dist.atoms)))]
            if c0 >= 1:
                continue
            out = push_up(dist, c0, m * float(rng.uniform(0.1, 1)), float(rng.uniform(c0, 1)) or 1.0)
            assert dominates(omega_aware_voc(realize(out)), omega_aware_voc(realize(dist)), (0, math.inf), tol=1e-12)

    def test_push_down_rejected(self):
        with pytest.raises(VocError):
            push_up(preset("m1"), 0.6, 0.5, 0.3)

    def test_insufficient_mass(self):
        with pytest.raises(VocError):
            push_up(preset("m2"), 0.4, 0.6, 0.9)


class TestPresets:
    def test_unknown(self):
        with pytest.raises(VocError):
            preset("m4")

    @pytest.mark.parametrize("name, disc", [("m1", 0.01), ("m2", 0.05), ("m3", 0.17)])
    def test_accuracy_and_discrimination(self, name, disc):
        data = realize(preset(name))
        # 0.4 and 0.8 are inexact in binary, so m2's mean confidence is 0.6 + 1 ulp
        assert accuracy(data) == pytest.approx(0.6, abs=2e-16)
        assert discrimination(data).discrimination == pytest.approx(disc, abs=1e-15)
