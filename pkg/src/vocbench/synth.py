"""Calibrated synthetic confidence distributions.

A distribution is a finite set of atoms ``(confidence, mass)``. Realizing it
as a dataset makes the classifier calibrated by construction: at confidence
``c`` a fraction ``c`` of the mass is correct.

Population realizations are weighted datasets with two records per atom:
weight ``m*c`` correct and ``m - m*c`` wrong. They are calibrated up to the
rounding of that one product.
Sample realizations draw ``n`` unit-weight records with
``numpy.random.default_rng(seed)``: one ``choice`` call picks atoms by mass,
then one ``random`` call draws uniforms and a record is correct when its
uniform is below the atom's confidence. Every record predicts class 1; wrong
records carry label 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PredictionRecord, ScoredDataset, VocError

MASS_TOL = 1e-12

POPULATION = "population"
SAMPLE = "sample"


@dataclass(frozen=True)
class ConfidenceDistribution:
    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        atoms = tuple(sorted((float(c), float(m)) for c, m in self.atoms))
        if not atoms:
            raise VocError("distribution has no atoms")
        for c, m in atoms:
            if not 0.0 <= c <= 1.0:
                raise VocError(f"atom confidence {c!r} outside [0, 1]")
            if not (math.isfinite(m) and m > 0):
                raise VocError(f"atom mass must be positive, got {m!r}")
        cs = [c for c, _ in atoms]
        if len(set(cs)) != len(cs):
            raise VocError("atom confidences must be distinct")
        if abs(math.fsum(m for _, m in atoms) - 1.0) > MASS_TOL:
            raise VocError("atom masses must sum to 1")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_pairs(cls, pairs) -> "ConfidenceDistribution":
        return cls(tuple(pairs))

    def mass_at(self, c: float) -> float:
        for ci, m in self.atoms:
            if ci == c:
                return m
        raise VocError(f"no atom at confidence {c!r}")

    @property
    def mean(self) -> float:
        return math.fsum(c * m for c, m in self.atoms)


def _merge(pairs) -> ConfidenceDistribution:
    merged: dict[float, float] = {}
    for c, m in pairs:
        if m > 0:
            merged[c] = merged.get(c, 0.0) + m
    return ConfidenceDistribution(tuple(merged.items()))


def realize(dist: ConfidenceDistribution, mode: str = POPULATION, n: int = 0, seed: int = 0) -> ScoredDataset:
    if mode == POPULATION:
        records = []
        for c, m in reversed(dist.atoms):
            w_correct = m * c
            w_wrong = m - w_correct
            if w_correct > 0:
                records.append(PredictionRecord(c, 1, 1, w_correct))
            if w_wrong > 0:
                records.append(PredictionRecord(c, 1, 2, w_wrong))
        return ScoredDataset(records)
    if mode == SAMPLE:
        if n < 1:
            raise VocError("sample mode needs n >= 1")
        rng = np.random.default_rng(seed)
        conf = np.array([c for c, _ in dist.atoms])
        mass = np.array([m for _, m in dist.atoms])
        idx = rng.choice(len(conf), size=n, p=mass / mass.sum())
        u = rng.random(n)
        picked = conf[idx]
        return ScoredDataset(
            PredictionRecord(float(c), 1, 1 if ok else 2)
            for c, ok in zip(picked, u < picked)
        )
    raise VocError(f"unknown realization mode {mode!r}")


def polarize(dist: ConfidenceDistribution, c0: float, fraction: float, c_hi: float, c_lo: float) -> ConfidenceDistribution:
    """Split part of the atom at ``c0`` between ``c_lo`` and ``c_hi``.

    The split ratio keeps the mean confidence (hence the accuracy of a
    calibrated realization) unchanged.
    """
    if not 0.0 < fraction <= 1.0:
        raise VocError("fraction must be in (0, 1]")
    if not c_lo < c0 < c_hi:
        raise VocError("need c_lo < c0 < c_hi")
    if not (0.0 <= c_lo and c_hi <= 1.0):
        raise VocError("c_lo and c_hi must lie in [0, 1]")
    mass = dist.mass_at(c0)
    moved = fraction * mass
    p_up = (c0 - c_lo) / (c_hi - c_lo)
    pairs = [(c, m) for c, m in dist.atoms if c != c0]
    pairs += [(c0, mass - moved), (c_hi, p_up * moved), (c_lo, (1.0 - p_up) * moved)]
    return _merge(pairs)


def push_up(dist: ConfidenceDistribution, c0: float, delta_mass: float, c_target: float) -> ConfidenceDistribution:
    """Move ``delta_mass`` from ``c0`` up to ``c_target``; raises accuracy."""
    if not c_target > c0:
        raise VocError("push_up needs c_target > c0 (pushing mass down only loses value)")
    if not c_target <= 1.0:
        raise VocError("c_target must be <= 1")
    mass = dist.mass_at(c0)
    if not 0.0 < delta_mass <= mass:
        raise VocError(f"delta_mass must be in (0, {mass}]")
    pairs = [(c, m) for c, m in dist.atoms if c != c0]
    pairs += [(c0, mass - delta_mass), (c_target, delta_mass)]
    return _merge(pairs)


# Three snapshots with equal accuracy 0.6, increasingly pushed toward the edges.
PRESETS = {
    "m1": ((0.6, 1.0),),
    "m2": ((0.4, 0.5), (0.8, 0.5)),
    "m3": ((0.2, 0.5), (1.0, 0.5)),
}


def preset(name: str) -> ConfidenceDistribution:
    try:
        return ConfidenceDistribution(PRESETS[name])
    except KeyError:
        raise VocError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
