"""Data model and value algebra for abstaining classifiers.

Weighted counts are accumulated as exact rationals (:class:`fractions.Fraction`
built from the float weights, which is lossless). Every float result is then a
single correct rounding of an exact quantity, so the outcome of a computation
never depends on summation order or on how work was split up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

ABSTAIN = 0


class VocError(ValueError):
    """Invalid input to a value computation."""


class EmptyDatasetError(VocError):
    def __init__(self, msg: str = "empty dataset"):
        super().__init__(msg)


def exact(x) -> Fraction:
    """Lossless conversion of a finite real to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float) and not math.isfinite(x):
        raise VocError(f"non-finite value {x!r}")
    return Fraction(x)


@dataclass(frozen=True)
class PredictionRecord:
    confidence: float
    predicted_class: int
    true_label: int
    weight: float = 1.0

    def __post_init__(self):
        c, w = self.confidence, self.weight
        if not (isinstance(c, (int, float)) and 0.0 <= c <= 1.0):
            raise VocError(f"confidence must be in [0, 1], got {c!r}")
        if self.predicted_class < 1:
            raise VocError(f"predicted_class must be >= 1 (0 means abstain), got {self.predicted_class!r}")
        if self.true_label < 1:
            raise VocError(f"true_label must be >= 1, got {self.true_label!r}")
        if not (math.isfinite(w) and w >= 0.0):
            raise VocError(f"weight must be finite and >= 0, got {w!r}")

    @property
    def correct(self) -> bool:
        return self.predicted_class == self.true_label


def _canonical_key(record: PredictionRecord):
    return (-record.confidence, not record.correct)


@dataclass(frozen=True)
class ScoredDataset:
    """An immutable collection of scored predictions.

    Records are stored in canonical order: confidence descending, correct
    before wrong, then original position (the sort is stable).
    """

    records: tuple[PredictionRecord, ...]

    def __init__(self, records: Iterable[PredictionRecord]):
        recs = tuple(records)
        if not recs:
            raise EmptyDatasetError()
        object.__setattr__(self, "records", tuple(sorted(recs, key=_canonical_key)))
        if self.exact_total == 0:
            raise EmptyDatasetError("zero total weight")

    @classmethod
    def from_arrays(cls, confidence, predicted, label, weight=None) -> "ScoredDataset":
        confidence = [float(c) for c in confidence]
        if weight is None:
            weight = [1.0] * len(confidence)
        if not len(confidence) == len(predicted) == len(label) == len(weight):
            raise VocError("column lengths differ")
        return cls(
            PredictionRecord(c, int(p), int(y), float(w))
            for c, p, y, w in zip(confidence, predicted, label, weight)
        )

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @cached_property
    def exact_total(self) -> Fraction:
        return sum((exact(r.weight) for r in self.records), Fraction(0))

    @property
    def total_weight(self) -> float:
        return float(self.exact_total)

    @property
    def confidences(self) -> list[float]:
        return [r.confidence for r in self.records]

    def map_confidence(self, fn) -> "ScoredDataset":
        """New dataset with ``fn`` applied to every confidence."""
        return ScoredDataset(
            PredictionRecord(float(fn(r.confidence)), r.predicted_class, r.true_label, r.weight)
            for r in self.records
        )


@dataclass(frozen=True)
class AbstainingPrediction:
    decided_class: int
    true_label: int
    weight: float = 1.0

    def __post_init__(self):
        if self.decided_class < 0:
            raise VocError(f"decided_class must be >= 0, got {self.decided_class!r}")


@dataclass(frozen=True)
class UseCase:
    """Values of a correct prediction, an abstention and a wrong prediction."""

    v_correct: float
    v_abstain: float
    v_wrong: float

    def __post_init__(self):
        for name in ("v_correct", "v_abstain", "v_wrong"):
            if not math.isfinite(getattr(self, name)):
                raise VocError(f"{name} must be finite")
        if self.v_abstain >= self.v_correct:
            raise VocError("abstention dominates: no classifier needed")
        if self.v_wrong > self.v_abstain:
            raise VocError("wrong beats abstain: never abstain regime")


@dataclass(frozen=True)
class Penalty:
    """Dimensionless cost of a wrong prediction."""

    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega >= 0):
            raise VocError(f"omega must be finite and >= 0, got {self.omega!r}")

    def __float__(self) -> float:
        return float(self.omega)


OmegaLike = Union[Penalty, float, int, Fraction]


def omega_of(omega: OmegaLike) -> Fraction:
    """Validate a penalty given either as :class:`Penalty` or as a number."""
    if isinstance(omega, Penalty):
        return exact(omega.omega)
    value = exact(omega)
    if value < 0:
        raise VocError(f"omega must be >= 0, got {omega!r}")
    return value


@dataclass(frozen=True)
class OutcomeCounts:
    """Weighted outcome counts, held exactly.

    Use ``float(counts.n_correct)`` etc. for display.
    """

    n_correct: Fraction
    n_abstain: Fraction
    n_wrong: Fraction

    def __post_init__(self):
        for name in ("n_correct", "n_abstain", "n_wrong"):
            v = exact(getattr(self, name))
            if v < 0:
                raise VocError(f"{name} must be >= 0")
            object.__setattr__(self, name, v)

    @property
    def total(self) -> Fraction:
        return self.n_correct + self.n_abstain + self.n_wrong

    def as_floats(self) -> dict:
        return {
            "n_correct": float(self.n_correct),
            "n_abstain": float(self.n_abstain),
            "n_wrong": float(self.n_wrong),
        }


def apply_threshold(data: ScoredDataset, t: float) -> list[AbstainingPrediction]:
    """Turn a scored dataset into abstaining decisions at threshold ``t``.

    A record is accepted when ``confidence >= t``.
    """
    return [
        AbstainingPrediction(r.predicted_class if r.confidence >= t else ABSTAIN, r.true_label, r.weight)
        for r in data.records
    ]


def count_outcomes(preds: Sequence[AbstainingPrediction]) -> OutcomeCounts:
    if not preds:
        raise EmptyDatasetError()
    n_correct = n_abstain = n_wrong = Fraction(0)
    for p in preds:
        w = exact(p.weight)
        if p.decided_class == ABSTAIN:
            n_abstain += w
        elif p.decided_class == p.true_label:
            n_correct += w
        else:
            n_wrong += w
    return OutcomeCounts(n_correct, n_abstain, n_wrong)


def raw_value(counts: OutcomeCounts, usecase: UseCase) -> float:
    total = (
        exact(usecase.v_correct) * counts.n_correct
        + exact(usecase.v_abstain) * counts.n_abstain
        + exact(usecase.v_wrong) * counts.n_wrong
    )
    return float(total)


def to_penalty(usecase: UseCase) -> Penalty:
    # UseCase construction already rejects the uninteresting regimes
    gap = usecase.v_correct - usecase.v_abstain
    return Penalty(float((exact(usecase.v_abstain) - exact(usecase.v_wrong)) / exact(gap)))


def exact_dimensionless_value(counts: OutcomeCounts, omega: OmegaLike) -> Fraction:
    total = counts.total
    if total == 0:
        raise EmptyDatasetError("zero total weight")
    return (counts.n_correct - omega_of(omega) * counts.n_wrong) / total


def dimensionless_value(counts: OutcomeCounts, omega: OmegaLike) -> float:
    """Average value per unit weight: +1 correct, 0 abstain, -omega wrong."""
    return float(exact_dimensionless_value(counts, omega))


def normalize_value(raw: float, usecase: UseCase, total_weight: float) -> float:
    """Convert a raw value into the dimensionless per-sample value."""
    if not total_weight > 0:
        raise VocError("total_weight must be > 0")
    return (raw - total_weight * usecase.v_abstain) / (total_weight * (usecase.v_correct - usecase.v_abstain))


def value_at_threshold(data: ScoredDataset, t: float, omega: OmegaLike) -> float:
    return dimensionless_value(count_outcomes(apply_threshold(data, t)), omega)
