"""Discriminators: re-score a prediction's confidence without changing the prediction.

The reference discriminators only look at (predicted class, confidence). They
bin the confidence with the same equal-width bins as the ECE and replace it by
the validation accuracy of that bin, optionally split by predicted class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping

from .calibration import bin_index
from .core import PredictionRecord, ScoredDataset, VocError, exact

IDENTITY = "identity"
BIN_REMAP = "bin_remap"
CLASS_BIN_REMAP = "class_bin_remap"
KINDS = (IDENTITY, BIN_REMAP, CLASS_BIN_REMAP)


@dataclass(frozen=True)
class Discriminator:
    """Lookup table from bin (or ``(bin, predicted_class)``) to revised confidence.

    Keys missing from the table leave the input confidence untouched.
    """

    kind: str = IDENTITY
    n_bins: int = 1
    table: Mapping[Hashable, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise VocError(f"unknown discriminator kind {self.kind!r}")
        if self.n_bins < 1:
            raise VocError("n_bins must be >= 1")
        for key, v in self.table.items():
            if not 0.0 <= v <= 1.0:
                raise VocError(f"revised confidence {v!r} for {key!r} outside [0, 1]")
        object.__setattr__(self, "table", dict(sorted(self.table.items(), key=lambda kv: _key_order(kv[0]))))

    @property
    def per_class(self) -> bool:
        return self.kind == CLASS_BIN_REMAP

    def key(self, predicted_class: int, confidence: float):
        k = bin_index(confidence, self.n_bins)
        return (k, predicted_class) if self.per_class else k

    def __call__(self, predicted_class: int, confidence: float) -> float:
        if self.kind == IDENTITY:
            return confidence
        return self.table.get(self.key(predicted_class, confidence), confidence)


def _key_order(key):
    return key if isinstance(key, tuple) else (key,)


def train_bin_remap(validation: ScoredDataset, n_bins: int = 10, per_class: bool = False) -> Discriminator:
    """Fit a bin-accuracy lookup on ``validation``."""
    if n_bins < 1:
        raise VocError("n_bins must be >= 1")
    probe = Discriminator(CLASS_BIN_REMAP if per_class else BIN_REMAP, n_bins)
    sums: dict = {}
    for r in validation.records:
        acc = sums.setdefault(probe.key(r.predicted_class, r.confidence), [Fraction(0), Fraction(0)])
        w = exact(r.weight)
        acc[0] += w if r.correct else 0
        acc[1] += w
    table = {key: float(ok / w) for key, (ok, w) in sums.items() if w > 0}
    return Discriminator(probe.kind, n_bins, table)


def apply_discriminator(data: ScoredDataset, h: Discriminator) -> ScoredDataset:
    """Swap in the revised confidences; classes, labels and weights are kept."""
    if h.kind == IDENTITY:
        return data
    return ScoredDataset(
        PredictionRecord(h(r.predicted_class, r.confidence), r.predicted_class, r.true_label, r.weight)
        for r in data.records
    )
