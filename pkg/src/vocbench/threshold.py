"""Penalty-aware threshold selection.

On a finite dataset only the accept/abstain partition matters, and every
partition is reached by thresholding at a distinct confidence value, so the
argmax over all real thresholds reduces to a scan over those values.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    EmptyDatasetError,
    OmegaLike,
    ScoredDataset,
    exact,
    omega_of,
)

log = logging.getLogger(__name__)

DEFAULT_ECE_BOUND = 0.1


@dataclass(frozen=True)
class ThresholdResult:
    threshold: float
    achieved_value: float
    accepted_weight: float


@dataclass(frozen=True)
class _Candidate:
    # exact weighted counts of records accepted at this threshold
    threshold: float
    n_correct: Fraction
    n_wrong: Fraction


def always_abstain_threshold(max_confidence: float) -> float:
    """Smallest float strictly above ``max_confidence``."""
    return math.nextafter(max_confidence, math.inf)


def candidate_thresholds(data: ScoredDataset) -> list[float]:
    """0, every distinct confidence (ascending), then an always-abstain sentinel."""
    if not len(data):
        raise EmptyDatasetError()
    distinct = sorted(set(data.confidences))
    out = [0.0] + [c for c in distinct if c > 0.0]
    out.append(always_abstain_threshold(distinct[-1]))
    return out


def _candidates(data: ScoredDataset) -> list[_Candidate]:
    """Accepted counts for each candidate threshold, ascending in threshold.

    One pass over the records in canonical (descending confidence) order,
    accumulating suffix sums.
    """
    cached = data.__dict__.get("_threshold_candidates")
    if cached is not None:
        return cached
    records = data.records
    by_threshold = {}
    n_c = n_w = Fraction(0)
    by_threshold[always_abstain_threshold(records[0].confidence)] = (n_c, n_w)
    i = 0
    while i < len(records):
        c = records[i].confidence
        while i < len(records) and records[i].confidence == c:
            r = records[i]
            if r.correct:
                n_c += exact(r.weight)
            else:
                n_w += exact(r.weight)
            i += 1
        by_threshold[c] = (n_c, n_w)
    by_threshold[0.0] = (n_c, n_w)
    out = [_Candidate(t, *by_threshold[t]) for t in candidate_thresholds(data)]
    data.__dict__["_threshold_candidates"] = out
    return out


def _best(candidates: list[_Candidate], omega: Fraction) -> _Candidate:
    # the total weight is a common positive denominator, so compare numerators
    best = None
    best_num = None
    for cand in candidates:
        num = cand.n_correct - omega * cand.n_wrong
        if best is None or num >= best_num:  # >= keeps the largest tying threshold
            best, best_num = cand, num
    return best


def optimize_threshold(validation: ScoredDataset, omega: OmegaLike) -> ThresholdResult:
    """Threshold maximizing the dimensionless value on ``validation``.

    Ties go to the largest threshold, i.e. the one that abstains most.
    """
    w = omega_of(omega)
    best = _best(_candidates(validation), w)
    total = validation.exact_total
    return ThresholdResult(
        threshold=best.threshold,
        achieved_value=float((best.n_correct - w * best.n_wrong) / total),
        accepted_weight=float(best.n_correct + best.n_wrong),
    )


def maximizing_thresholds(validation: ScoredDataset, omega: OmegaLike) -> list[float]:
    """Every candidate threshold attaining the optimal value."""
    w = omega_of(omega)
    cands = _candidates(validation)
    nums = [c.n_correct - w * c.n_wrong for c in cands]
    top = max(nums)
    return [c.threshold for c, n in zip(cands, nums) if n == top]


def calibrated_threshold(omega: OmegaLike) -> float:
    """Optimal threshold for a calibrated classifier: omega / (omega + 1)."""
    w = omega_of(omega)
    return float(w / (w + 1))


def calibrated_expected_value(
    data: ScoredDataset,
    t: float,
    omega: OmegaLike,
    ece_bound: float | None = DEFAULT_ECE_BOUND,
) -> float:
    """Value predicted from the confidences alone, assuming calibration.

    Sums ``w * (c - omega * (1 - c))`` over accepted records and divides by the
    total weight. Correctness labels are ignored. Logs a warning when the
    dataset's ECE exceeds ``ece_bound`` (pass None to skip the check).
    """
    w = omega_of(omega)
    if ece_bound is not None:
        from .calibration import ece

        err = ece(data)
        if err > ece_bound:
            log.warning("ECE %.4g exceeds %.4g; calibrated value estimate is unreliable", err, ece_bound)
    acc = Fraction(0)
    for r in data.records:
        if r.confidence < t:
            break
        c = exact(r.confidence)
        acc += exact(r.weight) * (c - w * (1 - c))
    return float(acc / data.exact_total)
