"""Value Operating Characteristic curves.

A fixed abstaining classifier has a straight-line VOC, ``a - b*omega`` with
``a`` the accepted-correct fraction and ``b`` the accepted-wrong fraction.
A penalty-aware classifier re-picks its threshold for every omega, so its VOC
is the upper envelope of the lines of all candidate thresholds. Envelopes are
built exactly in rational arithmetic; only the public accessors round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import EmptyDatasetError, OmegaLike, OutcomeCounts, ScoredDataset, VocError, exact, omega_of
from .threshold import _candidates

FIXED = "fixed"
OMEGA_AWARE = "omega_aware"
INF = math.inf


@dataclass(frozen=True)
class ValueLine:
    intercept_a: Fraction
    slope_b: Fraction
    threshold: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "intercept_a", exact(self.intercept_a))
        object.__setattr__(self, "slope_b", exact(self.slope_b))
        if self.slope_b < 0:
            raise VocError("slope_b must be >= 0")

    def exact_at(self, omega: Fraction) -> Fraction:
        return self.intercept_a - self.slope_b * omega

    def __call__(self, omega: OmegaLike) -> float:
        return float(self.exact_at(omega_of(omega)))


@dataclass(frozen=True)
class VocCurve:
    """Piecewise-linear curve; piece ``k`` is active on ``[start_k, start_{k+1})``."""

    pieces: tuple[tuple[Fraction, ValueLine], ...]
    mode: str = FIXED

    def __post_init__(self):
        if not self.pieces:
            raise VocError("curve needs at least one piece")
        if self.pieces[0][0] != 0:
            raise VocError("first piece must start at omega = 0")
        starts = [s for s, _ in self.pieces]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise VocError("piece starts must be strictly increasing")
        if self.mode not in (FIXED, OMEGA_AWARE):
            raise VocError(f"unknown curve mode {self.mode!r}")

    @property
    def knots(self) -> list[Fraction]:
        return [s for s, _ in self.pieces]

    def piece_at(self, omega: Fraction) -> ValueLine:
        line = self.pieces[0][1]
        for start, ln in self.pieces:
            if start > omega:
                break
            line = ln
        return line

    def exact_at(self, omega: Fraction) -> Fraction:
        return self.piece_at(omega).exact_at(omega)

    def __call__(self, omega: OmegaLike) -> float:
        return evaluate_curve(self, omega)

    def rows(self) -> list[tuple[float, float, float, Optional[float]]]:
        """``(omega_start, intercept_a, slope_b, threshold)`` per piece, as floats."""
        return [(float(s), float(ln.intercept_a), float(ln.slope_b), ln.threshold) for s, ln in self.pieces]


@dataclass(frozen=True)
class Dominance:
    holds: bool
    witness: Optional[float] = None

    def __bool__(self) -> bool:
        return self.holds


def fixed_voc(counts: OutcomeCounts, threshold: Optional[float] = None) -> VocCurve:
    total = counts.total
    if total == 0:
        raise EmptyDatasetError("zero total weight")
    line = ValueLine(counts.n_correct / total, counts.n_wrong / total, threshold)
    return VocCurve(((Fraction(0), line),), FIXED)


def upper_envelope(lines: Sequence[ValueLine]) -> list[tuple[Fraction, ValueLine]]:
    """Upper envelope of ``a - b*omega`` over ``omega >= 0``.

    Lines are swept in decreasing slope order (steepest first, which is the
    winner at small omega). Among identical lines the last one given wins.
    """
    if not lines:
        raise VocError("no lines")
    # steepest first; for equal slope keep the highest intercept, later entries win ties
    best_per_slope: dict[Fraction, ValueLine] = {}
    for ln in lines:
        cur = best_per_slope.get(ln.slope_b)
        if cur is None or ln.intercept_a >= cur.intercept_a:
            best_per_slope[ln.slope_b] = ln
    ordered = [best_per_slope[b] for b in sorted(best_per_slope, reverse=True)]

    def crossing(l1: ValueLine, l2: ValueLine) -> Fraction:
        # where the shallower l2 catches up with the steeper l1
        return (l1.intercept_a - l2.intercept_a) / (l1.slope_b - l2.slope_b)

    hull: list[ValueLine] = []
    starts: list[Optional[Fraction]] = []  # None stands for -inf
    for ln in ordered:
        while hull:
            x = crossing(hull[-1], ln)
            if starts[-1] is not None and x <= starts[-1]:
                hull.pop()
                starts.pop()
            else:
                break
        starts.append(crossing(hull[-1], ln) if hull else None)
        hull.append(ln)

    pieces = []
    for i, ln in enumerate(hull):
        if i + 1 < len(hull) and starts[i + 1] <= 0:
            continue
        start = starts[i]
        pieces.append((Fraction(0) if start is None or start < 0 else start, ln))
    return pieces


def omega_aware_voc(validation: ScoredDataset) -> VocCurve:
    """VOC of the classifier that re-optimizes its threshold for every omega."""
    total = validation.exact_total
    lines = [ValueLine(c.n_correct / total, c.n_wrong / total, c.threshold) for c in _candidates(validation)]
    return VocCurve(tuple(upper_envelope(lines)), OMEGA_AWARE)


def evaluate_curve(curve: VocCurve, omega: OmegaLike) -> float:
    return float(curve.exact_at(omega_of(omega)))


def _positive_sup(line: ValueLine, start: Fraction, end) -> Optional[object]:
    """Supremum of {omega in [start, end) : line(omega) > 0}, or None if empty."""
    a, b = line.intercept_a, line.slope_b
    if b == 0:
        return end if a > 0 else None
    root = a / b
    if root <= start:
        return None
    return root if end is INF else min(root, end)


def omega_sup(curve: VocCurve) -> float:
    """Largest penalty up to which the curve is still positive (may be inf)."""
    best = None
    n = len(curve.pieces)
    for i, (start, line) in enumerate(curve.pieces):
        end = curve.pieces[i + 1][0] if i + 1 < n else INF
        s = _positive_sup(line, start, end)
        if s is None:
            continue
        if s is INF:
            return INF
        best = s if best is None else max(best, s)
    return 0.0 if best is None else float(best)


def _positive_integral(line: ValueLine, lo: Fraction, hi) -> object:
    a, b = line.intercept_a, line.slope_b
    if b == 0:
        if a <= 0:
            return Fraction(0)
        return INF if hi is INF else a * (hi - lo)
    root = a / b
    upper = root if hi is INF else min(root, hi)
    if upper <= lo:
        return Fraction(0)
    # integral of a - b*w over [lo, upper]
    return a * (upper - lo) - b * (upper * upper - lo * lo) / 2


def _band(band) -> tuple[Fraction, object]:
    if band is None:
        return Fraction(0), INF
    lo, hi = band
    if lo is None or (isinstance(lo, float) and math.isnan(lo)):
        raise VocError("malformed band")
    hi = INF if hi is None or hi == INF else exact(hi)
    lo = exact(lo)
    if lo < 0 or (hi is not INF and hi <= lo):
        raise VocError(f"malformed band [{float(lo)}, {hi if hi is INF else float(hi)})")
    return lo, hi


def exact_voc_auc(curve: VocCurve, band=None):
    lo, hi = _band(band)
    total = Fraction(0)
    n = len(curve.pieces)
    for i, (start, line) in enumerate(curve.pieces):
        end = curve.pieces[i + 1][0] if i + 1 < n else INF
        seg_lo = max(start, lo)
        seg_hi = end if hi is INF else (hi if end is INF else min(end, hi))
        if seg_hi is not INF and seg_hi <= seg_lo:
            continue
        part = _positive_integral(line, seg_lo, seg_hi)
        if part is INF:
            return INF
        total += part
    return total


def voc_auc(curve: VocCurve, band=None) -> float:
    """Area under the positive part of the curve over ``band`` (default [0, inf)).

    Returns ``math.inf`` when the band is unbounded and the curve levels off
    at a positive value.
    """
    area = exact_voc_auc(curve, band)
    return INF if area is INF else float(area)


def dominates(a: VocCurve, b: VocCurve, band=(0, 10), tol: float = 0.0) -> Dominance:
    """Whether ``a(omega) >= b(omega) - tol`` everywhere on the closed ``band``.

    Both curves are continuous and piecewise linear, so checking the band
    ends and every knot inside is enough. The witness is the first failing
    point. The default ``tol=0`` compares exactly; a small positive ``tol``
    absorbs decimal-to-binary rounding in curves built from decimal inputs.
    """
    lo, hi = _band(band)
    slack = exact(tol)
    points = {lo}
    points.update(k for k in a.knots + b.knots if k > lo and (hi is INF or k < hi))
    if hi is not INF:
        points.add(hi)
    for w in sorted(points):
        if a.exact_at(w) < b.exact_at(w) - slack:
            return Dominance(False, float(w))
    if hi is INF:
        la, lb = a.pieces[-1][1], b.pieces[-1][1]
        if la.slope_b > lb.slope_b or (la.slope_b == lb.slope_b and la.intercept_a < lb.intercept_a):
            # b eventually overtakes a; find a point past every knot where it does
            last = max(points)
            w = last + 1
            while a.exact_at(w) >= b.exact_at(w) - slack:
                w = 2 * w + 1
            return Dominance(False, float(w))
    return Dominance(True)
