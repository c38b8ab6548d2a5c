"""Calibration diagnostics, monotone rescaling and the discrimination metric."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Union

from .core import ScoredDataset, VocError, exact

DEFAULT_N_BINS = 15


def bin_index(confidence: float, n_bins: int) -> int:
    """Equal-width bin on [0, 1]; confidence 1.0 falls in the last bin."""
    return min(int(confidence * n_bins), n_bins - 1)


def accuracy(data: ScoredDataset) -> float:
    n_correct = sum((exact(r.weight) for r in data.records if r.correct), Fraction(0))
    return float(n_correct / data.exact_total)


def ece(data: ScoredDataset, n_bins: int = DEFAULT_N_BINS) -> float:
    """Expected calibration error over ``n_bins`` equal-width bins.

    Each bin contributes ``|sum(w*c) - sum(w*correct)| / W``, which is the
    bin-weight-fraction times the gap between mean confidence and accuracy.
    """
    if n_bins < 1:
        raise VocError("n_bins must be >= 1")
    gaps = [Fraction(0)] * n_bins
    for r in data.records:
        w = exact(r.weight)
        k = bin_index(r.confidence, n_bins)
        gaps[k] += w * exact(r.confidence) - (w if r.correct else 0)
    return float(sum(abs(g) for g in gaps) / data.exact_total)


@dataclass(frozen=True)
class MonotoneRescale:
    """Non-decreasing confidence map given by breakpoints.

    ``interpolation="step"`` holds each output until the next breakpoint (the
    shape of an isotonic fit); ``"linear"`` interpolates between breakpoints.
    Outside the breakpoint range the nearest output is used.
    """

    breakpoints: tuple[tuple[float, float], ...]
    interpolation: str = "step"

    def __post_init__(self):
        bps = tuple((float(x), float(y)) for x, y in self.breakpoints)
        if not bps:
            raise VocError("rescale needs at least one breakpoint")
        xs = [x for x, _ in bps]
        ys = [y for _, y in bps]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise VocError("rescale inputs must be strictly increasing")
        if any(b < a for a, b in zip(ys, ys[1:])):
            raise VocError("rescale outputs must be non-decreasing")
        if any(not 0.0 <= y <= 1.0 for y in ys):
            raise VocError("rescale outputs must lie in [0, 1]")
        if self.interpolation not in ("step", "linear"):
            raise VocError(f"unknown interpolation {self.interpolation!r}")
        object.__setattr__(self, "breakpoints", bps)

    @classmethod
    def identity(cls) -> "MonotoneRescale":
        return cls(((0.0, 0.0), (1.0, 1.0)), "linear")

    def __call__(self, c: float) -> float:
        xs = [x for x, _ in self.breakpoints]
        i = bisect.bisect_right(xs, c) - 1
        if i < 0:
            return self.breakpoints[0][1]
        if i == len(xs) - 1 or self.interpolation == "step":
            return self.breakpoints[i][1]
        (x0, y0), (x1, y1) = self.breakpoints[i], self.breakpoints[i + 1]
        return y0 + (y1 - y0) * (c - x0) / (x1 - x0)


def _pav(values: Sequence[Fraction], weights: Sequence[Fraction]) -> list[Fraction]:
    """Weighted pool-adjacent-violators: non-decreasing least-squares fit."""
    # each block: [weighted sum, weight, number of points]
    blocks: list[list] = []
    for v, w in zip(values, weights):
        blocks.append([v * w, w, 1])
        while len(blocks) > 1 and _mean(blocks[-2]) > _mean(blocks[-1]):
            s, ww, n = blocks.pop()
            blocks[-1][0] += s
            blocks[-1][1] += ww
            blocks[-1][2] += n
    fitted = []
    for block in blocks:
        fitted.extend([_mean(block)] * block[2])
    return fitted


def _mean(block) -> Fraction:
    s, w, _ = block
    # zero-weight blocks carry no information; keep them from ever violating
    return s / w if w else Fraction(0)


def isotonic_rescale(validation: ScoredDataset) -> MonotoneRescale:
    """Isotonic fit of correctness against confidence, as a step function.

    Records sharing a confidence are pooled first, so each distinct input
    confidence gets exactly one output.
    """
    levels: dict[float, list[Fraction]] = {}
    for r in validation.records:
        w = exact(r.weight)
        acc = levels.setdefault(r.confidence, [Fraction(0), Fraction(0)])
        acc[0] += w if r.correct else 0
        acc[1] += w
    xs = sorted(c for c, (_, w) in levels.items() if w > 0)
    if not xs:
        raise VocError("no positive-weight records to fit")
    weights = [levels[x][1] for x in xs]
    rates = [levels[x][0] / levels[x][1] for x in xs]
    fitted = _pav(rates, weights)
    return MonotoneRescale(tuple((x, float(y)) for x, y in zip(xs, fitted)), "step")


Rescale = Union[MonotoneRescale, Callable[[float], float]]


def apply_rescale(data: ScoredDataset, m: Rescale) -> ScoredDataset:
    """Replace every confidence ``c`` by ``m(c)``; everything else is kept."""
    return data.map_confidence(m)


@dataclass(frozen=True)
class DiscriminationReport:
    discrimination: float
    high_component: float
    low_component: float


def discrimination(data: ScoredDataset) -> DiscriminationReport:
    """Mean squared distance of confidence from 1/2, plus its two components.

    ``high_component`` is the mean of c**2 and ``low_component`` the mean of
    (1 - c)**2; their average equals ``discrimination + 0.25``.
    """
    mass: dict[float, Fraction] = {}
    for r in data.records:
        mass[r.confidence] = mass.get(r.confidence, Fraction(0)) + exact(r.weight)
    half = Fraction(1, 2)
    d = hi = lo = Fraction(0)
    for conf, w in mass.items():
        c = exact(conf)
        d += w * (half - c) ** 2
        hi += w * c * c
        lo += w * (1 - c) ** 2
    total = data.exact_total
    return DiscriminationReport(float(d / total), float(hi / total), float(lo / total))
