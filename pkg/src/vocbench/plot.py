"""Deterministic SVG line plots of VOC curves.

Output depends only on the curves and options: coordinates are printed with a
fixed number of decimals and elements are emitted in input order.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence
from xml.sax.saxutils import escape

from .voc import VocCurve

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 150, 24, 48


def _f(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _curve_points(curve: VocCurve, omega_max: Fraction) -> list[tuple[float, float]]:
    xs = [k for k in curve.knots if k < omega_max] + [omega_max]
    return [(float(x), float(curve.exact_at(x))) for x in xs]


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    step = (hi - lo) / n
    return [lo + i * step for i in range(n + 1)]


def render_svg(curves: Sequence[VocCurve], labels: Sequence[str], omega_max: float = 10.0, title: str = "VOC") -> str:
    """SVG text plotting each curve on ``0 <= omega <= omega_max``."""
    if len(curves) != len(labels):
        raise ValueError("one label per curve")
    wmax = Fraction(omega_max)
    series = [_curve_points(c, wmax) for c in curves]
    ys = [y for pts in series for _, y in pts] + [0.0, 1.0]
    y_lo, y_hi = min(ys), max(ys)
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x: float) -> float:
        return MARGIN_L + plot_w * x / float(omega_max)

    def sy(y: float) -> float:
        return MARGIN_T + plot_h * (y_hi - y) / (y_hi - y_lo)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<g stroke="#999" stroke-width="1">',
        f'<line x1="{_f(sx(0))}" y1="{_f(sy(y_lo))}" x2="{_f(sx(0))}" y2="{_f(sy(y_hi))}"/>',
        f'<line x1="{_f(sx(0))}" y1="{_f(sy(0))}" x2="{_f(sx(float(omega_max)))}" y2="{_f(sy(0))}"/>',
        "</g>",
        '<g fill="#333">',
    ]
    for x in _ticks(0.0, float(omega_max)):
        out.append(f'<text x="{_f(sx(x))}" y="{_f(HEIGHT - MARGIN_B + 16)}" text-anchor="middle">{_f(x)}</text>')
    for y in _ticks(y_lo, y_hi):
        out.append(f'<text x="{_f(MARGIN_L - 6)}" y="{_f(sy(y) + 4)}" text-anchor="end">{_f(y)}</text>')
    out.append(f'<text x="{_f(MARGIN_L + plot_w / 2)}" y="{HEIGHT - 8}" text-anchor="middle">penalty ω</text>')
    out.append(
        f'<text x="16" y="{_f(MARGIN_T + plot_h / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_f(MARGIN_T + plot_h / 2)})">value per sample</text>'
    )
    out.append("</g>")
    for i, (pts, label) in enumerate(zip(series, labels)):
        color = PALETTE[i % len(PALETTE)]
        path = " ".join(f"{_f(sx(x))},{_f(sy(y))}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{path}"/>')
        ly = MARGIN_T + 16 + 18 * i
        lx = WIDTH - MARGIN_R + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
