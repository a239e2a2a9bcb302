"""Self-contained SVG rendering of a frontier and its gap diagnostics.

Output is plain SVG markup assembled from fixed format strings, so
identical inputs produce identical bytes; no plotting library or font
rasterization is involved. Layout: diversity on the y axis against
performance on the x axis, the frontier as a green curve with point
markers, and, when an actual cohort is supplied, a red dot with dashed
red guides running to the curve (its possible gains on each axis).
"""

from __future__ import annotations

from typing import Sequence

from .frontier import Frontier, ParetoGapReport, interpolate_diversity, interpolate_performance

_WIDTH = 640
_HEIGHT = 480
_MARGIN = 60

_FRONTIER_COLOR = "#2e8b57"
_ACTUAL_COLOR = "#d62728"


def _fmt(x: float) -> str:
    return f"{x:.2f}"


class _Canvas:
    """Maps unit-square data coordinates onto the SVG viewport."""

    def __init__(self):
        self.x0, self.y0 = _MARGIN, _HEIGHT - _MARGIN
        self.x1, self.y1 = _WIDTH - _MARGIN, _MARGIN

    def x(self, p: float) -> float:
        return self.x0 + p * (self.x1 - self.x0)

    def y(self, d: float) -> float:
        return self.y0 + d * (self.y1 - self.y0)


def _axes(c: _Canvas) -> list[str]:
    parts = [
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<line x1="{c.x0}" y1="{c.y0}" x2="{c.x1}" y2="{c.y0}" stroke="black" stroke-width="1"/>',
        f'<line x1="{c.x0}" y1="{c.y0}" x2="{c.x0}" y2="{c.y1}" stroke="black" stroke-width="1"/>',
    ]
    for i in range(6):
        v = i / 5
        px, py = _fmt(c.x(v)), _fmt(c.y(v))
        parts.append(
            f'<line x1="{px}" y1="{c.y0}" x2="{px}" y2="{c.y0 + 4}" stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px}" y="{c.y0 + 18}" font-family="sans-serif" font-size="11" text-anchor="middle">{v:.1f}</text>'
        )
        parts.append(
            f'<line x1="{c.x0 - 4}" y1="{py}" x2="{c.x0}" y2="{py}" stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{c.x0 - 8}" y="{py}" font-family="sans-serif" font-size="11" text-anchor="end" dominant-baseline="middle">{v:.1f}</text>'
        )
    parts.append(
        f'<text x="{(c.x0 + c.x1) / 2:.2f}" y="{_HEIGHT - 16}" font-family="sans-serif" font-size="13" text-anchor="middle">cohort performance</text>'
    )
    parts.append(
        f'<text x="18" y="{(c.y0 + c.y1) / 2:.2f}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {(c.y0 + c.y1) / 2:.2f})">cohort diversity</text>'
    )
    return parts


def _frontier_layer(c: _Canvas, curve: Sequence[tuple[float, float]]) -> list[str]:
    parts = []
    if len(curve) > 1:
        coords = " ".join(f"{_fmt(c.x(p))},{_fmt(c.y(d))}" for p, d in curve)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{_FRONTIER_COLOR}" stroke-width="2"/>'
        )
    for p, d in curve:
        parts.append(
            f'<circle cx="{_fmt(c.x(p))}" cy="{_fmt(c.y(d))}" r="3.5" fill="{_FRONTIER_COLOR}"/>'
        )
    return parts


def _gap_layer(
    c: _Canvas, curve: Sequence[tuple[float, float]], report: ParetoGapReport
) -> list[str]:
    p_a, d_a = report.actual_performance, report.actual_diversity
    parts = []
    if report.diversity_gain_abs > 0.0:
        top = interpolate_diversity(curve, p_a)
        parts.append(
            f'<line x1="{_fmt(c.x(p_a))}" y1="{_fmt(c.y(d_a))}" x2="{_fmt(c.x(p_a))}" '
            f'y2="{_fmt(c.y(top))}" stroke="{_ACTUAL_COLOR}" stroke-width="1.5" stroke-dasharray="6 4"/>'
        )
    if report.performance_gain_abs > 0.0:
        right = interpolate_performance(curve, d_a)
        parts.append(
            f'<line x1="{_fmt(c.x(p_a))}" y1="{_fmt(c.y(d_a))}" x2="{_fmt(c.x(right))}" '
            f'y2="{_fmt(c.y(d_a))}" stroke="{_ACTUAL_COLOR}" stroke-width="1.5" stroke-dasharray="6 4"/>'
        )
    parts.append(
        f'<circle cx="{_fmt(c.x(p_a))}" cy="{_fmt(c.y(d_a))}" r="4.5" fill="{_ACTUAL_COLOR}"/>'
    )
    return parts


def render_frontier_svg(frontier: Frontier, gap: ParetoGapReport | None = None) -> str:
    """Render the frontier (and, optionally, an actual cohort with gain guides)."""
    c = _Canvas()
    curve = frontier.curve()
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">'
    ]
    parts.extend(_axes(c))
    parts.extend(_frontier_layer(c, curve))
    if gap is not None:
        parts.extend(_gap_layer(c, curve, gap))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
