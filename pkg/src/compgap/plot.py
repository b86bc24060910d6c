"""Deterministic SVG rendering of the Qualification Space (SOQ vs SUQ)."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .errors import EmptyPointSet

WIDTH, HEIGHT = 800, 600
LEFT, TOP, SIZE = 100, 70, 460  # square plot area so the diagonal sits at 45 degrees
PALETTE = (
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e",
    "#e6ab02", "#a6761d", "#666666", "#1f78b4", "#b2df8a",
)


@dataclass(frozen=True)
class PlotPoint:
    candidate: str
    soq: float
    suq: float
    cluster: int = 1


def _nice_ceiling(x: float) -> float:
    if x <= 0:
        return 1.0
    exp = math.floor(math.log10(x))
    for m in (1, 2, 2.5, 5, 10):
        if m * 10**exp >= x * (1 - 1e-12):
            return m * 10**exp
    return 10 ** (exp + 1)


def cluster_color(cluster: int) -> str:
    return PALETTE[(cluster - 1) % len(PALETTE)]


def render_qs_svg(points: Sequence[PlotPoint], title: str = "Qualification Space") -> str:
    if not points:
        raise EmptyPointSet("nothing to plot")
    extent = _nice_ceiling(1.05 * max(max(p.soq for p in points), max(-p.suq for p in points)))

    def px(soq: float) -> float:
        return LEFT + SIZE * soq / extent

    def py(suq: float) -> float:
        return TOP + SIZE * (-suq) / extent

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{LEFT + SIZE / 2:.2f}" y="30" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{SIZE}" height="{SIZE}" fill="none" stroke="#000000"/>',
    ]
    for i in range(6):
        v = extent * i / 5
        x, y = px(v), py(-v)
        out.append(f'<line x1="{x:.2f}" y1="{TOP}" x2="{x:.2f}" y2="{TOP - 5}" stroke="#000000"/>')
        out.append(f'<text x="{x:.2f}" y="{TOP - 9}" text-anchor="middle">{v:.3g}</text>')
        out.append(f'<line x1="{LEFT - 5}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" stroke="#000000"/>')
        out.append(f'<text x="{LEFT - 8}" y="{y + 4:.2f}" text-anchor="end">{-v:.3g}</text>')
    out += [
        f'<text x="{LEFT + SIZE / 2:.2f}" y="{TOP + SIZE + 30}" text-anchor="middle">'
        "SOQ (sum of over-qualification)</text>",
        f'<text x="30" y="{TOP + SIZE / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 30 {TOP + SIZE / 2:.2f})">SUQ (sum of under-qualification)</text>',
        f'<line x1="{px(0):.2f}" y1="{py(0):.2f}" x2="{px(extent):.2f}" y2="{py(-extent):.2f}" '
        'stroke="#888888" stroke-dasharray="6,4"/>',
        f'<text x="{px(0.75 * extent):.2f}" y="{py(-0.25 * extent):.2f}" text-anchor="middle" '
        'fill="#888888">over-qualified</text>',
        f'<text x="{px(0.25 * extent):.2f}" y="{py(-0.75 * extent):.2f}" text-anchor="middle" '
        'fill="#888888">under-qualified</text>',
    ]
    for p in points:
        x, y = px(p.soq), py(p.suq)
        color = cluster_color(p.cluster)
        out.append(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="5" fill="{color}" stroke="#000000" stroke-width="0.5">'
            f"<title>{escape(p.candidate)}: SOQ={p.soq:.4f}, SUQ={p.suq:.4f}</title></circle>"
        )
        out.append(f'<text x="{x + 7:.2f}" y="{y - 6:.2f}">{escape(p.candidate)}</text>')
    lx, ly = LEFT + SIZE + 40, TOP + 10
    out.append(f'<text x="{lx}" y="{ly}" font-weight="bold">Cluster</text>')
    for i, cluster in enumerate(sorted({p.cluster for p in points})):
        y = ly + 20 * (i + 1)
        out.append(f'<rect x="{lx}" y="{y - 10}" width="12" height="12" fill="{cluster_color(cluster)}"/>')
        out.append(f'<text x="{lx + 18}" y="{y}">{cluster}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
