"""Static SVG line charts, emitted by hand so plotting needs no dependency.

The charts mirror the two experiment figures (test MAP vs tau, average
pseudo-positives vs tau); the results CSV remains the source of truth.
Output is a pure function of the input series, so re-rendering is
byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass
class Series:
    """One polyline: label for the legend, points, stroke styling."""

    label: str
    xs: Sequence[float]
    ys: Sequence[float]
    color: str
    dash: str | None = None  # SVG stroke-dasharray, e.g. "6,3"


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    return [float(v) for v in np.linspace(lo, hi, n)]


def _fmt_tick(v: float) -> str:
    text = f"{v:.3g}"
    return "0" if text == "-0" else text


def render_line_chart(
    series: Sequence[Series],
    *,
    title: str,
    x_label: str,
    y_label: str,
    width: int = 640,
    height: int = 420,
    y_range: tuple[float, float] | None = None,
) -> str:
    """Render series as an SVG line chart with axes, ticks and a legend."""
    if not series:
        raise ValueError("at least one series is required")
    left, right, top, bottom = 72, 24, 48, 58
    plot_w = width - left - right
    plot_h = height - top - bottom

    all_x = [float(x) for s in series for x in s.xs]
    all_y = [float(y) for s in series for y in s.ys]
    x_lo, x_hi = min(all_x), max(all_x)
    if x_hi <= x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_range is not None:
        y_lo, y_hi = y_range
    else:
        y_lo, y_hi = min(all_y), max(all_y)
        pad = 0.05 * (y_hi - y_lo) if y_hi > y_lo else 0.5
        y_lo, y_hi = y_lo - pad, y_hi + pad

    def px(x: float) -> float:
        return left + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return top + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" font-size="15" '
        f'font-weight="bold">{escape(title)}</text>',
    ]
    for xv in _nice_ticks(x_lo, x_hi):
        x = px(xv)
        out.append(
            f'<line x1="{x:.2f}" y1="{top}" x2="{x:.2f}" y2="{top + plot_h}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{x:.2f}" y="{top + plot_h + 20}" text-anchor="middle" '
            f'font-size="12">{_fmt_tick(xv)}</text>'
        )
    for yv in _nice_ticks(y_lo, y_hi):
        y = py(yv)
        out.append(
            f'<line x1="{left}" y1="{y:.2f}" x2="{left + plot_w}" y2="{y:.2f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-size="12">{_fmt_tick(yv)}</text>'
        )
    out.append(
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333"/>'
    )
    out.append(
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 14}" text-anchor="middle" '
        f'font-size="13">{escape(x_label)}</text>'
    )
    out.append(
        f'<text x="20" y="{top + plot_h / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 20 {top + plot_h / 2:.1f})">{escape(y_label)}</text>'
    )
    for s in series:
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        points = " ".join(f"{px(float(x)):.2f},{py(float(y)):.2f}" for x, y in zip(s.xs, s.ys))
        out.append(
            f'<polyline fill="none" stroke="{s.color}" stroke-width="2"{dash} '
            f'points="{points}"/>'
        )
        if s.dash is None:
            for x, y in zip(s.xs, s.ys):
                out.append(
                    f'<circle cx="{px(float(x)):.2f}" cy="{py(float(y)):.2f}" r="3" '
                    f'fill="{s.color}"/>'
                )
    legend_x = left + plot_w - 200
    legend_y = top + 10
    out.append(
        f'<rect x="{legend_x - 8}" y="{legend_y - 6}" width="200" '
        f'height="{len(series) * 18 + 10}" fill="white" fill-opacity="0.85" '
        f'stroke="#999999"/>'
    )
    for i, s in enumerate(series):
        y = legend_y + 8 + i * 18
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        out.append(
            f'<line x1="{legend_x}" y1="{y}" x2="{legend_x + 26}" y2="{y}" '
            f'stroke="{s.color}" stroke-width="2"{dash}/>'
        )
        out.append(
            f'<text x="{legend_x + 32}" y="{y + 4}" font-size="12">{escape(s.label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
