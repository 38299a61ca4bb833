"""Minimal deterministic SVG plots.

Two chart types back the command-line reports: a scatter of shifted-domain
mAP against original-domain mAP with the identity line, and a bar chart of
error-type percentages.  Output is plain SVG text with fixed coordinate
formatting, so identical data produces byte-identical files.
"""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

WIDTH = 640
HEIGHT = 480
MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 40
MARGIN_BOTTOM = 55

PALETTE = ("#4878a8", "#d1615d", "#6a9f58", "#e49444")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{_escape(title)}</text>',
    ]


def _axes(xlabel: str, ylabel: str) -> list[str]:
    x0, y0 = MARGIN_LEFT, HEIGHT - MARGIN_BOTTOM
    x1, y1 = WIDTH - MARGIN_RIGHT, MARGIN_TOP
    return [
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text x="{(x0 + x1) / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{_escape(xlabel)}</text>',
        f'<text x="18" y="{(y0 + y1) / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {(y0 + y1) / 2:.0f})">{_escape(ylabel)}</text>',
    ]


def _span(values: Sequence[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.08 * (hi - lo)
    return lo - pad, hi + pad


def scatter_svg(points: Sequence[tuple[float, float, str]], path: str | Path,
                xlabel: str, ylabel: str, title: str) -> None:
    """Labelled scatter with the identity line y = x for reference."""
    if not points:
        raise ValueError("scatter_svg needs at least one point")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    lo = min(_span(xs)[0], _span(ys)[0])
    hi = max(_span(xs)[1], _span(ys)[1])
    x0, y0 = MARGIN_LEFT, HEIGHT - MARGIN_BOTTOM
    x1, y1 = WIDTH - MARGIN_RIGHT, MARGIN_TOP

    def px(v: float) -> str:
        return _fmt(x0 + (v - lo) / (hi - lo) * (x1 - x0))

    def py(v: float) -> str:
        return _fmt(y0 - (v - lo) / (hi - lo) * (y0 - y1))

    parts = _header(title) + _axes(xlabel, ylabel)
    for k in range(5):
        v = lo + k * (hi - lo) / 4
        parts.append(f'<text x="{px(v)}" y="{y0 + 18}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{_fmt(v)}</text>')
        parts.append(f'<text x="{x0 - 8}" y="{py(v)}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{_fmt(v)}</text>')
    parts.append(f'<line x1="{px(lo)}" y1="{py(lo)}" x2="{px(hi)}" '
                 f'y2="{py(hi)}" stroke="#999999" stroke-dasharray="5,4"/>')
    for x, y, label in points:
        parts.append(f'<circle cx="{px(x)}" cy="{py(y)}" r="4" '
                     f'fill="{PALETTE[0]}" fill-opacity="0.85"/>')
        if label:
            parts.append(f'<text x="{_fmt(float(px(x)) + 6)}" y="{py(y)}" '
                         f'font-family="sans-serif" font-size="10">'
                         f'{_escape(label)}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def bar_chart_svg(labels: Sequence[str], series: dict[str, Sequence[float]],
                  path: str | Path, ylabel: str, title: str) -> None:
    """Grouped vertical bars; one group per label, one bar per series."""
    if not labels or not series:
        raise ValueError("bar_chart_svg needs labels and at least one series")
    for name, vals in series.items():
        if len(vals) != len(labels):
            raise ValueError(f"series {name!r} has {len(vals)} values for "
                             f"{len(labels)} labels")
    top = max(max(vals) for vals in series.values())
    top = top if top > 0 else 1.0
    x0, y0 = MARGIN_LEFT, HEIGHT - MARGIN_BOTTOM
    x1, y1 = WIDTH - MARGIN_RIGHT, MARGIN_TOP
    group_w = (x1 - x0) / len(labels)
    bar_w = group_w * 0.8 / len(series)

    def py(v: float) -> float:
        return y0 - v / (top * 1.1) * (y0 - y1)

    parts = _header(title) + _axes("", ylabel)
    for k in range(5):
        v = k * top * 1.1 / 4
        parts.append(f'<text x="{x0 - 8}" y="{_fmt(py(v))}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{_fmt(v)}</text>')
    for i, label in enumerate(labels):
        cx = x0 + (i + 0.5) * group_w
        parts.append(f'<text x="{_fmt(cx)}" y="{y0 + 16}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="10" '
                     f'transform="rotate(-30 {_fmt(cx)} {y0 + 16})">'
                     f'{_escape(label)}</text>')
        for s, (name, vals) in enumerate(series.items()):
            bx = cx - 0.4 * group_w + s * bar_w
            bh = y0 - py(vals[i])
            parts.append(f'<rect x="{_fmt(bx)}" y="{_fmt(py(vals[i]))}" '
                         f'width="{_fmt(bar_w)}" height="{_fmt(bh)}" '
                         f'fill="{PALETTE[s % len(PALETTE)]}"/>')
    for s, name in enumerate(series):
        ly = MARGIN_TOP + 14 * s
        parts.append(f'<rect x="{x1 - 130}" y="{ly - 9}" width="10" height="10" '
                     f'fill="{PALETTE[s % len(PALETTE)]}"/>')
        parts.append(f'<text x="{x1 - 115}" y="{ly}" font-family="sans-serif" '
                     f'font-size="11">{_escape(name)}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
