"""CSV and JSON emission plus a dependency-free SVG line plot."""

from __future__ import annotations

import io
import math
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptySeries, NonFiniteValue

Series = tuple[Sequence[float], Sequence[float], str]

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f")


def fmt(v) -> str:
    """17 significant digits for floats, so values re-parse bit for bit."""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.17g}"


def to_csv(columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        pad = abs(lo) * 0.1 or 1.0
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _range(vals: np.ndarray) -> tuple[float, float]:
    lo, hi = float(vals.min()), float(vals.max())
    if hi <= lo:
        pad = abs(lo) * 0.1 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def render_svg(
    series: Sequence[Series],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    width: int = 640,
    height: int = 420,
) -> str:
    """One polyline per ``(x, y, label)`` series, linear axes with ticks and a legend."""
    if not series:
        raise EmptySeries("need at least one series")
    flat = 0
    xs, ys = [], []
    for x, y, _ in series:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.size == 0 or x.shape != y.shape:
            raise EmptySeries("every series needs equal, nonzero numbers of x and y values")
        for arr in (x, y):
            bad = np.flatnonzero(~np.isfinite(arr))
            if bad.size:
                raise NonFiniteValue(flat + int(bad[0]))
        flat += x.size
        xs.append(x)
        ys.append(y)

    x0, x1 = _range(np.concatenate(xs))
    y0, y1 = _range(np.concatenate(ys))
    xt, yt = _nice_ticks(x0, x1), _nice_ticks(y0, y1)
    x0, x1 = min(x0, xt[0]), max(x1, xt[-1])
    y0, y1 = min(y0, yt[0]), max(y1, yt[-1])

    left, right, top, bottom = 70, 160, 40, 55
    pw, ph = width - left - right, height - top - bottom

    def px(v):
        return left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return top + ph - (v - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}px" height="{height}px" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<g font-family="sans-serif" font-size="11">',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for v in xt:
        p = px(v)
        out.append(f'<line x1="{p:.2f}" y1="{top + ph}" x2="{p:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{p:.2f}" y="{top + ph + 18}" text-anchor="middle">{v:.4g}</text>')
    for v in yt:
        p = py(v)
        out.append(f'<line x1="{left - 5}" y1="{p:.2f}" x2="{left}" y2="{p:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{p + 4:.2f}" text-anchor="end">{v:.4g}</text>')
    if title:
        out.append(f'<text x="{left + pw / 2:.2f}" y="{top - 15}" text-anchor="middle" font-size="14">{escape(title)}</text>')
    if xlabel:
        out.append(f'<text x="{left + pw / 2:.2f}" y="{height - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        cy = top + ph / 2
        out.append(f'<text x="16" y="{cy:.2f}" text-anchor="middle" transform="rotate(-90 16 {cy:.2f})">{escape(ylabel)}</text>')
    for i, ((_, _, label), x, y) in enumerate(zip(series, xs, ys)):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        for a, b in zip(x, y):
            out.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="2" fill="{color}"/>')
        ly = top + 10 + 18 * i
        lx = left + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
