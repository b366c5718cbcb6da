"""Minimal SVG line charts for results CSVs (no plotting dependency)."""

from __future__ import annotations

import math
from collections import defaultdict
from xml.sax.saxutils import escape

from . import io as bio

# kind -> (x column, x label, y column, y label, error columns)
FIGURES = {
    "linf-vs-L": ("L", "L (repeated comparisons)", "linf_mean", "mean l-inf error", ("linf_se",)),
    "linf-vs-pobs": ("p_obs", "p_obs (edge probability)", "linf_mean", "mean l-inf error", ("linf_se",)),
    "success-vs-deltaK": (
        "delta_K", "delta_K (separation)", "success_rate", "top-K success rate",
        ("success_ci_lo", "success_ci_hi"),
    ),
}
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]
WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 170, 40, 60


def required_columns(kind: str) -> list[str]:
    x, _, y, _, err = FIGURES[kind]
    return ["algo", x, y, *err]


def _series(rows, kind):
    x, _, y, _, err = FIGURES[kind]
    axes = [c for c in bio.CELL_KEY if c != x and c in rows[0]]
    varying = [c for c in axes if len({r[c] for r in rows}) > 1]
    groups = defaultdict(list)
    for r in rows:
        label = " ".join([r["algo"], *(f"{c}={r[c]}" for c in varying)])
        xv, yv = float(r[x]), float(r[y])
        if math.isnan(xv) or math.isnan(yv):
            continue
        if len(err) == 1:
            se = float(r[err[0]])
            lo, hi = yv - se, yv + se
        else:
            lo, hi = float(r[err[0]]), float(r[err[1]])
        groups[label].append((xv, yv, lo, hi))
    return {k: sorted(v) for k, v in groups.items()}


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def render_svg(rows: list[dict], kind: str) -> str:
    if kind not in FIGURES:
        raise ValueError(f"unknown figure kind {kind!r}; choose from {', '.join(FIGURES)}")
    _, xlabel, _, ylabel, _ = FIGURES[kind]
    series = _series(rows, kind) if rows else {}
    pts = [p for s in series.values() for p in s]
    xs = [p[0] for p in pts] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    if x0 == x1:
        x0, x1 = x0 - 0.5 * (abs(x0) or 1), x1 + 0.5 * (abs(x1) or 1)
    if kind == "success-vs-deltaK":
        y0, y1 = 0.0, 1.0
    else:
        ys = [v for p in pts for v in p[1:] if math.isfinite(v)] or [0.0, 1.0]
        y0, y1 = min(0.0, min(ys)), max(ys) * 1.05 or 1.0

    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(v):
        return LEFT + (v - x0) / (x1 - x0) * pw

    def sy(v):
        v = min(max(v, y0), y1)
        return TOP + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{LEFT + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">'
        f"{escape(kind)}</text>",
        f'<line class="axis" x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}" stroke="black"/>',
        f'<line class="axis" x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}" stroke="black"/>',
    ]
    for v in _ticks(x0, x1):
        out.append(f'<line x1="{sx(v):.1f}" y1="{TOP + ph}" x2="{sx(v):.1f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(v):.1f}" y="{TOP + ph + 18}" text-anchor="middle">{v:.3g}</text>')
    for v in _ticks(y0, y1):
        out.append(f'<line x1="{LEFT - 5}" y1="{sy(v):.1f}" x2="{LEFT}" y2="{sy(v):.1f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{sy(v) + 4:.1f}" text-anchor="end">{v:.3g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="18" y="{TOP + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {TOP + ph / 2:.1f})">{escape(ylabel)}</text>'
    )

    for idx, (label, points) in enumerate(series.items()):
        color = COLORS[idx % len(COLORS)]
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y, _, _ in points)
        out.append(f'<g class="series" data-label="{escape(label)}">')
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y, lo, hi in points:
            if math.isfinite(lo) and math.isfinite(hi):
                out.append(
                    f'<line class="errorbar" x1="{sx(x):.1f}" y1="{sy(lo):.1f}" '
                    f'x2="{sx(x):.1f}" y2="{sy(hi):.1f}" stroke="{color}"/>'
                )
            out.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" fill="{color}"/>')
        out.append("</g>")
        ly = TOP + 10 + 18 * idx
        out.append(f'<line x1="{WIDTH - RIGHT + 15}" y1="{ly}" x2="{WIDTH - RIGHT + 35}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{WIDTH - RIGHT + 40}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
