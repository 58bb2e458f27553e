"""Minimal standalone SVG writers: heatmaps, line plots and simplex scatter."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .qinfo import TRIANGLE


def _colour(t: float) -> str:
    """Blue-white-red ramp for t in [0, 1]; grey for non-finite values."""
    if not math.isfinite(t):
        return "#999999"
    t = min(1.0, max(0.0, t))
    if t < 0.5:
        s = t / 0.5
        r, g, b = 0.23 + 0.77 * s, 0.30 + 0.70 * s, 0.75 + 0.25 * s
    else:
        s = (t - 0.5) / 0.5
        r, g, b = 1.0 - 0.29 * s, 1.0 - 0.98 * s, 1.0 - 0.85 * s
    return "#{:02x}{:02x}{:02x}".format(int(255 * r), int(255 * g), int(255 * b))


def _document(width: int, height: int, body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">')
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *body, "</svg>", ""])


def heatmap(path, xs, ys, values, title: str = "", xlabel: str = "x13", ylabel: str = "x23",
            overlay: list[np.ndarray] | None = None, cell: int = 8) -> Path:
    """Cells coloured by ``values[i, j]`` at (xs[i], ys[j]), normalised to the finite data range.

    ``overlay`` curves are (n, 2) arrays in data coordinates drawn as polylines.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    v = np.asarray(values, dtype=float)
    finite = v[np.isfinite(v)]
    lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    span = hi - lo if hi > lo else 1.0
    margin = 50
    w = margin * 2 + cell * len(xs)
    h = margin * 2 + cell * len(ys)
    body = []
    for i in range(len(xs)):
        for j in range(len(ys)):
            x = margin + cell * i
            y = margin + cell * (len(ys) - 1 - j)
            body.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{_colour((v[i, j] - lo) / span)}"/>')

    def to_px(px, py):
        dx = (xs[-1] - xs[0]) or 1.0
        dy = (ys[-1] - ys[0]) or 1.0
        return (margin + cell / 2 + (px - xs[0]) / dx * cell * (len(xs) - 1),
                margin + cell / 2 + (ys[-1] - py) / dy * cell * (len(ys) - 1))

    for curve in overlay or []:
        pts = " ".join("{:.2f},{:.2f}".format(*to_px(a, b)) for a, b in np.asarray(curve)
                       if xs[0] <= a <= xs[-1] and ys[0] <= b <= ys[-1])
        if pts:
            body.append(f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1.5"/>')
    body.append(f'<text x="{w / 2:.0f}" y="{h - 15}" text-anchor="middle" font-size="14">{xlabel}</text>')
    body.append(f'<text x="15" y="{h / 2:.0f}" text-anchor="middle" font-size="14" '
                f'transform="rotate(-90 15 {h / 2:.0f})">{ylabel}</text>')
    body.append(f'<text x="{w / 2:.0f}" y="25" text-anchor="middle" font-size="14">{title} '
                f'[{lo:.3g}, {hi:.3g}]</text>')
    out = Path(path)
    out.write_text(_document(w, h, body), encoding="utf-8")
    return out


def line_plot(path, series: dict[str, tuple[np.ndarray, np.ndarray]], title: str = "",
              xlabel: str = "x23", ylabel: str = "", width: int = 560, height: int = 380) -> Path:
    """One polyline per named series, axes scaled to the union of all finite data."""
    palette = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
    xs = np.concatenate([np.asarray(x, float) for x, _ in series.values()]) if series else np.zeros(1)
    ys = np.concatenate([np.asarray(y, float) for _, y in series.values()]) if series else np.zeros(1)
    xs, ys = xs[np.isfinite(xs)], ys[np.isfinite(ys)]
    x0, x1 = (xs.min(), xs.max()) if xs.size else (0.0, 1.0)
    y0, y1 = (ys.min(), ys.max()) if ys.size else (0.0, 1.0)
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0
    m = 55
    body = [f'<rect x="{m}" y="{m}" width="{width - 2 * m}" height="{height - 2 * m}" fill="none" stroke="black"/>']
    for n, (name, (x, y)) in enumerate(series.items()):
        c = palette[n % len(palette)]
        pts = " ".join(
            f"{m + (a - x0) / (x1 - x0) * (width - 2 * m):.2f},{height - m - (b - y0) / (y1 - y0) * (height - 2 * m):.2f}"
            for a, b in zip(np.asarray(x, float), np.asarray(y, float)) if math.isfinite(a) and math.isfinite(b)
        )
        body.append(f'<polyline points="{pts}" fill="none" stroke="{c}" stroke-width="1.5"/>')
        body.append(f'<text x="{width - m + 5}" y="{m + 15 * n + 10}" font-size="11" fill="{c}">{name}</text>')
    body.append(f'<text x="{width / 2:.0f}" y="{height - 15}" text-anchor="middle" font-size="14">{xlabel} '
                f'[{x0:.3g}, {x1:.3g}]</text>')
    body.append(f'<text x="15" y="{height / 2:.0f}" text-anchor="middle" font-size="14" '
                f'transform="rotate(-90 15 {height / 2:.0f})">{ylabel} [{y0:.3g}, {y1:.3g}]</text>')
    body.append(f'<text x="{width / 2:.0f}" y="25" text-anchor="middle" font-size="14">{title}</text>')
    out = Path(path)
    out.write_text(_document(width + 80, height, body), encoding="utf-8")
    return out


def simplex_scatter(path, groups: dict[str, np.ndarray], title: str = "", size: int = 420) -> Path:
    """Triangle with inscribed circle and one colour per group of (u, v) points."""
    palette = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
    m = 40
    scale = size - 2 * m

    def px(u, v):
        return m + u * scale, size - m - v * scale

    tri = " ".join("{:.2f},{:.2f}".format(*px(*p)) for p in TRIANGLE)
    cx, cy = px(*TRIANGLE.mean(axis=0))
    r = scale / (2.0 * math.sqrt(3.0))
    body = [
        f'<polygon points="{tri}" fill="none" stroke="black"/>',
        f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="none" stroke="grey" stroke-dasharray="4 3"/>',
    ]
    for n, (name, pts) in enumerate(groups.items()):
        c = palette[n % len(palette)]
        for u, v in np.asarray(pts, float).reshape(-1, 2):
            x, y = px(u, v)
            body.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="1.6" fill="{c}" fill-opacity="0.7"/>')
        body.append(f'<text x="{m}" y="{m + 15 * n}" font-size="12" fill="{c}">{name}</text>')
    for label, p in zip(("P1", "P2", "P3"), TRIANGLE):
        x, y = px(*p)
        body.append(f'<text x="{x:.1f}" y="{y + (16 if p[1] == 0 else -6):.1f}" text-anchor="middle" font-size="12">{label}</text>')
    body.append(f'<text x="{size / 2:.0f}" y="18" text-anchor="middle" font-size="14">{title}</text>')
    out = Path(path)
    out.write_text(_document(size, size, body), encoding="utf-8")
    return out
