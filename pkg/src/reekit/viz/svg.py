"""Deterministic SVG export for every payload kind.

Identical payloads yield identical bytes: colours are assigned by the
lexicographic order of category values, floats are written with fixed
precision, and nothing depends on locale or time. 3D scatter is exported as
a fixed-angle isometric projection (interactive rotation is a client
concern).
"""

from __future__ import annotations

import math
from typing import Optional
from xml.sax.saxutils import escape

from ..errors import UnsupportedKind
from .kde import contour_segments, DensityGrid, AxisMarginal
from .payloads import VizPayload

# Colourblind-aware categorical palette (Okabe-Ito plus extras).
PALETTE = (
    "#0072B2",
    "#E69F00",
    "#009E73",
    "#CC79A7",
    "#56B4E9",
    "#D55E00",
    "#F0E442",
    "#999999",
    "#7859A6",
    "#2F4B7C",
    "#A05195",
    "#665191",
)

THEMES = {
    "light": {"bg": "#ffffff", "fg": "#222222", "grid": "#dddddd"},
    "dark": {"bg": "#1e1e1e", "fg": "#e6e6e6", "grid": "#444444"},
}

MARGIN = {"left": 62.0, "right": 18.0, "top": 32.0, "bottom": 48.0}


def _f(v: float) -> str:
    return f"{v:.2f}"


def _color(group: str, groups: list[str]) -> str:
    try:
        return PALETTE[groups.index(group) % len(PALETTE)]
    except ValueError:
        return PALETTE[0]


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi):
        return []
    if hi <= lo:
        return [lo]
    span = hi - lo
    raw_step = span / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw_step))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw_step <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + step * 1e-9:
        ticks.append(round(t, 12))
        t += step
    return ticks


class _Frame:
    """Linear data-to-pixel mapping inside the plot rectangle."""

    def __init__(self, width, height, x_range, y_range):
        self.px0 = MARGIN["left"]
        self.px1 = width - MARGIN["right"]
        self.py0 = MARGIN["top"]
        self.py1 = height - MARGIN["bottom"]
        x_lo, x_hi = x_range
        y_lo, y_hi = y_range
        if x_hi <= x_lo:
            x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
        if y_hi <= y_lo:
            y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
        self.x_lo, self.x_hi = x_lo, x_hi
        self.y_lo, self.y_hi = y_lo, y_hi

    def x(self, v: float) -> float:
        return self.px0 + (v - self.x_lo) / (self.x_hi - self.x_lo) * (
            self.px1 - self.px0
        )

    def y(self, v: float) -> float:
        return self.py1 - (v - self.y_lo) / (self.y_hi - self.y_lo) * (
            self.py1 - self.py0
        )


def _axes(parts, frame, theme, x_label, y_label, x_ticks=None, y_ticks=None,
          x_tick_labels=None):
    fg = theme["fg"]
    grid = theme["grid"]
    parts.append(
        f'<rect x="{_f(frame.px0)}" y="{_f(frame.py0)}" '
        f'width="{_f(frame.px1 - frame.px0)}" height="{_f(frame.py1 - frame.py0)}" '
        f'fill="none" stroke="{fg}" stroke-width="1"/>'
    )
    if x_ticks is None:
        x_ticks = _nice_ticks(frame.x_lo, frame.x_hi)
    if y_ticks is None:
        y_ticks = _nice_ticks(frame.y_lo, frame.y_hi)
    for i, t in enumerate(x_ticks):
        px = frame.x(t)
        label = x_tick_labels[i] if x_tick_labels else f"{t:.4g}"
        parts.append(
            f'<line x1="{_f(px)}" y1="{_f(frame.py0)}" x2="{_f(px)}" '
            f'y2="{_f(frame.py1)}" stroke="{grid}" stroke-width="0.5"/>'
        )
        parts.append(
            f'<text x="{_f(px)}" y="{_f(frame.py1 + 16)}" font-size="10" '
            f'text-anchor="middle" fill="{fg}">{escape(label)}</text>'
        )
    for t in y_ticks:
        py = frame.y(t)
        parts.append(
            f'<line x1="{_f(frame.px0)}" y1="{_f(py)}" x2="{_f(frame.px1)}" '
            f'y2="{_f(py)}" stroke="{grid}" stroke-width="0.5"/>'
        )
        parts.append(
            f'<text x="{_f(frame.px0 - 6)}" y="{_f(py + 3)}" font-size="10" '
            f'text-anchor="end" fill="{fg}">{t:.4g}</text>'
        )
    mid_x = (frame.px0 + frame.px1) / 2
    parts.append(
        f'<text x="{_f(mid_x)}" y="{_f(frame.py1 + 34)}" font-size="12" '
        f'text-anchor="middle" fill="{fg}">{escape(x_label)}</text>'
    )
    mid_y = (frame.py0 + frame.py1) / 2
    parts.append(
        f'<text x="14" y="{_f(mid_y)}" font-size="12" text-anchor="middle" '
        f'fill="{fg}" transform="rotate(-90 14 {_f(mid_y)})">{escape(y_label)}</text>'
    )


def _legend(parts, theme, groups, width):
    fg = theme["fg"]
    x = width - MARGIN["right"] - 120
    y = MARGIN["top"] + 8
    for i, g in enumerate(groups):
        color = PALETTE[i % len(PALETTE)]
        parts.append(
            f'<rect x="{_f(x)}" y="{_f(y + 16 * i)}" width="10" height="10" '
            f'fill="{color}"/>'
        )
        parts.append(
            f'<text x="{_f(x + 14)}" y="{_f(y + 16 * i + 9)}" font-size="10" '
            f'fill="{fg}">{escape(str(g))}</text>'
        )


def export_svg(
    payload: VizPayload, size: tuple[int, int] = (800, 600), theme: str = "light"
) -> bytes:
    """Render a payload to SVG bytes; identical inputs, identical bytes."""
    colors = THEMES.get(theme, THEMES["light"])
    width, height = float(size[0]), float(size[1])
    renderers = {
        "spider": _render_spider,
        "scatter2d": _render_scatter2d,
        "scatter3d": _render_scatter3d,
        "splom": _render_splom,
        "density_contour": _render_density,
        "violin": _render_violin,
    }
    if payload.kind not in renderers:
        raise UnsupportedKind(f"cannot export kind {payload.kind!r}")
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(width)}" '
        f'height="{int(height)}" viewBox="0 0 {int(width)} {int(height)}">',
        f'<rect x="0" y="0" width="{int(width)}" height="{int(height)}" '
        f'fill="{colors["bg"]}"/>',
    ]
    renderers[payload.kind](parts, payload, width, height, colors)
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


def _render_spider(parts, payload, width, height, theme):
    s = payload.series
    radii = s["radius_pm"]
    lines = s["lines"]
    groups = list(s.get("groups", []))
    log_values = [
        math.log10(v)
        for line in lines
        for v in line["values"]
        if v is not None and v > 0
    ]
    if log_values:
        y_lo, y_hi = min(log_values), max(log_values)
        if y_hi - y_lo < 0.5:
            y_lo -= 0.5
            y_hi += 0.5
    else:
        y_lo, y_hi = -1.0, 1.0
    # Radius decreases left to right (La first).
    frame = _Frame(width, height, (0, len(radii) - 1), (y_lo, y_hi))
    y_ticks = [t for t in range(math.floor(y_lo), math.ceil(y_hi) + 1)]
    _axes(
        parts,
        frame,
        theme,
        payload.axis_labels[0],
        payload.axis_labels[1],
        x_ticks=list(range(len(radii))),
        y_ticks=y_ticks,
        x_tick_labels=[f"{r:.0f}" for r in radii],
    )
    for line in lines:
        color = _color(line["group"], groups)
        segment: list[str] = []
        for i, v in enumerate(line["values"]):
            if v is None or v <= 0:
                if len(segment) > 1:
                    parts.append(
                        f'<polyline points="{" ".join(segment)}" fill="none" '
                        f'stroke="{color}" stroke-width="1.2"/>'
                    )
                segment = []
                continue
            segment.append(f"{_f(frame.x(i))},{_f(frame.y(math.log10(v)))}")
        if len(segment) > 1:
            parts.append(
                f'<polyline points="{" ".join(segment)}" fill="none" '
                f'stroke="{color}" stroke-width="1.2"/>'
            )
    if groups and groups != ["all"]:
        _legend(parts, theme, groups, width)


def _point_ranges(points, key_x="x", key_y="y"):
    xs = [p[key_x] for p in points]
    ys = [p[key_y] for p in points]
    if not xs:
        return (0.0, 1.0), (0.0, 1.0)
    pad_x = (max(xs) - min(xs)) * 0.05 or 0.5
    pad_y = (max(ys) - min(ys)) * 0.05 or 0.5
    return (min(xs) - pad_x, max(xs) + pad_x), (min(ys) - pad_y, max(ys) + pad_y)


def _render_scatter2d(parts, payload, width, height, theme):
    s = payload.series
    points = s["points"]
    groups = list(s.get("groups", []))
    x_range, y_range = _point_ranges(points)
    frame = _Frame(width, height, x_range, y_range)
    _axes(parts, frame, theme, payload.axis_labels[0], payload.axis_labels[1])
    for p in points:
        parts.append(
            f'<circle cx="{_f(frame.x(p["x"]))}" cy="{_f(frame.y(p["y"]))}" '
            f'r="3" fill="{_color(p["group"], groups)}" fill-opacity="0.8"/>'
        )
    if groups and groups != ["all"]:
        _legend(parts, theme, groups, width)


_ISO_COS = math.cos(math.radians(30))
_ISO_SIN = math.sin(math.radians(30))


def _iso_project(x, y, z):
    """Fixed-angle isometric projection of unit-cube coordinates."""
    u = (x - y) * _ISO_COS
    v = (x + y) * _ISO_SIN - z
    return u, v


def _render_scatter3d(parts, payload, width, height, theme):
    s = payload.series
    points = s["points"]
    groups = list(s.get("groups", []))

    def unit(vals):
        lo, hi = (min(vals), max(vals)) if vals else (0.0, 1.0)
        span = (hi - lo) or 1.0
        return lo, span

    x_lo, x_span = unit([p["x"] for p in points])
    y_lo, y_span = unit([p["y"] for p in points])
    z_lo, z_span = unit([p["z"] for p in points])
    projected = []
    for p in points:
        u, v = _iso_project(
            (p["x"] - x_lo) / x_span,
            (p["y"] - y_lo) / y_span,
            (p["z"] - z_lo) / z_span,
        )
        projected.append((u, v, p["group"]))
    corners = [
        _iso_project(cx, cy, cz)
        for cx in (0.0, 1.0)
        for cy in (0.0, 1.0)
        for cz in (0.0, 1.0)
    ]
    us = [u for u, _ in corners] + [u for u, _, _ in projected]
    vs = [v for _, v in corners] + [v for _, v, _ in projected]
    frame = _Frame(width, height, (min(us), max(us)), (min(vs), max(vs)))
    fg = theme["fg"]
    origin = _iso_project(0.0, 0.0, 0.0)
    for axis_end, label in (
        (_iso_project(1.0, 0.0, 0.0), payload.axis_labels[0]),
        (_iso_project(0.0, 1.0, 0.0), payload.axis_labels[1]),
        (_iso_project(0.0, 0.0, 1.0), payload.axis_labels[2]),
    ):
        parts.append(
            f'<line x1="{_f(frame.x(origin[0]))}" y1="{_f(frame.y(origin[1]))}" '
            f'x2="{_f(frame.x(axis_end[0]))}" y2="{_f(frame.y(axis_end[1]))}" '
            f'stroke="{fg}" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_f(frame.x(axis_end[0]) + 4)}" '
            f'y="{_f(frame.y(axis_end[1]) - 4)}" font-size="10" '
            f'fill="{fg}">{escape(label)}</text>'
        )
    for u, v, group in projected:
        parts.append(
            f'<circle cx="{_f(frame.x(u))}" cy="{_f(frame.y(v))}" r="3" '
            f'fill="{_color(group, groups)}" fill-opacity="0.8"/>'
        )
    if groups and groups != ["all"]:
        _legend(parts, theme, groups, width)


def _render_splom(parts, payload, width, height, theme):
    s = payload.series
    indices = s["indices"]
    n = len(indices)
    ranges = {int(k): v for k, v in s["ranges"].items()}
    groups = list(s.get("groups", []))
    point_groups = s.get("point_groups", [])
    fg = theme["fg"]
    inner_w = width - MARGIN["left"] - MARGIN["right"]
    inner_h = height - MARGIN["top"] - MARGIN["bottom"]
    cell_w = inner_w / n
    cell_h = inner_h / n
    gap = 6.0

    def cell_origin(row, col):
        return (
            MARGIN["left"] + col * cell_w,
            MARGIN["top"] + row * cell_h,
        )

    panel_map = {(p["x_index"], p["y_index"]): p for p in s["panels"]}
    for row, yi in enumerate(indices):
        for col, xi in enumerate(indices):
            ox, oy = cell_origin(row, col)
            x0, y0 = ox + gap / 2, oy + gap / 2
            w, h = cell_w - gap, cell_h - gap
            parts.append(
                f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(w)}" '
                f'height="{_f(h)}" fill="none" stroke="{fg}" stroke-width="0.7"/>'
            )
            if xi == yi:
                diag = next(d for d in s["diagonals"] if d["index"] == xi)
                counts = diag["histogram_counts"]
                edges = diag["histogram_edges"]
                if counts:
                    peak = max(counts) or 1
                    lo, hi = ranges[xi]
                    span = (hi - lo) or 1.0
                    for ci, c in enumerate(counts):
                        bx0 = x0 + (edges[ci] - lo) / span * w
                        bx1 = x0 + (edges[ci + 1] - lo) / span * w
                        bh = (c / peak) * (h - 4)
                        parts.append(
                            f'<rect x="{_f(bx0)}" y="{_f(y0 + h - bh)}" '
                            f'width="{_f(max(bx1 - bx0, 0.5))}" height="{_f(bh)}" '
                            f'fill="{PALETTE[0]}" fill-opacity="0.55"/>'
                        )
                label = payload.axis_labels[indices.index(xi)]
                parts.append(
                    f'<text x="{_f(x0 + w / 2)}" y="{_f(y0 + 12)}" font-size="9" '
                    f'text-anchor="middle" fill="{fg}">{escape(label)}</text>'
                )
                continue
            panel = panel_map[(xi, yi)]
            x_lo, x_hi = ranges[xi]
            y_lo, y_hi = ranges[yi]
            x_span = (x_hi - x_lo) or 1.0
            y_span = (y_hi - y_lo) or 1.0
            for k, (px, py) in enumerate(panel["points"]):
                cx = x0 + (px - x_lo) / x_span * w
                cy = y0 + h - (py - y_lo) / y_span * h
                group = point_groups[k] if k < len(point_groups) else "all"
                parts.append(
                    f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="1.8" '
                    f'fill="{_color(group, groups)}" fill-opacity="0.75"/>'
                )
    if groups and groups != ["all"]:
        _legend(parts, theme, groups, width)


def _grid_from_jsonable(obj: dict) -> DensityGrid:
    import numpy as np

    return DensityGrid(
        x_grid=np.asarray(obj["x_grid"]),
        y_grid=np.asarray(obj["y_grid"]),
        density=np.asarray(obj["density"]),
        contour_levels=list(obj["contour_levels"]),
        bandwidth=tuple(obj["bandwidth"]),
        marginal_kind=obj["marginal_kind"],
        marginal_x=AxisMarginal(**obj["marginal_x"]),
        marginal_y=AxisMarginal(**obj["marginal_y"]),
    )


def _render_density(parts, payload, width, height, theme):
    s = payload.series
    categories = s["categories"]
    groups = sorted(categories)
    grids = {g: _grid_from_jsonable(categories[g]) for g in groups}
    if grids:
        x_lo = min(float(g.x_grid[0]) for g in grids.values())
        x_hi = max(float(g.x_grid[-1]) for g in grids.values())
        y_lo = min(float(g.y_grid[0]) for g in grids.values())
        y_hi = max(float(g.y_grid[-1]) for g in grids.values())
    else:
        x_lo, x_hi, y_lo, y_hi = 0.0, 1.0, 0.0, 1.0
    frame = _Frame(width, height, (x_lo, x_hi), (y_lo, y_hi))
    _axes(parts, frame, theme, payload.axis_labels[0], payload.axis_labels[1])
    for g in groups:
        grid = grids[g]
        color = _color(g, groups)
        n_levels = len(grid.contour_levels)
        for li, level in enumerate(grid.contour_levels):
            opacity = 0.25 + 0.75 * (li + 1) / n_levels
            pieces = []
            for x1, y1, x2, y2 in contour_segments(grid, level):
                pieces.append(
                    f"M{_f(frame.x(x1))} {_f(frame.y(y1))} "
                    f"L{_f(frame.x(x2))} {_f(frame.y(y2))}"
                )
            if pieces:
                parts.append(
                    f'<path d="{" ".join(pieces)}" fill="none" stroke="{color}" '
                    f'stroke-opacity="{opacity:.3f}" stroke-width="1"/>'
                )
        if grid.marginal_kind == "rug":
            for v in grid.marginal_x.rug:
                px = frame.x(v)
                parts.append(
                    f'<line x1="{_f(px)}" y1="{_f(frame.py1)}" x2="{_f(px)}" '
                    f'y2="{_f(frame.py1 + 6)}" stroke="{color}" stroke-width="1"/>'
                )
            for v in grid.marginal_y.rug:
                py = frame.y(v)
                parts.append(
                    f'<line x1="{_f(frame.px0 - 6)}" y1="{_f(py)}" '
                    f'x2="{_f(frame.px0)}" y2="{_f(py)}" stroke="{color}" '
                    f'stroke-width="1"/>'
                )
        else:
            counts = grid.marginal_x.histogram_counts
            edges = grid.marginal_x.histogram_edges
            peak = max(counts) if counts else 1
            for ci, c in enumerate(counts):
                bx0 = frame.x(edges[ci])
                bx1 = frame.x(edges[ci + 1])
                bh = (c / peak) * 18.0
                parts.append(
                    f'<rect x="{_f(bx0)}" y="{_f(MARGIN["top"] - bh + 18)}" '
                    f'width="{_f(max(bx1 - bx0, 0.5))}" height="{_f(bh)}" '
                    f'fill="{color}" fill-opacity="0.5"/>'
                )
    if groups and groups != ["all"]:
        _legend(parts, theme, groups, width)


def _render_violin(parts, payload, width, height, theme):
    s = payload.series
    violins = s["violins"]
    groups = [v["group"] for v in violins]
    values = [p for v in violins for p in v["points"]]
    if values:
        y_lo, y_hi = min(values), max(values)
        pad = (y_hi - y_lo) * 0.08 or 0.5
        y_lo, y_hi = y_lo - pad, y_hi + pad
    else:
        y_lo, y_hi = 0.0, 1.0
    frame = _Frame(width, height, (-0.5, max(len(violins) - 0.5, 0.5)), (y_lo, y_hi))
    _axes(
        parts,
        frame,
        theme,
        payload.axis_labels[0],
        payload.axis_labels[1],
        x_ticks=list(range(len(violins))),
        x_tick_labels=[v["group"] for v in violins],
    )
    slot_w = (frame.px1 - frame.px0) / max(len(violins), 1) * 0.38
    for vi, v in enumerate(violins):
        color = _color(v["group"], sorted(groups))
        cx = frame.x(vi)
        dens = v["densities"]
        peak = max(dens) if dens and max(dens) > 0 else 1.0
        right = [
            f"{_f(cx + d / peak * slot_w)},{_f(frame.y(p))}"
            for p, d in zip(v["positions"], dens)
        ]
        left = [
            f"{_f(cx - d / peak * slot_w)},{_f(frame.y(p))}"
            for p, d in zip(reversed(v["positions"]), reversed(dens))
        ]
        if right:
            parts.append(
                f'<polygon points="{" ".join(right + left)}" fill="{color}" '
                f'fill-opacity="0.35" stroke="{color}" stroke-width="1"/>'
            )
        box_w = slot_w * 0.28
        parts.append(
            f'<line x1="{_f(cx)}" y1="{_f(frame.y(v["whisker_low"]))}" '
            f'x2="{_f(cx)}" y2="{_f(frame.y(v["whisker_high"]))}" '
            f'stroke="{theme["fg"]}" stroke-width="1"/>'
        )
        parts.append(
            f'<rect x="{_f(cx - box_w)}" y="{_f(frame.y(v["q3"]))}" '
            f'width="{_f(2 * box_w)}" height="{_f(frame.y(v["q1"]) - frame.y(v["q3"]))}" '
            f'fill="{theme["bg"]}" stroke="{theme["fg"]}" stroke-width="1"/>'
        )
        parts.append(
            f'<line x1="{_f(cx - box_w)}" y1="{_f(frame.y(v["median"]))}" '
            f'x2="{_f(cx + box_w)}" y2="{_f(frame.y(v["median"]))}" '
            f'stroke="{theme["fg"]}" stroke-width="1.4"/>'
        )
        for p in v["points"]:
            parts.append(
                f'<circle cx="{_f(cx)}" cy="{_f(frame.y(p))}" r="1.6" '
                f'fill="{color}" fill-opacity="0.8"/>'
            )
