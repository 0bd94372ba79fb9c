"""Chart math for the density-based visualisations: Gaussian KDE grids,
violin statistics, and contour extraction. All of it is render-agnostic;
the SVG writer and the web client only consume the structures built here.

Bandwidths follow Silverman's rule of thumb with the robust
min(std, IQR/1.34) spread estimate. Grid kernels run through
``reekit._kernels`` (numba or numpy backend).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .._kernels import kde1d, kde2d
from ..errors import TooFewPoints, TooFewPointsForDensity

DENSITY_GRID_SIZE = 128
DENSITY_PAD_BANDWIDTHS = 3.0
CONTOUR_LEVEL_COUNT = 8
CONTOUR_LEVEL_SPAN = (0.05, 0.95)  # fractions of max density
VIOLIN_TRACE_POINTS = 256
MIN_DENSITY_POINTS = 3
MIN_VIOLIN_POINTS = 2


def _robust_sigma(values: np.ndarray) -> float:
    """min(std, IQR/1.34), with fallbacks for degenerate samples."""
    std = float(np.std(values))
    q75, q25 = np.percentile(values, [75, 25])
    iqr = float(q75 - q25)
    sigma = min(std, iqr / 1.34) if iqr > 0 else std
    if sigma <= 0:
        # Degenerate (all-equal) sample: any tiny positive width works.
        scale = max(abs(float(values[0])), 1.0)
        sigma = 1e-9 * scale
    return sigma


def silverman_bandwidth_1d(values: np.ndarray) -> float:
    n = values.size
    return 0.9 * _robust_sigma(values) * n ** (-1.0 / 5.0)


def silverman_bandwidth_2d(values: np.ndarray) -> float:
    """Per-dimension Silverman factor for a 2D product kernel."""
    n = values.size
    return _robust_sigma(values) * n ** (-1.0 / 6.0)


@dataclass
class AxisMarginal:
    histogram_counts: list[int]
    histogram_edges: list[float]
    rug: list[float]


@dataclass
class DensityGrid:
    """2D KDE evaluated on a uniform grid, plus contour levels and marginals."""

    x_grid: np.ndarray
    y_grid: np.ndarray
    density: np.ndarray
    contour_levels: list[float]
    bandwidth: tuple[float, float]
    marginal_kind: str
    marginal_x: AxisMarginal
    marginal_y: AxisMarginal

    def integral(self) -> float:
        dx = float(self.x_grid[1] - self.x_grid[0])
        dy = float(self.y_grid[1] - self.y_grid[0])
        return float(self.density.sum() * dx * dy)

    def to_jsonable(self) -> dict:
        return {
            "x_grid": self.x_grid.tolist(),
            "y_grid": self.y_grid.tolist(),
            "density": self.density.tolist(),
            "contour_levels": list(self.contour_levels),
            "bandwidth": list(self.bandwidth),
            "marginal_kind": self.marginal_kind,
            "marginal_x": {
                "histogram_counts": self.marginal_x.histogram_counts,
                "histogram_edges": self.marginal_x.histogram_edges,
                "rug": self.marginal_x.rug,
            },
            "marginal_y": {
                "histogram_counts": self.marginal_y.histogram_counts,
                "histogram_edges": self.marginal_y.histogram_edges,
                "rug": self.marginal_y.rug,
            },
        }


def _axis_marginal(values: np.ndarray) -> AxisMarginal:
    bins = max(8, min(32, int(round(math.sqrt(values.size)))))
    counts, edges = np.histogram(values, bins=bins)
    return AxisMarginal(
        histogram_counts=[int(c) for c in counts],
        histogram_edges=[float(e) for e in edges],
        rug=[float(v) for v in values],
    )


def density_grid(
    x: Sequence[float],
    y: Sequence[float],
    grid_size: int = DENSITY_GRID_SIZE,
    marginal: str = "histogram",
    label: str = "",
) -> DensityGrid:
    """Per-category KDE grid: Silverman bandwidths per dimension, grid
    spanning the data range padded by 3 bandwidths, 8 contour levels equally
    spaced between 5% and 95% of the max density.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < MIN_DENSITY_POINTS:
        raise TooFewPointsForDensity(
            f"category {label!r}: {x.size} points, need {MIN_DENSITY_POINTS}"
        )
    hx = silverman_bandwidth_2d(x)
    hy = silverman_bandwidth_2d(y)
    pad_x = DENSITY_PAD_BANDWIDTHS * hx
    pad_y = DENSITY_PAD_BANDWIDTHS * hy
    gx = np.linspace(x.min() - pad_x, x.max() + pad_x, grid_size)
    gy = np.linspace(y.min() - pad_y, y.max() + pad_y, grid_size)
    density = kde2d(x, y, hx, hy, gx, gy)
    dmax = float(density.max())
    lo, hi = CONTOUR_LEVEL_SPAN
    levels = [
        dmax * (lo + (hi - lo) * i / (CONTOUR_LEVEL_COUNT - 1))
        for i in range(CONTOUR_LEVEL_COUNT)
    ]
    return DensityGrid(
        x_grid=gx,
        y_grid=gy,
        density=density,
        contour_levels=levels,
        bandwidth=(hx, hy),
        marginal_kind=marginal,
        marginal_x=_axis_marginal(x),
        marginal_y=_axis_marginal(y),
    )


def quartiles_linear(values: Sequence[float]) -> tuple[float, float, float]:
    """Q1, median, Q3 by sorting and linear interpolation at (n-1)*q."""
    data = sorted(float(v) for v in values)
    n = len(data)
    if n == 0:
        raise ValueError("quartiles of empty sequence")

    def at(q: float) -> float:
        pos = (n - 1) * q
        lo = math.floor(pos)
        hi = math.ceil(pos)
        frac = pos - lo
        return data[lo] + (data[hi] - data[lo]) * frac

    return at(0.25), at(0.5), at(0.75)


def tukey_whiskers(
    values: Sequence[float], q1: float, q3: float
) -> tuple[float, float]:
    """Whisker ends: extreme data points within 1.5 IQR of the box."""
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = [v for v in values if lo_fence <= v <= hi_fence]
    return min(inside), max(inside)


@dataclass
class ViolinStats:
    """One violin: 1D KDE trace plus box-plot statistics and raw points."""

    group: str
    positions: list[float]
    densities: list[float]
    q1: float
    median: float
    q3: float
    whisker_low: float
    whisker_high: float
    points: list[float]
    bandwidth: float

    def to_jsonable(self) -> dict:
        return {
            "group": self.group,
            "positions": self.positions,
            "densities": self.densities,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "whisker_low": self.whisker_low,
            "whisker_high": self.whisker_high,
            "points": self.points,
            "bandwidth": self.bandwidth,
        }


def violin_stats(
    values: Sequence[float],
    group: str = "",
    trace_points: int = VIOLIN_TRACE_POINTS,
) -> ViolinStats:
    data = np.asarray(values, dtype=float)
    if data.size < MIN_VIOLIN_POINTS:
        raise TooFewPoints(
            f"group {group!r}: {data.size} points, need {MIN_VIOLIN_POINTS}"
        )
    h = silverman_bandwidth_1d(data)
    pad = DENSITY_PAD_BANDWIDTHS * h
    grid = np.linspace(data.min() - pad, data.max() + pad, trace_points)
    dens = kde1d(data, h, grid)
    q1, median, q3 = quartiles_linear(data)
    wlo, whi = tukey_whiskers(data.tolist(), q1, q3)
    return ViolinStats(
        group=group,
        positions=[float(g) for g in grid],
        densities=[float(d) for d in dens],
        q1=q1,
        median=median,
        q3=q3,
        whisker_low=wlo,
        whisker_high=whi,
        points=[float(v) for v in data],
        bandwidth=float(h),
    )


def contour_segments(
    grid: DensityGrid, level: float
) -> list[tuple[float, float, float, float]]:
    """Marching-squares line segments for one iso-density level.

    Returns (x1, y1, x2, y2) tuples in data coordinates; segments are
    unordered but deterministic for identical inputs. Good enough for
    rendering; no polygon assembly is attempted.
    """
    d = grid.density
    gx = grid.x_grid
    gy = grid.y_grid
    segments: list[tuple[float, float, float, float]] = []

    def interp(va: float, vb: float, pa: float, pb: float) -> float:
        # level lies between va and vb by construction of the case mask
        if vb == va:
            return 0.5 * (pa + pb)
        t = (level - va) / (vb - va)
        return pa + t * (pb - pa)

    for iy in range(d.shape[0] - 1):
        for ix in range(d.shape[1] - 1):
            v00 = d[iy, ix]
            v10 = d[iy, ix + 1]
            v01 = d[iy + 1, ix]
            v11 = d[iy + 1, ix + 1]
            case = (
                (1 if v00 >= level else 0)
                | (2 if v10 >= level else 0)
                | (4 if v11 >= level else 0)
                | (8 if v01 >= level else 0)
            )
            if case in (0, 15):
                continue
            x0, x1 = gx[ix], gx[ix + 1]
            y0, y1 = gy[iy], gy[iy + 1]
            # Edge crossing points: bottom, right, top, left.
            bottom = (interp(v00, v10, x0, x1), y0)
            right = (x1, interp(v10, v11, y0, y1))
            top = (interp(v01, v11, x0, x1), y1)
            left = (x0, interp(v00, v01, y0, y1))
            edges = {
                1: [(bottom, left)],
                2: [(bottom, right)],
                3: [(left, right)],
                4: [(right, top)],
                5: [(bottom, right), (left, top)],
                6: [(bottom, top)],
                7: [(left, top)],
                8: [(left, top)],
                9: [(bottom, top)],
                10: [(bottom, left), (right, top)],
                11: [(right, top)],
                12: [(left, right)],
                13: [(bottom, right)],
                14: [(bottom, left)],
            }[case]
            for (ax, ay), (bx, by) in edges:
                segments.append((float(ax), float(ay), float(bx), float(by)))
    return segments
