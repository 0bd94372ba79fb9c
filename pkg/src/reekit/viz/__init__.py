"""Visualisation payload builders, KDE machinery, and SVG export."""

from .kde import (
    DensityGrid,
    ViolinStats,
    contour_segments,
    density_grid,
    quartiles_linear,
    silverman_bandwidth_1d,
    silverman_bandwidth_2d,
    tukey_whiskers,
    violin_stats,
)
from .payloads import (
    VIZ_KINDS,
    VizPayload,
    density_contour_payload,
    scatter3d_payload,
    scatter_payload,
    spider_payload,
    splom_payload,
    violin_payload,
)
from .svg import export_svg

__all__ = [
    "DensityGrid",
    "ViolinStats",
    "VIZ_KINDS",
    "VizPayload",
    "contour_segments",
    "density_grid",
    "density_contour_payload",
    "export_svg",
    "quartiles_linear",
    "scatter3d_payload",
    "scatter_payload",
    "silverman_bandwidth_1d",
    "silverman_bandwidth_2d",
    "spider_payload",
    "splom_payload",
    "tukey_whiskers",
    "violin_payload",
    "violin_stats",
]
