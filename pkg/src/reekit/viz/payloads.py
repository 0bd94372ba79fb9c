"""Render-agnostic payloads for the six chart kinds.

Each builder returns a :class:`VizPayload`: plain series data plus axis
labels and a point-index -> sample_id back-reference map, so any renderer
(SVG export here, the web client elsewhere) can draw it and link points
back to samples. No chart math happens outside this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from ..domain import CANONICAL_ELEMENTS, Dataset, RadiiTable, ReferenceStandard
from ..errors import IndexOutOfRange, ReekitError, TooFewPoints, TooFewPointsForDensity, UnknownCategory
from ..lambdas import LambdaSet, lambda_axis_label
from ..normalization import normalize
from . import kde

VIZ_KINDS = (
    "spider",
    "scatter2d",
    "scatter3d",
    "splom",
    "density_contour",
    "violin",
)


@dataclass
class VizPayload:
    kind: str
    series: dict
    axis_labels: list[str]
    color_key: Optional[str]
    point_refs: dict[int, str] = field(default_factory=dict)

    def to_jsonable(self) -> dict:
        return {
            "kind": self.kind,
            "series": self.series,
            "axis_labels": self.axis_labels,
            "color_key": self.color_key,
            "point_refs": {str(k): v for k, v in self.point_refs.items()},
        }


def _check_indices(lambda_sets: Sequence[LambdaSet], indices: Sequence[int]) -> None:
    if not lambda_sets:
        return
    degree = len(lambda_sets[0].lambdas)
    for i in indices:
        if not 0 <= i < degree:
            raise IndexOutOfRange(
                f"lambda index {i} out of range for degree_count {degree}"
            )


def _category_value(
    sample_id: str,
    color_by: Optional[str],
    categories: Optional[Mapping[str, Mapping[str, str]]],
) -> str:
    if color_by is None:
        return "all"
    if categories is None or sample_id not in categories:
        raise UnknownCategory(f"no category data for sample {sample_id!r}")
    values = categories[sample_id]
    if color_by not in values:
        raise UnknownCategory(f"unknown category {color_by!r}")
    return values[color_by]


def _grouped(
    lambda_sets: Sequence[LambdaSet],
    color_by: Optional[str],
    categories: Optional[Mapping[str, Mapping[str, str]]],
) -> dict[str, list[LambdaSet]]:
    groups: dict[str, list[LambdaSet]] = {}
    for ls in lambda_sets:
        groups.setdefault(_category_value(ls.sample_id, color_by, categories), []).append(ls)
    return {value: groups[value] for value in sorted(groups)}


def spider_payload(
    ds: Dataset,
    standard: ReferenceStandard,
    radii: RadiiTable,
    color_by: Optional[str] = None,
    nonpositive_policy: str = "reject",
) -> VizPayload:
    """One polyline per sample over the canonical element order.

    y values are reference-normalised concentrations (the payload flags
    log-scale presentation); absent elements leave gaps (null). Samples that
    fail normalisation under the given policy are skipped and listed.
    """
    if color_by is not None and color_by not in ds.category_schema:
        raise UnknownCategory(
            f"unknown category {color_by!r}; "
            f"dataset has {list(ds.category_schema)}"
        )
    lines = []
    skipped = []
    point_refs: dict[int, str] = {}
    for p in ds.patterns:
        try:
            npat = normalize(p, standard, radii, policy=nonpositive_policy)
        except ReekitError as err:
            skipped.append([p.sample_id, err.code])
            continue
        y = npat.y_by_element()
        values = [
            math.exp(y[e]) if e in y else None for e in CANONICAL_ELEMENTS
        ]
        point_refs[len(lines)] = p.sample_id
        lines.append(
            {
                "sample_id": p.sample_id,
                "group": p.categories.get(color_by, "all") if color_by else "all",
                "values": values,
            }
        )
    groups = sorted({line["group"] for line in lines})
    return VizPayload(
        kind="spider",
        series={
            "elements": list(CANONICAL_ELEMENTS),
            "radius_pm": [radii.radius_pm[e] for e in CANONICAL_ELEMENTS],
            "log_scale": True,
            "reference": standard.name,
            "lines": lines,
            "groups": groups,
            "skipped": skipped,
        },
        axis_labels=["ionic radius (pm)", f"concentration / {standard.name}"],
        color_key=color_by,
        point_refs=point_refs,
    )


def scatter_payload(
    lambda_sets: Sequence[LambdaSet],
    x: int = 0,
    y: int = 1,
    color_by: Optional[str] = None,
    categories: Optional[Mapping[str, Mapping[str, str]]] = None,
) -> VizPayload:
    _check_indices(lambda_sets, (x, y))
    points = []
    point_refs = {}
    for i, ls in enumerate(lambda_sets):
        points.append(
            {
                "x": ls.lambdas[x],
                "y": ls.lambdas[y],
                "group": _category_value(ls.sample_id, color_by, categories),
            }
        )
        point_refs[i] = ls.sample_id
    groups = sorted({p["group"] for p in points})
    return VizPayload(
        kind="scatter2d",
        series={"x_index": x, "y_index": y, "points": points, "groups": groups},
        axis_labels=[lambda_axis_label(x), lambda_axis_label(y)],
        color_key=color_by,
        point_refs=point_refs,
    )


def scatter3d_payload(
    lambda_sets: Sequence[LambdaSet],
    x: int = 0,
    y: int = 1,
    z: int = 2,
    color_by: Optional[str] = None,
    categories: Optional[Mapping[str, Mapping[str, str]]] = None,
) -> VizPayload:
    _check_indices(lambda_sets, (x, y, z))
    points = []
    point_refs = {}
    for i, ls in enumerate(lambda_sets):
        points.append(
            {
                "x": ls.lambdas[x],
                "y": ls.lambdas[y],
                "z": ls.lambdas[z],
                "group": _category_value(ls.sample_id, color_by, categories),
            }
        )
        point_refs[i] = ls.sample_id
    groups = sorted({p["group"] for p in points})
    return VizPayload(
        kind="scatter3d",
        series={
            "x_index": x,
            "y_index": y,
            "z_index": z,
            "points": points,
            "groups": groups,
        },
        axis_labels=[lambda_axis_label(x), lambda_axis_label(y), lambda_axis_label(z)],
        color_key=color_by,
        point_refs=point_refs,
    )


def splom_payload(
    lambda_sets: Sequence[LambdaSet],
    indices: Sequence[int] = (0, 1, 2),
    color_by: Optional[str] = None,
    categories: Optional[Mapping[str, Mapping[str, str]]] = None,
) -> VizPayload:
    """Scatter-plot matrix: a panel for every ordered index pair, shared
    per-coefficient ranges, per-coefficient histograms on the diagonal."""
    indices = list(indices)
    if len(indices) < 2:
        raise IndexOutOfRange("splom needs at least 2 lambda indices")
    _check_indices(lambda_sets, indices)
    values = {i: [ls.lambdas[i] for ls in lambda_sets] for i in indices}
    groups_per_point = [
        _category_value(ls.sample_id, color_by, categories) for ls in lambda_sets
    ]
    point_refs = {i: ls.sample_id for i, ls in enumerate(lambda_sets)}
    ranges = {
        i: [min(values[i]), max(values[i])] if values[i] else [0.0, 1.0]
        for i in indices
    }
    panels = []
    for yi in indices:
        for xi in indices:
            if xi == yi:
                continue
            panels.append(
                {
                    "x_index": xi,
                    "y_index": yi,
                    "points": [
                        [values[xi][k], values[yi][k]]
                        for k in range(len(lambda_sets))
                    ],
                }
            )
    diagonals = []
    for i in indices:
        counts, edges = _histogram(values[i])
        diagonals.append(
            {"index": i, "histogram_counts": counts, "histogram_edges": edges}
        )
    return VizPayload(
        kind="splom",
        series={
            "indices": indices,
            "ranges": {str(i): ranges[i] for i in indices},
            "panels": panels,
            "diagonals": diagonals,
            "point_groups": groups_per_point,
            "groups": sorted(set(groups_per_point)),
        },
        axis_labels=[lambda_axis_label(i) for i in indices],
        color_key=color_by,
        point_refs=point_refs,
    )


def _histogram(values: Sequence[float]) -> tuple[list[int], list[float]]:
    if not values:
        return [], []
    bins = max(8, min(32, int(round(math.sqrt(len(values))))))
    counts, edges = np.histogram(np.asarray(values, dtype=float), bins=bins)
    return [int(c) for c in counts], [float(e) for e in edges]


def density_contour_payload(
    lambda_sets: Sequence[LambdaSet],
    x: int = 0,
    y: int = 1,
    color_by: Optional[str] = None,
    marginal: str = "histogram",
    categories: Optional[Mapping[str, Mapping[str, str]]] = None,
) -> VizPayload:
    """Per-category KDE grids; categories with too few points are skipped
    and reported rather than failing the payload."""
    _check_indices(lambda_sets, (x, y))
    if marginal not in ("histogram", "rug"):
        raise ValueError(f"unknown marginal {marginal!r}")
    grouped = _grouped(lambda_sets, color_by, categories)
    grids: dict[str, dict] = {}
    members: dict[str, list[str]] = {}
    skipped = []
    point_refs: dict[int, str] = {}
    counter = 0
    for value, members_ls in grouped.items():
        xs = [ls.lambdas[x] for ls in members_ls]
        ys = [ls.lambdas[y] for ls in members_ls]
        try:
            grid = kde.density_grid(xs, ys, marginal=marginal, label=value)
        except TooFewPointsForDensity as err:
            skipped.append([value, err.code])
            continue
        grids[value] = grid.to_jsonable()
        members[value] = [ls.sample_id for ls in members_ls]
        for ls in members_ls:
            point_refs[counter] = ls.sample_id
            counter += 1
    return VizPayload(
        kind="density_contour",
        series={
            "x_index": x,
            "y_index": y,
            "marginal": marginal,
            "categories": grids,
            "members": members,
            "skipped": skipped,
        },
        axis_labels=[lambda_axis_label(x), lambda_axis_label(y)],
        color_key=color_by,
        point_refs=point_refs,
    )


def violin_payload(
    lambda_sets: Sequence[LambdaSet],
    y: int = 0,
    group_by: Optional[str] = None,
    categories: Optional[Mapping[str, Mapping[str, str]]] = None,
) -> VizPayload:
    """One violin per category value with at least two points; smaller
    groups are skipped and reported."""
    _check_indices(lambda_sets, (y,))
    grouped = _grouped(lambda_sets, group_by, categories)
    violins = []
    skipped = []
    point_refs: dict[int, str] = {}
    counter = 0
    for value, members_ls in grouped.items():
        data = [ls.lambdas[y] for ls in members_ls]
        try:
            stats = kde.violin_stats(data, group=value)
        except TooFewPoints as err:
            skipped.append([value, err.code])
            continue
        entry = stats.to_jsonable()
        entry["sample_ids"] = [ls.sample_id for ls in members_ls]
        violins.append(entry)
        for ls in members_ls:
            point_refs[counter] = ls.sample_id
            counter += 1
    return VizPayload(
        kind="violin",
        series={"y_index": y, "violins": violins, "skipped": skipped},
        axis_labels=[group_by or "group", lambda_axis_label(y)],
        color_key=group_by,
        point_refs=point_refs,
    )
