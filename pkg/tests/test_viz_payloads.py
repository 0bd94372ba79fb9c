"""Payload shapes, back-references, and per-kind behaviour."""

import numpy as np
import pytest

from reekit.domain import CANONICAL_ELEMENTS, Dataset, Provenance, ReePattern
from reekit.errors import IndexOutOfRange, UnknownCategory
from reekit.lambdas import FitConfig, fit_dataset
from reekit.viz import (
    density_contour_payload,
    scatter3d_payload,
    scatter_payload,
    spider_payload,
    splom_payload,
    violin_payload,
)
from conftest import synthetic_pattern_concentrations


@pytest.fixture(scope="module")
def fitted(fixture_dataset):
    result = fit_dataset(fixture_dataset, FitConfig())
    categories = {p.sample_id: dict(p.categories) for p in fixture_dataset.patterns}
    return result.lambda_sets, categories


class TestSpider:
    def test_one_polyline_per_sample(self, fixture_dataset, chondrite, radii):
        payload = spider_payload(fixture_dataset, chondrite, radii, color_by="mineralogy")
        assert payload.kind == "spider"
        assert len(payload.series["lines"]) == 30
        for line in payload.series["lines"]:
            assert len(line["values"]) == 14
        assert payload.series["log_scale"] is True

    def test_flat_pattern_horizontal(self, chondrite, radii):
        conc = {e: 3.0 * chondrite.values_ppm[e] for e in CANONICAL_ELEMENTS}
        ds = Dataset(
            "d" * 16, (ReePattern("flat", conc),), (), Provenance("t")
        )
        payload = spider_payload(ds, chondrite, radii)
        values = payload.series["lines"][0]["values"]
        assert all(v == pytest.approx(3.0, rel=1e-12) for v in values)

    def test_absent_elements_are_gaps(self, fixture_dataset, chondrite, radii):
        payload = spider_payload(fixture_dataset, chondrite, radii)
        by_id = {l["sample_id"]: l for l in payload.series["lines"]}
        tm_index = CANONICAL_ELEMENTS.index("Tm")
        assert by_id["S009"]["values"][tm_index] is None

    def test_colour_groups_match_categories(self, fixture_dataset, chondrite, radii):
        payload = spider_payload(fixture_dataset, chondrite, radii, color_by="mineralogy")
        assert payload.series["groups"] == sorted(
            fixture_dataset.category_values("mineralogy")
        )

    def test_unknown_category(self, fixture_dataset, chondrite, radii):
        with pytest.raises(UnknownCategory):
            spider_payload(fixture_dataset, chondrite, radii, color_by="colour")

    def test_point_refs_bijective(self, fixture_dataset, chondrite, radii):
        payload = spider_payload(fixture_dataset, chondrite, radii)
        refs = list(payload.point_refs.values())
        assert sorted(refs) == sorted(fixture_dataset.sample_ids())


class TestScatter:
    def test_counts_and_refs(self, fitted):
        lambda_sets, categories = fitted
        payload = scatter_payload(lambda_sets, 0, 1, "mineralogy", categories)
        assert len(payload.series["points"]) == len(lambda_sets)
        assert sorted(payload.point_refs.values()) == sorted(
            ls.sample_id for ls in lambda_sets
        )
        assert payload.axis_labels[0].startswith("λ0")
        assert "REE abundance" in payload.axis_labels[0]

    def test_default_axes_are_first_two(self, fitted):
        lambda_sets, categories = fitted
        payload = scatter_payload(lambda_sets)
        assert payload.series["x_index"] == 0
        assert payload.series["y_index"] == 1

    def test_3d_payload(self, fitted):
        lambda_sets, categories = fitted
        payload = scatter3d_payload(lambda_sets, color_by="mineralogy", categories=categories)
        assert {"x", "y", "z"} <= set(payload.series["points"][0])
        assert len(payload.axis_labels) == 3

    def test_index_out_of_range(self, fitted):
        lambda_sets, _ = fitted
        with pytest.raises(IndexOutOfRange):
            scatter_payload(lambda_sets, 0, 9)


class TestSplom:
    def test_grid_shape(self, fitted):
        lambda_sets, categories = fitted
        payload = splom_payload(lambda_sets, (0, 1, 2), "mineralogy", categories)
        assert len(payload.series["panels"]) == 6  # 3x3 minus diagonal
        assert len(payload.series["diagonals"]) == 3
        for panel in payload.series["panels"]:
            assert len(panel["points"]) == len(lambda_sets)

    def test_transpose_symmetry(self, fitted):
        lambda_sets, categories = fitted
        payload = splom_payload(lambda_sets, (0, 1, 2), "mineralogy", categories)
        panels = {(p["x_index"], p["y_index"]): p["points"] for p in payload.series["panels"]}
        for (xi, yi), pts in panels.items():
            flipped = [[b, a] for a, b in panels[(yi, xi)]]
            assert pts == flipped

    def test_needs_two_indices(self, fitted):
        lambda_sets, _ = fitted
        with pytest.raises(IndexOutOfRange):
            splom_payload(lambda_sets, (0,))


class TestDensityContour:
    def test_per_category_grids(self, fitted):
        lambda_sets, categories = fitted
        payload = density_contour_payload(
            lambda_sets, 0, 1, "mineralogy", categories=categories
        )
        assert set(payload.series["categories"]) == {"apatite", "allanite", "monazite"}
        assert payload.series["skipped"] == []

    def test_small_category_skipped(self, chondrite, radii, basis4):
        patterns = []
        for i in range(5):
            conc = synthetic_pattern_concentrations(
                basis4, chondrite, [1.0 + 0.1 * i, 0.01, 0.0, 0.0]
            )
            group = "big" if i < 4 else "tiny"
            patterns.append(ReePattern(f"s{i}", conc, {"g": group}))
        ds = Dataset("d" * 16, tuple(patterns), ("g",), Provenance("t"))
        result = fit_dataset(ds, FitConfig())
        categories = {p.sample_id: dict(p.categories) for p in ds.patterns}
        payload = density_contour_payload(
            result.lambda_sets, 0, 1, "g", categories=categories
        )
        assert "big" in payload.series["categories"]
        assert ["tiny", "TooFewPointsForDensity"] in payload.series["skipped"]

    def test_marginal_rug(self, fitted):
        lambda_sets, categories = fitted
        payload = density_contour_payload(
            lambda_sets, 0, 1, "mineralogy", marginal="rug", categories=categories
        )
        grid = payload.series["categories"]["apatite"]
        assert grid["marginal_kind"] == "rug"
        assert grid["marginal_x"]["rug"]


class TestViolin:
    def test_one_violin_per_group(self, fitted):
        lambda_sets, categories = fitted
        payload = violin_payload(lambda_sets, y=1, group_by="mineralogy", categories=categories)
        assert [v["group"] for v in payload.series["violins"]] == [
            "allanite",
            "apatite",
            "monazite",
        ]
        for violin in payload.series["violins"]:
            assert violin["q1"] <= violin["median"] <= violin["q3"]

    def test_point_refs_bijection(self, fitted):
        lambda_sets, categories = fitted
        payload = violin_payload(lambda_sets, y=0, group_by="mineralogy", categories=categories)
        assert sorted(payload.point_refs.values()) == sorted(
            ls.sample_id for ls in lambda_sets
        )

    def test_ungrouped_single_violin(self, fitted):
        lambda_sets, _ = fitted
        payload = violin_payload(lambda_sets, y=0)
        assert len(payload.series["violins"]) == 1
        assert payload.series["violins"][0]["group"] == "all"

    def test_small_groups_skipped(self, chondrite, basis4):
        patterns = []
        for i in range(3):
            conc = synthetic_pattern_concentrations(
                basis4, chondrite, [1.0 + i, 0.0, 0.0, 0.0]
            )
            group = "pair" if i < 2 else "solo"
            patterns.append(ReePattern(f"s{i}", conc, {"g": group}))
        ds = Dataset("d" * 16, tuple(patterns), ("g",), Provenance("t"))
        result = fit_dataset(ds, FitConfig())
        categories = {p.sample_id: dict(p.categories) for p in ds.patterns}
        payload = violin_payload(result.lambda_sets, y=0, group_by="g", categories=categories)
        assert [v["group"] for v in payload.series["violins"]] == ["pair"]
        assert ["solo", "TooFewPoints"] in payload.series["skipped"]


def test_payload_jsonable_round_trip(fitted):
    import json

    lambda_sets, categories = fitted
    payload = scatter_payload(lambda_sets, 0, 1, "mineralogy", categories)
    encoded = json.dumps(payload.to_jsonable())
    decoded = json.loads(encoded)
    assert decoded["kind"] == "scatter2d"
    assert len(decoded["point_refs"]) == len(lambda_sets)
