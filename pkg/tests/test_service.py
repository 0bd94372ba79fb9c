"""HTTP contract: upload, fitting, viz payloads, sandbox, and error mapping."""

import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from reekit.service import create_app
from reekit.viz.payloads import VIZ_KINDS


@pytest.fixture()
def client(tmp_path):
    app = create_app(tmp_path / "data")
    with TestClient(app, raise_server_exceptions=False) as c:
        yield c


@pytest.fixture()
def uploaded(client, fixture_csv_bytes):
    response = client.post("/v1/datasets?name=fixture.csv", content=fixture_csv_bytes)
    assert response.status_code == 201
    return response.json()["dataset_id"]


class TestDatasets:
    def test_upload_and_report(self, client, fixture_csv_bytes):
        response = client.post("/v1/datasets?name=fixture.csv", content=fixture_csv_bytes)
        assert response.status_code == 201
        body = response.json()
        assert body["import_report"]["rows_accepted"] == 30
        assert body["import_report"]["detected_categories"] == ["mineralogy", "hole_id"]

    def test_reupload_same_bytes_same_id(self, client, fixture_csv_bytes, uploaded):
        again = client.post("/v1/datasets", content=fixture_csv_bytes)
        assert again.json()["dataset_id"] == uploaded

    def test_headerless_body_is_400(self, client):
        response = client.post("/v1/datasets", content=b"")
        assert response.status_code == 400
        assert response.json()["code"] == "NoHeader"

    def test_list_datasets(self, client, uploaded):
        response = client.get("/v1/datasets")
        assert response.status_code == 200
        ids = [d["dataset_id"] for d in response.json()["datasets"]]
        assert uploaded in ids

    def test_unversioned_alias(self, client, fixture_csv_bytes):
        response = client.post("/datasets", content=fixture_csv_bytes)
        assert response.status_code == 201


class TestLambdas:
    def test_row_count_matches_accepted(self, client, uploaded):
        response = client.get(f"/v1/datasets/{uploaded}/lambdas")
        body = response.json()
        assert len(body["lambda_sets"]) == 30
        assert body["errors"] == []
        assert body["config"]["fit_space"] == "ln"

    def test_repeat_get_byte_identical(self, client, uploaded):
        first = client.get(f"/v1/datasets/{uploaded}/lambdas")
        second = client.get(f"/v1/datasets/{uploaded}/lambdas")
        assert first.content == second.content

    def test_csv_format(self, client, uploaded):
        response = client.get(f"/v1/datasets/{uploaded}/lambdas?format=csv")
        assert response.headers["content-type"].startswith("text/csv")
        lines = response.text.splitlines()
        assert lines[0].startswith("sample,lambda0")
        assert len(lines) == 31

    def test_degree_out_of_range(self, client, uploaded):
        response = client.get(f"/v1/datasets/{uploaded}/lambdas?degree=7")
        assert response.status_code == 400
        assert response.json()["code"] == "DegreeOutOfRange"

    def test_unknown_dataset_404(self, client):
        response = client.get("/v1/datasets/ffffffffffffffff/lambdas")
        assert response.status_code == 404
        assert response.json()["code"] == "NotFound"

    def test_exclusions_accepted(self, client, uploaded):
        response = client.get(f"/v1/datasets/{uploaded}/lambdas?exclude=Ce,Eu")
        assert response.status_code == 200
        excluded = response.json()["lambda_sets"][0]["excluded"]
        assert "Ce" in excluded and "Eu" in excluded


class TestViz:
    def test_all_kinds_render(self, client, uploaded):
        for kind in VIZ_KINDS:
            response = client.get(
                f"/v1/datasets/{uploaded}/viz/{kind}"
                "?color_by=mineralogy&group_by=mineralogy"
            )
            assert response.status_code == 200, kind
            assert response.json()["kind"] == kind

    def test_unknown_kind(self, client, uploaded):
        response = client.get(f"/v1/datasets/{uploaded}/viz/heatmap")
        assert response.status_code == 400
        assert response.json()["code"] == "UnknownKind"

    def test_unknown_category(self, client, uploaded):
        response = client.get(
            f"/v1/datasets/{uploaded}/viz/scatter2d?color_by=wavelength"
        )
        assert response.status_code == 400
        assert response.json()["code"] == "UnknownCategory"

    def test_index_out_of_range(self, client, uploaded):
        response = client.get(f"/v1/datasets/{uploaded}/viz/scatter2d?x=9")
        assert response.status_code == 400
        assert response.json()["code"] == "IndexOutOfRange"

    def test_rug_marginal(self, client, uploaded):
        response = client.get(
            f"/v1/datasets/{uploaded}/viz/density_contour"
            "?color_by=mineralogy&marginal=rug"
        )
        grid = response.json()["series"]["categories"]["apatite"]
        assert grid["marginal_kind"] == "rug"
        assert grid["marginal_x"]["rug"]

    def test_violin_per_mineral(self, client, uploaded):
        response = client.get(
            f"/v1/datasets/{uploaded}/viz/violin?group_by=mineralogy"
        )
        violins = response.json()["series"]["violins"]
        assert [v["group"] for v in violins] == ["allanite", "apatite", "monazite"]

    def test_svg_format(self, client, uploaded):
        response = client.get(
            f"/v1/datasets/{uploaded}/viz/spider?color_by=mineralogy&format=svg"
        )
        assert response.headers["content-type"].startswith("image/svg")
        assert response.content.startswith(b"<svg")

    def test_repeat_get_byte_identical(self, client, uploaded):
        url = f"/v1/datasets/{uploaded}/viz/splom?color_by=mineralogy"
        assert client.get(url).content == client.get(url).content


class TestSandbox:
    def test_forward_zero_lambdas_is_reference(self, client):
        response = client.post(
            "/v1/sandbox/forward",
            json={"lambdas": [0.0, 0.0, 0.0, 0.0], "standard": "chondrite"},
        )
        pattern = response.json()["pattern"]
        assert pattern["La"]["concentration_ppm"] == pytest.approx(0.237)
        assert pattern["La"]["y"] == 0.0

    def test_forward_inverse_roundtrip(self, client):
        lam = [2.5, 0.1, -0.01, 0.002]
        fwd = client.post("/v1/sandbox/forward", json={"lambdas": lam}).json()
        conc = {e: v["concentration_ppm"] for e, v in fwd["pattern"].items()}
        inv = client.post(
            "/v1/sandbox/inverse", json={"concentrations": conc, "degree": 4}
        ).json()
        assert np.abs(np.array(inv["lambdas"]) - np.array(lam)).max() <= 1e-9

    def test_inverse_too_few_points(self, client):
        response = client.post(
            "/v1/sandbox/inverse",
            json={"concentrations": {"La": 10.0, "Ce": 20.0, "Pr": 3.0}},
        )
        assert response.status_code == 400
        assert response.json()["code"] == "TooFewPoints"

    def test_invalid_body_schema(self, client):
        response = client.post("/v1/sandbox/forward", json={"nope": 1})
        assert response.status_code == 400
        assert response.json()["code"] == "InvalidBody"

    def test_unknown_standard(self, client):
        response = client.post(
            "/v1/sandbox/forward",
            json={"lambdas": [0, 0, 0, 0], "standard": "granite"},
        )
        assert response.status_code == 400
        assert response.json()["code"] == "UnknownStandard"


class TestSampleBundle:
    def test_bundle_sections(self, client, uploaded):
        response = client.get(f"/v1/datasets/{uploaded}/sample/S001")
        body = response.json()
        assert set(body) == {"sample_id", "pattern", "lambdas", "metrics", "anomalies"}
        assert body["pattern"]["categories"]["mineralogy"] == "apatite"
        assert body["metrics"]["treo_ppm"] > 0

    def test_bundle_matches_lambda_endpoint(self, client, uploaded):
        bundle = client.get(f"/v1/datasets/{uploaded}/sample/S001").json()
        table = client.get(f"/v1/datasets/{uploaded}/lambdas").json()
        row = next(
            ls for ls in table["lambda_sets"] if ls["sample_id"] == "S001"
        )
        assert bundle["lambdas"] == row

    def test_unknown_sample_404(self, client, uploaded):
        response = client.get(f"/v1/datasets/{uploaded}/sample/XXX")
        assert response.status_code == 404


def test_error_body_never_leaks_traceback(client):
    response = client.get("/v1/datasets/ffffffffffffffff/lambdas")
    text = response.text
    assert "Traceback" not in text
    assert set(response.json()) == {"code", "message", "detail"}


def test_index_lists_capabilities(client):
    body = client.get("/v1/").json()
    assert body["service"] == "reekit"
    assert set(body["viz_kinds"]) == set(VIZ_KINDS)


def test_frontend_mount_serves_static_app(tmp_path, fixture_csv_bytes):
    webroot = tmp_path / "web"
    webroot.mkdir()
    (webroot / "index.html").write_text("<!doctype html><title>reekit</title>")
    app = create_app(tmp_path / "data", frontend_dir=webroot)
    with TestClient(app) as client:
        page = client.get("/app/")
        assert page.status_code == 200
        assert "reekit" in page.text
        # API still reachable alongside the static mount
        assert client.post("/v1/datasets", content=fixture_csv_bytes).status_code == 201


def test_cors_headers_present(client, fixture_csv_bytes):
    response = client.post(
        "/v1/datasets",
        content=fixture_csv_bytes,
        headers={"origin": "http://localhost:5173"},
    )
    assert response.headers.get("access-control-allow-origin") == "*"


def test_committed_openapi_schema_covers_routes(client):
    import pathlib

    schema_path = pathlib.Path(__file__).parent.parent / "docs" / "openapi.json"
    committed = json.loads(schema_path.read_text())
    live = client.get("/openapi.json").json()
    assert set(committed["paths"]) == set(live["paths"])
    for path in (
        "/v1/datasets",
        "/v1/datasets/{dataset_id}/lambdas",
        "/v1/datasets/{dataset_id}/viz/{kind}",
        "/v1/datasets/{dataset_id}/sample/{sample_id}",
        "/v1/sandbox/forward",
        "/v1/sandbox/inverse",
    ):
        assert path in committed["paths"]
