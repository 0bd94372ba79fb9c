"""HTTP facade over ingestion, fitting, metrics, viz payloads, and the
sandbox forward/inverse model.

Everything is compute-on-demand with content-keyed caching: dataset ids are
content hashes (uploads are idempotent) and fit results are cached per
(dataset, config). Responses are built as deterministic byte strings so
identical GETs return identical bytes. Error bodies always carry a
machine-readable ``code`` from the closed error-name set; stack traces
never leak.

Routes are mounted both at the root and under ``/v1`` (clients pin the
versioned prefix).
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Optional

from fastapi import APIRouter, FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import __version__
from .domain import (
    BUILTIN_STANDARDS,
    CANONICAL_ELEMENTS,
    builtin_reference,
    canonical_radii,
)
from .errors import (
    DegreeOutOfRange,
    InvalidBody,
    NotFound,
    ReekitError,
    UnknownCategory,
    UnknownKind,
)
from .ingestion import DatasetStore, ImportOptions
from .lambdas import (
    FitConfig,
    MAX_DEGREE_COUNT,
    MIN_DEGREE_COUNT,
    build_basis,
    fit_dataset,
    fit_lambdas,
    lambda_table_csv,
    reconstruct,
)
from .metrics import metric_report
from .normalization import normalize, normalize_values
from .viz import (
    VIZ_KINDS,
    density_contour_payload,
    export_svg,
    scatter3d_payload,
    scatter_payload,
    spider_payload,
    splom_payload,
    violin_payload,
)

MAX_BODY_BYTES = 64 * 1024 * 1024

DEFAULT_DATA_DIR = "./reekit-data"


def _json_bytes(obj) -> bytes:
    return json.dumps(obj, separators=(",", ":")).encode()


def _parse_degree(degree: int) -> int:
    if not MIN_DEGREE_COUNT <= degree <= MAX_DEGREE_COUNT:
        raise DegreeOutOfRange(
            f"degree must be within [{MIN_DEGREE_COUNT}, {MAX_DEGREE_COUNT}], got {degree}"
        )
    return degree


def _parse_exclude(exclude: str) -> frozenset[str]:
    if not exclude:
        return frozenset()
    symbols = frozenset(tok.strip() for tok in exclude.split(",") if tok.strip())
    unknown = symbols - set(CANONICAL_ELEMENTS)
    if unknown:
        raise InvalidBody(f"cannot exclude non-canonical elements: {sorted(unknown)}")
    return symbols


class ForwardRequest(BaseModel):
    lambdas: list[float]
    standard: str = "chondrite"
    elements: Optional[list[str]] = None


class InverseRequest(BaseModel):
    concentrations: dict[str, float]
    standard: str = "chondrite"
    degree: int = 4


def create_app(
    data_dir: str | Path | None = None,
    frontend_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service app.

    ``frontend_dir``, when given, is served statically under ``/app`` so the
    web client shares the API's origin. CORS stays permissive for the
    detached case (single-analyst tool, no auth in v1).
    """
    if data_dir is None:
        data_dir = os.environ.get("REEKIT_DATA_DIR", DEFAULT_DATA_DIR)
    store = DatasetStore(data_dir)
    app = FastAPI(title="reekit", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    router = APIRouter()

    @app.exception_handler(ReekitError)
    async def _reekit_error(_request: Request, err: ReekitError):
        status = 404 if isinstance(err, NotFound) else 400
        return JSONResponse(
            status_code=status,
            content={"code": err.code, "message": str(err), "detail": err.detail},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, err: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={
                "code": "InvalidBody",
                "message": "request body failed validation",
                "detail": [str(e.get("msg", "")) for e in err.errors()],
            },
        )

    @app.exception_handler(Exception)
    async def _unexpected(_request: Request, _err: Exception):
        return JSONResponse(
            status_code=500,
            content={"code": "Internal", "message": "internal error", "detail": []},
        )

    def _fit_cached(dataset_id: str, config: FitConfig):
        key = "fit|" + config.key()
        cached = store.cache_get(dataset_id, key)
        if cached is not None:
            return cached
        ds = store.get(dataset_id)
        result = fit_dataset(ds, config)
        store.cache_put(dataset_id, key, result)
        return result

    @router.get("/")
    def index():
        return {
            "service": "reekit",
            "version": __version__,
            "standards": list(BUILTIN_STANDARDS),
            "viz_kinds": list(VIZ_KINDS),
        }

    @router.post("/datasets", status_code=201)
    async def upload_dataset(
        request: Request,
        name: str = "upload.csv",
        delimiter: str = ",",
        unit: str = "ppm",
        nonpositive_policy: str = "reject",
    ):
        content_length = request.headers.get("content-length")
        if content_length and int(content_length) > MAX_BODY_BYTES:
            return JSONResponse(
                status_code=413,
                content={
                    "code": "PayloadTooLarge",
                    "message": f"body exceeds {MAX_BODY_BYTES} bytes",
                    "detail": [],
                },
            )
        body = await request.body()
        if len(body) > MAX_BODY_BYTES:
            return JSONResponse(
                status_code=413,
                content={
                    "code": "PayloadTooLarge",
                    "message": f"body exceeds {MAX_BODY_BYTES} bytes",
                    "detail": [],
                },
            )
        options = ImportOptions(
            delimiter=delimiter,
            unit=unit,
            nonpositive_policy=nonpositive_policy,
            source_name=name,
        )
        dataset, report = store.put_csv(body, options)
        return {"dataset_id": dataset.dataset_id, "import_report": report.to_jsonable()}

    @router.get("/datasets")
    def list_datasets():
        return {"datasets": store.list()}

    @router.get("/datasets/{dataset_id}/lambdas")
    def dataset_lambdas(
        dataset_id: str,
        standard: str = "chondrite",
        degree: int = 4,
        exclude: str = "",
        nonpositive_policy: str = "reject",
        format: str = "json",
    ):
        if format not in ("json", "csv"):
            raise InvalidBody(f"unknown format {format!r}; use json or csv")
        config = FitConfig(
            standard=standard,
            degree_count=_parse_degree(degree),
            exclusions=_parse_exclude(exclude),
            nonpositive_policy=nonpositive_policy,
        )
        builtin_reference(standard)  # validate the name before fitting
        cache_key = f"lambdas|{format}|{config.key()}"
        body = store.cache_get(dataset_id, cache_key)
        if body is None:
            result = _fit_cached(dataset_id, config)
            if format == "csv":
                body = lambda_table_csv(result, config.degree_count).encode()
            else:
                body = _json_bytes(
                    {
                        "dataset_id": dataset_id,
                        "config": {
                            "standard": config.standard,
                            "degree": config.degree_count,
                            "exclude": sorted(config.exclusions),
                            "nonpositive_policy": config.nonpositive_policy,
                            "fit_space": "ln",
                        },
                        "lambda_sets": [ls.to_jsonable() for ls in result.lambda_sets],
                        "anomalies": [a.to_jsonable() for a in result.anomalies],
                        "errors": [
                            {"sample_id": e.sample_id, "code": e.code, "message": e.message}
                            for e in result.errors
                        ],
                    }
                )
            store.cache_put(dataset_id, cache_key, body)
        media = "text/csv" if format == "csv" else "application/json"
        return Response(content=body, media_type=media)

    @router.get("/datasets/{dataset_id}/viz/{kind}")
    def dataset_viz(
        dataset_id: str,
        kind: str,
        x: int = 0,
        y: int = 1,
        z: int = 2,
        color_by: Optional[str] = None,
        group_by: Optional[str] = None,
        marginal: str = "histogram",
        standard: str = "chondrite",
        degree: int = 4,
        format: str = "json",
    ):
        if kind not in VIZ_KINDS:
            raise UnknownKind(f"unknown viz kind {kind!r}; valid: {list(VIZ_KINDS)}")
        if format not in ("json", "svg"):
            raise InvalidBody(f"unknown format {format!r}; use json or svg")
        ds = store.get(dataset_id)
        ref = builtin_reference(standard)
        radii = canonical_radii()
        for cat in (color_by, group_by):
            if cat is not None and cat not in ds.category_schema:
                raise UnknownCategory(
                    f"unknown category {cat!r}; dataset has {list(ds.category_schema)}"
                )
        cache_key = (
            f"viz|{kind}|{x}|{y}|{z}|{color_by}|{group_by}|{marginal}|"
            f"{standard.lower()}|{degree}|{format}"
        )
        body = store.cache_get(dataset_id, cache_key)
        if body is None:
            if kind == "spider":
                payload = spider_payload(ds, ref, radii, color_by=color_by)
            else:
                config = FitConfig(standard=standard, degree_count=_parse_degree(degree))
                result = _fit_cached(dataset_id, config)
                categories = {p.sample_id: dict(p.categories) for p in ds.patterns}
                if kind == "scatter2d":
                    payload = scatter_payload(
                        result.lambda_sets, x, y, color_by=color_by, categories=categories
                    )
                elif kind == "scatter3d":
                    payload = scatter3d_payload(
                        result.lambda_sets, x, y, z, color_by=color_by, categories=categories
                    )
                elif kind == "splom":
                    payload = splom_payload(
                        result.lambda_sets,
                        indices=(0, 1, 2) if degree >= 3 else (0, 1),
                        color_by=color_by,
                        categories=categories,
                    )
                elif kind == "density_contour":
                    payload = density_contour_payload(
                        result.lambda_sets,
                        x,
                        y,
                        color_by=color_by,
                        marginal=marginal,
                        categories=categories,
                    )
                else:
                    payload = violin_payload(
                        result.lambda_sets,
                        y=y,
                        group_by=group_by or color_by,
                        categories=categories,
                    )
            if format == "svg":
                body = export_svg(payload)
            else:
                body = _json_bytes(payload.to_jsonable())
            store.cache_put(dataset_id, cache_key, body)
        media = "image/svg+xml" if format == "svg" else "application/json"
        return Response(content=body, media_type=media)

    @router.get("/datasets/{dataset_id}/sample/{sample_id}")
    def sample_bundle(
        dataset_id: str,
        sample_id: str,
        standard: str = "chondrite",
        degree: int = 4,
    ):
        ds = store.get(dataset_id)
        try:
            pattern = ds.get_pattern(sample_id)
        except KeyError:
            raise NotFound(
                f"sample {sample_id!r} not in dataset {dataset_id!r}"
            ) from None
        config = FitConfig(standard=standard, degree_count=_parse_degree(degree))
        result = _fit_cached(dataset_id, config)
        lambda_set = next(
            (ls for ls in result.lambda_sets if ls.sample_id == sample_id), None
        )
        anomaly = result.anomaly_by_sample().get(sample_id)
        ref = builtin_reference(standard)
        radii = canonical_radii()
        try:
            normalized = normalize(pattern, ref, radii, policy="drop-nonpositive")
            metrics = metric_report(pattern, normalized).to_jsonable()
        except ReekitError as err:
            metrics = {"error": err.code}
        return Response(
            content=_json_bytes(
                {
                    "sample_id": sample_id,
                    "pattern": {
                        "concentrations_ppm": dict(pattern.concentrations_ppm),
                        "categories": dict(pattern.categories),
                    },
                    "lambdas": lambda_set.to_jsonable() if lambda_set else None,
                    "metrics": metrics,
                    "anomalies": anomaly.to_jsonable() if anomaly else None,
                }
            ),
            media_type="application/json",
        )

    @router.post("/sandbox/forward")
    def sandbox_forward(body: ForwardRequest):
        ref = builtin_reference(body.standard)
        basis = build_basis(canonical_radii(), _parse_degree(len(body.lambdas)))
        elements = body.elements or list(CANONICAL_ELEMENTS)
        unknown = set(elements) - set(CANONICAL_ELEMENTS)
        if unknown:
            raise InvalidBody(f"unknown elements: {sorted(unknown)}")
        rec = reconstruct(body.lambdas, basis, elements, ref)
        return Response(
            content=_json_bytes(
                {
                    "standard": ref.name,
                    "lambdas": list(body.lambdas),
                    "pattern": {
                        e: {"y": rec[e][0], "concentration_ppm": rec[e][1]}
                        for e in CANONICAL_ELEMENTS
                        if e in rec
                    },
                }
            ),
            media_type="application/json",
        )

    @router.post("/sandbox/inverse")
    def sandbox_inverse(body: InverseRequest):
        ref = builtin_reference(body.standard)
        radii = canonical_radii()
        unknown = set(body.concentrations) - set(CANONICAL_ELEMENTS)
        if unknown:
            raise InvalidBody(f"unknown elements: {sorted(unknown)}")
        basis = build_basis(radii, _parse_degree(body.degree))
        normalized = normalize_values(
            body.concentrations,
            ref,
            radii,
            min_points=0,
            sample_id="sandbox",
        )
        lambda_set = fit_lambdas(normalized, basis)
        return Response(
            content=_json_bytes(lambda_set.to_jsonable()),
            media_type="application/json",
        )

    app.include_router(router, prefix="/v1")
    app.include_router(router)
    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount(
            "/app", StaticFiles(directory=str(frontend_dir), html=True), name="app"
        )
    return app
