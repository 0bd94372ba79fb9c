"""Batch command-line entry point: fit, metrics, plot, and a service launcher.

Exit codes: 0 success (fit: at least one row fitted), 2 parse/usage failure,
3 zero fitted rows. Reports go to stderr; stdout stays clean so ``-o -``
pipes data.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .domain import builtin_reference, canonical_radii
from .errors import ReekitError, UnknownCategory, UnknownKind
from .ingestion import ImportOptions, parse_csv
from .lambdas import FitConfig, fit_dataset, lambda_table_csv
from .metrics import metric_report, metrics_csv, parse_price_csv
from .normalization import normalize
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


def _read_input(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as err:
        click.echo(f"error: cannot read {path}: {err}", err=True)
        sys.exit(2)


def _write_output(output: str, data: bytes) -> None:
    if output == "-":
        sys.stdout.buffer.write(data)
        return
    Path(output).write_bytes(data)


def _parse_dataset(path: str, options: ImportOptions):
    data = _read_input(path)
    try:
        dataset, report = parse_csv(data, options)
    except ReekitError as err:
        click.echo(f"error [{err.code}]: {err}", err=True)
        sys.exit(2)
    click.echo(
        f"{report.rows_accepted} rows accepted, "
        f"{len(report.rows_rejected)} rejected; "
        f"elements: {','.join(report.detected_elements)}; "
        f"categories: {','.join(report.detected_categories) or '(none)'}",
        err=True,
    )
    for row, reason in report.rows_rejected:
        click.echo(f"  rejected row {row}: {reason}", err=True)
    for note in report.notes:
        click.echo(f"  note: {note}", err=True)
    return dataset


def _exclusions(raw: str) -> frozenset[str]:
    return frozenset(tok.strip() for tok in raw.split(",") if tok.strip())


@click.group()
def main():
    """REE pattern fitting, metrics, and visualisation toolkit."""


@main.command()
@click.argument("input_csv", type=click.Path(dir_okay=False))
@click.option("--standard", default="chondrite", show_default=True)
@click.option("--degree", default=4, show_default=True, type=int)
@click.option("--exclude", default="", help="comma-separated elements to exclude")
@click.option(
    "--policy",
    "nonpositive_policy",
    default="reject",
    show_default=True,
    type=click.Choice(["reject", "drop-nonpositive", "replace-half-detection-limit"]),
)
@click.option("--delimiter", default=",", show_default=True)
@click.option("--unit", default="ppm", show_default=True, type=click.Choice(["ppm", "wt%"]))
@click.option("-o", "--output", default="-", show_default=True)
def fit(input_csv, standard, degree, exclude, nonpositive_policy, delimiter, unit, output):
    """Fit lambda coefficients for every pattern in INPUT_CSV."""
    options = ImportOptions(
        delimiter=delimiter,
        unit=unit,
        nonpositive_policy=nonpositive_policy,
        source_name=Path(input_csv).name,
    )
    dataset = _parse_dataset(input_csv, options)
    config = FitConfig(
        standard=standard,
        degree_count=degree,
        exclusions=_exclusions(exclude),
        nonpositive_policy=nonpositive_policy,
    )
    try:
        builtin_reference(standard)
        result = fit_dataset(dataset, config)
    except ReekitError as err:
        click.echo(f"error [{err.code}]: {err}", err=True)
        sys.exit(2)
    for sample_id, code, message in result.errors:
        click.echo(f"  sample {sample_id}: {code}: {message}", err=True)
    if not result.lambda_sets:
        click.echo("error: no rows could be fitted", err=True)
        sys.exit(3)
    _write_output(output, lambda_table_csv(result, degree).encode())
    click.echo(f"fitted {len(result.lambda_sets)} of {len(dataset.patterns)} samples", err=True)


@main.command()
@click.argument("input_csv", type=click.Path(dir_okay=False))
@click.option("--kind", required=True, help=f"one of {', '.join(VIZ_KINDS)}")
@click.option("--color-by", default=None)
@click.option("--group-by", default=None)
@click.option("--standard", default="chondrite", show_default=True)
@click.option("--degree", default=4, show_default=True, type=int)
@click.option("-x", "x_index", default=0, show_default=True, type=int)
@click.option("-y", "y_index", default=1, show_default=True, type=int)
@click.option("-z", "z_index", default=2, show_default=True, type=int)
@click.option(
    "--marginal", default="histogram", show_default=True, type=click.Choice(["histogram", "rug"])
)
@click.option("--theme", default="light", show_default=True, type=click.Choice(["light", "dark"]))
@click.option("--size", default="800x600", show_default=True, help="WIDTHxHEIGHT pixels")
@click.option("-o", "--output", default="-", show_default=True)
def plot(
    input_csv,
    kind,
    color_by,
    group_by,
    standard,
    degree,
    x_index,
    y_index,
    z_index,
    marginal,
    theme,
    size,
    output,
):
    """Render one visualisation of INPUT_CSV to SVG."""
    if kind not in VIZ_KINDS:
        click.echo(
            f"error [UnknownKind]: {kind!r} is not a viz kind; valid: {', '.join(VIZ_KINDS)}",
            err=True,
        )
        sys.exit(2)
    try:
        w_px, h_px = (int(v) for v in size.lower().split("x"))
    except ValueError:
        click.echo(f"error: bad --size {size!r}, expected WIDTHxHEIGHT", err=True)
        sys.exit(2)
    dataset = _parse_dataset(input_csv, ImportOptions(source_name=Path(input_csv).name))
    for cat in (color_by, group_by):
        if cat is not None and cat not in dataset.category_schema:
            click.echo(
                f"error [UnknownCategory]: {cat!r}; valid categories: "
                f"{', '.join(dataset.category_schema) or '(none)'}",
                err=True,
            )
            sys.exit(2)
    try:
        ref = builtin_reference(standard)
        radii = canonical_radii()
        if kind == "spider":
            payload = spider_payload(dataset, ref, radii, color_by=color_by)
        else:
            config = FitConfig(standard=standard, degree_count=degree)
            result = fit_dataset(dataset, config)
            categories = {p.sample_id: dict(p.categories) for p in dataset.patterns}
            if kind == "scatter2d":
                payload = scatter_payload(
                    result.lambda_sets, x_index, y_index, color_by=color_by, categories=categories
                )
            elif kind == "scatter3d":
                payload = scatter3d_payload(
                    result.lambda_sets,
                    x_index,
                    y_index,
                    z_index,
                    color_by=color_by,
                    categories=categories,
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
                    x_index,
                    y_index,
                    color_by=color_by,
                    marginal=marginal,
                    categories=categories,
                )
            else:
                payload = violin_payload(
                    result.lambda_sets,
                    y=y_index,
                    group_by=group_by or color_by,
                    categories=categories,
                )
        svg = export_svg(payload, size=(w_px, h_px), theme=theme)
    except (UnknownKind, UnknownCategory) as err:
        click.echo(f"error [{err.code}]: {err}", err=True)
        sys.exit(2)
    except ReekitError as err:
        click.echo(f"error [{err.code}]: {err}", err=True)
        sys.exit(2)
    _write_output(output, svg)


@main.command()
@click.argument("input_csv", type=click.Path(dir_okay=False))
@click.option("--prices", "prices_path", default=None, type=click.Path(dir_okay=False))
@click.option("--standard", default="chondrite", show_default=True)
@click.option("-o", "--output", default="-", show_default=True)
def metrics(input_csv, prices_path, standard, output):
    """Compute TREO, NdPr, ratios, and optional basket value per sample."""
    prices = None
    if prices_path is not None:
        try:
            prices = parse_price_csv(Path(prices_path).read_text())
        except (OSError, ReekitError) as err:
            click.echo(f"error [InvalidPriceFile]: {err}", err=True)
            sys.exit(2)
    dataset = _parse_dataset(input_csv, ImportOptions(source_name=Path(input_csv).name))
    try:
        ref = builtin_reference(standard)
    except ReekitError as err:
        click.echo(f"error [{err.code}]: {err}", err=True)
        sys.exit(2)
    radii = canonical_radii()
    reports = []
    for pattern in dataset.patterns:
        try:
            normalized = normalize(pattern, ref, radii, policy="drop-nonpositive")
            reports.append(metric_report(pattern, normalized, prices=prices))
        except ReekitError as err:
            click.echo(f"  sample {pattern.sample_id}: {err.code}: {err}", err=True)
    if not reports:
        click.echo("error: no rows could be reported", err=True)
        sys.exit(3)
    _write_output(output, metrics_csv(reports).encode())


@main.command()
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--data-dir",
    default=None,
    envvar="REEKIT_DATA_DIR",
    help="dataset storage root (defaults to $REEKIT_DATA_DIR or ./reekit-data)",
)
@click.option(
    "--frontend",
    "frontend_dir",
    default=None,
    type=click.Path(file_okay=False),
    help="serve a built web client from this directory under /app",
)
def serve(port, host, data_dir, frontend_dir):
    """Run the HTTP service until interrupted."""
    import uvicorn

    from .service import create_app

    uvicorn.run(
        create_app(data_dir, frontend_dir=frontend_dir),
        host=host,
        port=port,
        log_level="warning",
    )


if __name__ == "__main__":
    main()
