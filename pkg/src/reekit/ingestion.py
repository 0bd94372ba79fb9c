"""CSV ingestion and the on-disk dataset store.

``parse_csv`` is total: any byte input produces either a Dataset plus an
ImportReport or a named error, never an uncaught crash. Identical bytes and
options always produce the identical Dataset, so dataset ids are content
hashes and uploads are idempotent.

The store keeps one directory per dataset holding the original CSV plus a
small JSON manifest (name, hash, import options, timestamp); datasets are
rehydrated by re-parsing, which the determinism guarantee makes exact.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import re
import shutil
import tempfile
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .domain import (
    ACCEPTED_ELEMENTS,
    CANONICAL_ELEMENTS,
    Dataset,
    MIN_PATTERN_ELEMENTS,
    Provenance,
    ReePattern,
    UNKNOWN_CATEGORY,
)
from .errors import (
    AmbiguousElementColumns,
    DuplicateSampleIds,
    NoElementColumns,
    NoHeader,
    NotFound,
    NotUtf8,
)

NONPOSITIVE_POLICIES = ("reject", "drop-nonpositive", "replace-half-detection-limit")

_NA_TOKENS = {"", "na", "n/a", "nan", "null", "none", "-", "--", "nd", "n.d."}

_ELEMENT_TOKEN = re.compile(
    r"^(?P<sym>[a-z]{1,2})(?:[\s_]*\(?\s*(?:ppm|wt\.?\s*%?|pct|percent)\s*\)?)?$"
)

_ID_TOKENS = {"sample", "id", "sample_id", "sampleid", "sample id", "sample_name"}

_CENSORED = re.compile(r"^<\s*(?P<limit>[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)$")


@dataclass(frozen=True)
class ImportOptions:
    delimiter: str = ","
    unit: str = "ppm"  # "ppm" or "wt%"
    nonpositive_policy: str = "reject"
    source_name: str = "upload.csv"

    def fingerprint(self) -> str:
        return json.dumps(
            {
                "delimiter": self.delimiter,
                "unit": self.unit,
                "nonpositive_policy": self.nonpositive_policy,
            },
            sort_keys=True,
        )


@dataclass
class ImportReport:
    dataset_id: str
    rows_accepted: int
    rows_rejected: list[tuple[int, str]]
    detected_elements: list[str]
    detected_categories: list[str]
    unit_assumption: str
    notes: list[str] = field(default_factory=list)

    def to_jsonable(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "rows_accepted": self.rows_accepted,
            "rows_rejected": [[n, reason] for n, reason in self.rows_rejected],
            "detected_elements": self.detected_elements,
            "detected_categories": self.detected_categories,
            "unit_assumption": self.unit_assumption,
            "notes": self.notes,
        }

    @staticmethod
    def from_jsonable(obj: dict) -> "ImportReport":
        return ImportReport(
            dataset_id=obj["dataset_id"],
            rows_accepted=obj["rows_accepted"],
            rows_rejected=[(int(n), r) for n, r in obj["rows_rejected"]],
            detected_elements=list(obj["detected_elements"]),
            detected_categories=list(obj["detected_categories"]),
            unit_assumption=obj["unit_assumption"],
            notes=list(obj.get("notes", [])),
        )


def _match_element(header: str) -> Optional[str]:
    token = header.strip().strip('"').lower()
    m = _ELEMENT_TOKEN.match(token)
    if not m:
        return None
    sym = m.group("sym").capitalize()
    return sym if sym in ACCEPTED_ELEMENTS else None


def _is_id_column(header: str) -> bool:
    return header.strip().lower() in _ID_TOKENS


def dataset_id_for(data: bytes, options: ImportOptions) -> str:
    digest = hashlib.sha256()
    digest.update(data)
    digest.update(options.fingerprint().encode())
    return digest.hexdigest()[:16]


def parse_csv(
    data: bytes, options: ImportOptions = ImportOptions()
) -> tuple[Dataset, ImportReport]:
    """Parse raw CSV bytes into a Dataset plus a row-level ImportReport.

    Header tokens matching element symbols (case-insensitive, with optional
    unit suffixes like ``La_ppm`` or ``La (ppm)``) become concentration
    columns; a sample/id/sample_id column, if any, names the rows; all other
    columns become categories. Rows violating pattern invariants are
    rejected individually with reasons, never aborting the parse.
    """
    if options.nonpositive_policy not in NONPOSITIVE_POLICIES:
        raise ValueError(
            f"unknown nonpositive_policy {options.nonpositive_policy!r}"
        )
    if options.unit not in ("ppm", "wt%"):
        raise ValueError(f"unknown unit {options.unit!r}")
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as err:
        raise NotUtf8(f"input is not UTF-8 text: {err}") from err

    reader = csv.reader(io.StringIO(text), delimiter=options.delimiter)
    rows = [row for row in reader if any(cell.strip() for cell in row)]
    if not rows:
        raise NoHeader("input has no header row")
    header, data_rows = rows[0], rows[1:]

    element_cols: dict[int, str] = {}
    id_col: Optional[int] = None
    category_cols: dict[int, str] = {}
    seen_elements: dict[str, str] = {}
    for idx, name in enumerate(header):
        sym = _match_element(name)
        if sym is not None:
            if sym in seen_elements:
                raise AmbiguousElementColumns(
                    f"columns {seen_elements[sym]!r} and {name!r} both map to {sym}"
                )
            seen_elements[sym] = name
            element_cols[idx] = sym
            continue
        if id_col is None and _is_id_column(name):
            id_col = idx
            continue
        category_cols[idx] = name.strip()
    if not element_cols:
        raise NoElementColumns("no element columns recognised in header")

    scale = 10000.0 if options.unit == "wt%" else 1.0
    policy = options.nonpositive_policy

    patterns: list[ReePattern] = []
    rejected: list[tuple[int, str]] = []
    notes: list[str] = []
    seen_ids: set[str] = set()
    for row_number, row in enumerate(data_rows, start=1):
        cells = {i: (row[i].strip() if i < len(row) else "") for i in range(len(header))}
        sample_id = cells.get(id_col, "").strip() if id_col is not None else ""
        if not sample_id:
            sample_id = str(row_number)
        if sample_id in seen_ids:
            raise DuplicateSampleIds(f"duplicate sample id {sample_id!r}")

        concentrations: dict[str, float] = {}
        reject_reason: Optional[str] = None
        for idx, sym in element_cols.items():
            raw = cells[idx]
            if raw.lower() in _NA_TOKENS:
                continue
            censored = _CENSORED.match(raw)
            if censored:
                if policy == "replace-half-detection-limit":
                    concentrations[sym] = float(censored.group("limit")) * scale / 2.0
                else:
                    notes.append(
                        f"row {row_number}: censored value {raw!r} for {sym} -> absent"
                    )
                continue
            try:
                value = float(raw) * scale
            except ValueError:
                reject_reason = f"NonNumericValue ({sym}={raw!r})"
                break
            if value < 0 or (value == 0 and policy != "reject"):
                if policy == "reject":
                    reject_reason = "NonPositiveConcentration"
                    break
                notes.append(
                    f"row {row_number}: non-positive value for {sym} dropped"
                )
                continue
            concentrations[sym] = value
        if reject_reason is not None:
            rejected.append((row_number, reject_reason))
            continue

        n_canonical = sum(1 for e in concentrations if e in CANONICAL_ELEMENTS)
        if n_canonical < MIN_PATTERN_ELEMENTS:
            rejected.append((row_number, "TooFewElements"))
            continue

        categories = {}
        for idx, name in category_cols.items():
            raw = cells[idx]
            categories[name] = raw if raw != "" else UNKNOWN_CATEGORY
        patterns.append(
            ReePattern(
                sample_id=sample_id,
                concentrations_ppm=concentrations,
                categories=categories,
            )
        )
        seen_ids.add(sample_id)

    ds_id = dataset_id_for(data, options)
    dataset = Dataset(
        dataset_id=ds_id,
        patterns=tuple(patterns),
        category_schema=tuple(category_cols.values()),
        provenance=Provenance(source_name=options.source_name),
    )
    report = ImportReport(
        dataset_id=ds_id,
        rows_accepted=len(patterns),
        rows_rejected=rejected,
        detected_elements=[e for e in ACCEPTED_ELEMENTS if e in seen_elements],
        detected_categories=list(category_cols.values()),
        unit_assumption=options.unit,
        notes=notes,
    )
    return dataset, report


class DatasetStore:
    """Directory-per-dataset persistence with content-hash ids.

    Layout: ``root/<dataset_id>/{data.csv, manifest.json}``. Writes build a
    temp directory and rename it into place, so readers never observe a
    partial dataset; re-putting identical content is a no-op.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()
        self._fit_cache: dict[tuple[str, str], object] = {}
        self._cache_lock = threading.Lock()

    def put_csv(
        self, data: bytes, options: ImportOptions = ImportOptions()
    ) -> tuple[Dataset, ImportReport]:
        """Parse and persist raw CSV; idempotent by content hash."""
        dataset, report = parse_csv(data, options)
        manifest = {
            "dataset_id": dataset.dataset_id,
            "name": options.source_name,
            "sha256": hashlib.sha256(data).hexdigest(),
            "options": {
                "delimiter": options.delimiter,
                "unit": options.unit,
                "nonpositive_policy": options.nonpositive_policy,
                "source_name": options.source_name,
            },
            "imported_at": datetime.now(timezone.utc).isoformat(),
            "rows": len(dataset.patterns),
            "categories": list(dataset.category_schema),
            "report": report.to_jsonable(),
        }
        target = self.root / dataset.dataset_id
        with self._write_lock:
            if not target.exists():
                tmp = Path(tempfile.mkdtemp(prefix=".tmp-", dir=self.root))
                try:
                    (tmp / "data.csv").write_bytes(data)
                    (tmp / "manifest.json").write_text(
                        json.dumps(manifest, indent=2) + "\n"
                    )
                    os.replace(tmp, target)
                except OSError:
                    # Lost a race; content is identical by construction.
                    shutil.rmtree(tmp, ignore_errors=True)
                    if not target.exists():
                        raise
        return dataset, report

    def put(self, dataset: Dataset) -> str:
        """Persist an in-memory dataset via its canonical CSV rendering."""
        data = render_dataset_csv(dataset).encode()
        options = ImportOptions(source_name=dataset.provenance.source_name or "dataset")
        stored, _ = self.put_csv(data, options)
        return stored.dataset_id

    def _manifest(self, dataset_id: str) -> dict:
        path = self.root / dataset_id / "manifest.json"
        if not path.exists():
            raise NotFound(f"dataset {dataset_id!r} not found")
        return json.loads(path.read_text())

    def get(self, dataset_id: str) -> Dataset:
        manifest = self._manifest(dataset_id)
        data = (self.root / dataset_id / "data.csv").read_bytes()
        opts = manifest["options"]
        dataset, _ = parse_csv(
            data,
            ImportOptions(
                delimiter=opts["delimiter"],
                unit=opts["unit"],
                nonpositive_policy=opts["nonpositive_policy"],
                source_name=opts["source_name"],
            ),
        )
        return Dataset(
            dataset_id=dataset.dataset_id,
            patterns=dataset.patterns,
            category_schema=dataset.category_schema,
            provenance=Provenance(
                source_name=opts["source_name"],
                imported_at=manifest.get("imported_at"),
            ),
        )

    def get_report(self, dataset_id: str) -> ImportReport:
        return ImportReport.from_jsonable(self._manifest(dataset_id)["report"])

    def list(self) -> list[dict]:
        summaries = []
        for entry in sorted(self.root.iterdir()):
            if not entry.is_dir() or entry.name.startswith("."):
                continue
            try:
                manifest = json.loads((entry / "manifest.json").read_text())
            except (OSError, json.JSONDecodeError):
                continue
            summaries.append(
                {
                    "dataset_id": manifest["dataset_id"],
                    "name": manifest["name"],
                    "rows": manifest["rows"],
                    "categories": manifest["categories"],
                }
            )
        return summaries

    def cache_get(self, dataset_id: str, key: str):
        with self._cache_lock:
            return self._fit_cache.get((dataset_id, key))

    def cache_put(self, dataset_id: str, key: str, value) -> None:
        with self._cache_lock:
            self._fit_cache[(dataset_id, key)] = value


def render_dataset_csv(dataset: Dataset) -> str:
    """Canonical CSV rendering of a dataset (for store round-trips)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    elements = [
        e
        for e in ACCEPTED_ELEMENTS
        if any(e in p.concentrations_ppm for p in dataset.patterns)
    ]
    writer.writerow(["sample"] + elements + list(dataset.category_schema))
    for p in dataset.patterns:
        row = [p.sample_id]
        for e in elements:
            c = p.concentrations_ppm.get(e)
            row.append(repr(c) if c is not None else "")
        for name in dataset.category_schema:
            row.append(p.categories[name])
        writer.writerow(row)
    return buf.getvalue()
