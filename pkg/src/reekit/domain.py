"""Core domain model: the canonical element set, ionic radii, reference
standards, and sample/dataset containers used by every other module.

Radii and normalisation standards ship as editable CSV files under
``reekit/data/`` (columns ``element,value,unit,citation``) so their
provenance is auditable and swappable without touching code.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from types import MappingProxyType
from typing import Mapping, Optional

import numpy as np

from .errors import (
    DuplicateSampleIds,
    NonPositiveConcentration,
    TooFewElements,
    UnknownStandard,
)

# Lanthanides La..Lu excluding Pm, ordered by decreasing ionic radius.
CANONICAL_ELEMENTS: tuple[str, ...] = (
    "La", "Ce", "Pr", "Nd", "Sm", "Eu", "Gd",
    "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
)
# Accepted on ingest, excluded from fitting by default.
EXTENDED_ELEMENTS: tuple[str, ...] = ("Y", "Sc")
ACCEPTED_ELEMENTS: tuple[str, ...] = CANONICAL_ELEMENTS + EXTENDED_ELEMENTS

_CANONICAL_INDEX = {sym: i for i, sym in enumerate(CANONICAL_ELEMENTS)}

# Minimum canonical elements for a pattern: a 4-coefficient fit plus one
# excluded anomaly still needs this many points.
MIN_PATTERN_ELEMENTS = 5

UNKNOWN_CATEGORY = "UNKNOWN"

BUILTIN_STANDARDS: tuple[str, ...] = ("chondrite", "MORB", "average-crust")

_STANDARD_FILES = {
    "chondrite": "chondrite.csv",
    "morb": "morb.csv",
    "average-crust": "average_crust.csv",
}

_RADII_FILE = "radii_shannon_viii.csv"


def is_canonical(symbol: str) -> bool:
    return symbol in _CANONICAL_INDEX


def canonical_index(symbol: str) -> int:
    return _CANONICAL_INDEX[symbol]


def _freeze_mapping(obj, name):
    value = getattr(obj, name)
    if not isinstance(value, MappingProxyType):
        object.__setattr__(obj, name, MappingProxyType(dict(value)))


@dataclass(frozen=True)
class RadiiTable:
    """Ionic radii in picometers over the canonical element order."""

    radius_pm: Mapping[str, float]
    source_label: str

    def __post_init__(self):
        _freeze_mapping(self, "radius_pm")
        missing = [e for e in CANONICAL_ELEMENTS if e not in self.radius_pm]
        if missing:
            raise ValueError(f"radii table missing elements: {missing}")
        values = [self.radius_pm[e] for e in CANONICAL_ELEMENTS]
        if any(not (90.0 <= v <= 130.0) for v in values):
            raise ValueError("radii outside the 90-130 pm sanity band")
        if any(nxt >= prev for prev, nxt in zip(values, values[1:])):
            raise ValueError("radii must strictly decrease from La to Lu")

    def as_array(self) -> np.ndarray:
        """Radii in canonical (decreasing) order."""
        return np.array([self.radius_pm[e] for e in CANONICAL_ELEMENTS])


@dataclass(frozen=True)
class ReferenceStandard:
    """A named normalisation vector, e.g. chondrite or MORB."""

    name: str
    values_ppm: Mapping[str, float]
    citation: str

    def __post_init__(self):
        _freeze_mapping(self, "values_ppm")
        for e in CANONICAL_ELEMENTS:
            v = self.values_ppm.get(e)
            if v is None or not v > 0:
                raise ValueError(
                    f"reference standard {self.name!r}: element {e} missing or non-positive"
                )

    def as_array(self) -> np.ndarray:
        return np.array([self.values_ppm[e] for e in CANONICAL_ELEMENTS])


@dataclass(frozen=True)
class ReePattern:
    """One sample's element concentrations (ppm) plus category labels.

    Absent elements are simply missing keys. Concentrations must be
    non-negative; zeros are representable (below-detection placeholders)
    and are policed at normalisation time, not here.
    """

    sample_id: str
    concentrations_ppm: Mapping[str, float]
    categories: Mapping[str, str] = field(default_factory=dict)
    uncertainties_ppm: Optional[Mapping[str, float]] = None

    def __post_init__(self):
        if not self.sample_id:
            raise ValueError("sample_id must be non-empty")
        _freeze_mapping(self, "concentrations_ppm")
        _freeze_mapping(self, "categories")
        if self.uncertainties_ppm is not None:
            _freeze_mapping(self, "uncertainties_ppm")
        for e, c in self.concentrations_ppm.items():
            if e not in ACCEPTED_ELEMENTS:
                raise ValueError(f"unknown element symbol {e!r}")
            if c < 0:
                raise NonPositiveConcentration(
                    f"sample {self.sample_id!r}: negative concentration for {e}"
                )
        n = len(self.present_canonical())
        if n < MIN_PATTERN_ELEMENTS:
            raise TooFewElements(
                f"sample {self.sample_id!r} has {n} canonical elements, "
                f"needs at least {MIN_PATTERN_ELEMENTS}"
            )

    def present_canonical(self) -> tuple[str, ...]:
        return tuple(e for e in CANONICAL_ELEMENTS if e in self.concentrations_ppm)


@dataclass(frozen=True)
class Provenance:
    source_name: str
    imported_at: Optional[str] = None  # manifest-only; excluded from identity


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of patterns sharing one category schema."""

    dataset_id: str
    patterns: tuple[ReePattern, ...]
    category_schema: tuple[str, ...]
    provenance: Provenance

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(self.patterns))
        object.__setattr__(self, "category_schema", tuple(self.category_schema))
        seen = set()
        for p in self.patterns:
            if p.sample_id in seen:
                raise DuplicateSampleIds(f"duplicate sample_id {p.sample_id!r}")
            seen.add(p.sample_id)
        # Every pattern carries the full schema (missing values are filled
        # with UNKNOWN before construction), which makes the schema exactly
        # the union of category keys across patterns.
        for p in self.patterns:
            if set(p.categories.keys()) != set(self.category_schema):
                raise ValueError(
                    f"sample {p.sample_id!r} categories do not match schema; "
                    f"fill missing values with {UNKNOWN_CATEGORY!r} first"
                )

    def sample_ids(self) -> tuple[str, ...]:
        return tuple(p.sample_id for p in self.patterns)

    def get_pattern(self, sample_id: str) -> ReePattern:
        for p in self.patterns:
            if p.sample_id == sample_id:
                return p
        raise KeyError(sample_id)

    def category_values(self, name: str) -> tuple[str, ...]:
        """Distinct values for one category, lexicographically sorted."""
        return tuple(sorted({p.categories[name] for p in self.patterns}))

    def to_jsonable(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "category_schema": list(self.category_schema),
            "provenance": {
                "source_name": self.provenance.source_name,
                "imported_at": self.provenance.imported_at,
            },
            "patterns": [
                {
                    "sample_id": p.sample_id,
                    "concentrations_ppm": dict(p.concentrations_ppm),
                    "categories": dict(p.categories),
                    "uncertainties_ppm": (
                        dict(p.uncertainties_ppm)
                        if p.uncertainties_ppm is not None
                        else None
                    ),
                }
                for p in self.patterns
            ],
        }

    @staticmethod
    def from_jsonable(obj: dict) -> "Dataset":
        patterns = tuple(
            ReePattern(
                sample_id=row["sample_id"],
                concentrations_ppm=row["concentrations_ppm"],
                categories=row["categories"],
                uncertainties_ppm=row.get("uncertainties_ppm"),
            )
            for row in obj["patterns"]
        )
        prov = obj.get("provenance", {})
        return Dataset(
            dataset_id=obj["dataset_id"],
            patterns=patterns,
            category_schema=tuple(obj["category_schema"]),
            provenance=Provenance(
                source_name=prov.get("source_name", ""),
                imported_at=prov.get("imported_at"),
            ),
        )

    def content_hash(self) -> str:
        payload = self.to_jsonable()
        payload["dataset_id"] = ""
        payload["provenance"]["imported_at"] = None
        raw = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(raw).hexdigest()[:16]


def _load_table(filename: str) -> tuple[dict[str, float], str]:
    with resources.files("reekit.data").joinpath(filename).open(
        "r", encoding="utf-8"
    ) as fh:
        rows = list(csv.DictReader(fh))
    values = {r["element"]: float(r["value"]) for r in rows}
    citation = rows[0]["citation"] if rows else ""
    return values, citation


@lru_cache(maxsize=None)
def canonical_radii() -> RadiiTable:
    """The shipped 14-entry ionic radii table, strictly decreasing La to Lu."""
    values, citation = _load_table(_RADII_FILE)
    return RadiiTable(radius_pm=values, source_label=citation)


@lru_cache(maxsize=None)
def builtin_reference(name: str) -> ReferenceStandard:
    """Look up a bundled normalisation standard by name.

    Accepted names: ``chondrite``, ``MORB``, ``average-crust``
    (case-insensitive). Raises :class:`UnknownStandard` otherwise.
    """
    key = name.strip().lower()
    filename = _STANDARD_FILES.get(key)
    if filename is None:
        raise UnknownStandard(
            f"unknown reference standard {name!r}; "
            f"available: {', '.join(BUILTIN_STANDARDS)}"
        )
    values, citation = _load_table(filename)
    canonical_name = {v.lower(): v for v in BUILTIN_STANDARDS}[key]
    return ReferenceStandard(name=canonical_name, values_ppm=values, citation=citation)
