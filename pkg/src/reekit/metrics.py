"""Exploration reporting metrics: TREO, NdPr, LREE/HREE, shape ratios, and
price-weighted basket value.

Oxide conversion uses stoichiometric metal-to-oxide mass ratios from IUPAC
standard atomic weights. All REEs default to the sesquioxide (RE2O3); CeO2
and Pr6O11 forms are selectable since TREO reporting conventions vary.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping, Optional

from .domain import CANONICAL_ELEMENTS, ReePattern
from .errors import InvalidPriceFile, ZeroTotal
from .normalization import NormalizedPattern

# IUPAC standard atomic weights (2021).
ATOMIC_MASS = {
    "La": 138.90547,
    "Ce": 140.116,
    "Pr": 140.90766,
    "Nd": 144.242,
    "Sm": 150.36,
    "Eu": 151.964,
    "Gd": 157.25,
    "Tb": 158.92535,
    "Dy": 162.500,
    "Ho": 164.93033,
    "Er": 167.259,
    "Tm": 168.93422,
    "Yb": 173.045,
    "Lu": 174.9668,
    "O": 15.999,
}

# Light vs heavy REE split; Gd boundary is the common convention.
DEFAULT_LREE = ("La", "Ce", "Pr", "Nd", "Sm", "Eu")
DEFAULT_HREE = ("Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu")

SHAPE_RATIO_PAIRS = (("La", "Lu"), ("La", "Gd"), ("Gd", "Lu"))


@dataclass(frozen=True)
class OxideConfig:
    """Which oxide form each element converts to. Default: all sesquioxide."""

    cerium: str = "Ce2O3"  # or "CeO2"
    praseodymium: str = "Pr2O3"  # or "Pr6O11"

    def stoichiometry(self, element: str) -> tuple[int, int]:
        """(metal atoms, oxygen atoms) in the reported oxide formula."""
        if element == "Ce" and self.cerium == "CeO2":
            return (1, 2)
        if element == "Pr" and self.praseodymium == "Pr6O11":
            return (6, 11)
        return (2, 3)


def oxide_factor(element: str, oxides: OxideConfig = OxideConfig()) -> float:
    """Mass of oxide per unit mass of metal; always > 1."""
    n_metal, n_oxygen = oxides.stoichiometry(element)
    m = ATOMIC_MASS[element]
    return (n_metal * m + n_oxygen * ATOMIC_MASS["O"]) / (n_metal * m)


def treo(pattern: ReePattern, oxides: OxideConfig = OxideConfig()) -> float:
    """Total rare earth oxides in ppm: sum of oxide-equivalent masses."""
    return sum(
        c * oxide_factor(e, oxides)
        for e, c in pattern.concentrations_ppm.items()
        if e in CANONICAL_ELEMENTS
    )


def ndpr(
    pattern: ReePattern,
    basis: str = "metal",
    oxides: OxideConfig = OxideConfig(),
) -> float:
    """Fraction of Nd + Pr relative to total canonical REE.

    ``basis`` selects metal mass (default) or oxide mass; industry usage
    varies, so both are offered.
    """
    if basis not in ("metal", "oxide"):
        raise ValueError(f"unknown ndpr basis {basis!r}; use 'metal' or 'oxide'")

    def mass(e: str, c: float) -> float:
        return c * oxide_factor(e, oxides) if basis == "oxide" else c

    total = sum(
        mass(e, c)
        for e, c in pattern.concentrations_ppm.items()
        if e in CANONICAL_ELEMENTS
    )
    if total <= 0:
        raise ZeroTotal(f"sample {pattern.sample_id!r}: total REE is zero")
    nd = mass("Nd", pattern.concentrations_ppm.get("Nd", 0.0))
    pr = mass("Pr", pattern.concentrations_ppm.get("Pr", 0.0))
    return (nd + pr) / total


def lree_hree_ratio(
    pattern: ReePattern,
    lree: tuple[str, ...] = DEFAULT_LREE,
    hree: tuple[str, ...] = DEFAULT_HREE,
) -> Optional[float]:
    """Light-to-heavy REE mass ratio; None when the heavy sum is zero."""
    light = sum(pattern.concentrations_ppm.get(e, 0.0) for e in lree)
    heavy = sum(pattern.concentrations_ppm.get(e, 0.0) for e in hree)
    if heavy <= 0:
        return None
    return light / heavy


def shape_ratios(normalized: NormalizedPattern) -> tuple[dict[str, float], list[str]]:
    """Normalised-concentration ratios La/Lu, La/Gd, Gd/Lu.

    Ratios are of reference-normalised values, i.e. exp(y_a - y_b). Pairs
    with a missing member are omitted; the second return value notes them.
    """
    y = normalized.y_by_element()
    ratios: dict[str, float] = {}
    notes: list[str] = []
    for a, b in SHAPE_RATIO_PAIRS:
        key = f"{a}/{b}"
        if a in y and b in y:
            ratios[key] = math.exp(y[a] - y[b])
        else:
            notes.append(f"{key} omitted: element not present")
    return ratios, notes


def basket_value(
    pattern: ReePattern,
    prices_usd_per_kg_oxide: Mapping[str, float],
    oxides: OxideConfig = OxideConfig(),
) -> tuple[float, list[str]]:
    """Price-weighted in-situ value in USD per tonne of rock.

    1 ppm = 1 g/t; oxide grams per tonne times USD/kg gives USD/t via the
    1e-3 kg/g factor. Elements without a price contribute zero and are
    listed in the warnings.
    """
    total = 0.0
    warnings: list[str] = []
    for e, c in pattern.concentrations_ppm.items():
        if e not in CANONICAL_ELEMENTS:
            continue
        price = prices_usd_per_kg_oxide.get(e)
        if price is None:
            warnings.append(f"no price for {e}; valued at 0")
            continue
        total += c * oxide_factor(e, oxides) * 1e-3 * price
    return total, warnings


@dataclass(frozen=True)
class MetricReport:
    sample_id: str
    treo_ppm: float
    ndpr_fraction: float
    lree_hree_ratio: Optional[float]
    ratios: dict[str, float]
    basket_value_usd_per_tonne: Optional[float] = None
    notes: tuple[str, ...] = ()

    def to_jsonable(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "treo_ppm": self.treo_ppm,
            "ndpr_fraction": self.ndpr_fraction,
            "lree_hree_ratio": self.lree_hree_ratio,
            "ratios": dict(self.ratios),
            "basket_value_usd_per_tonne": self.basket_value_usd_per_tonne,
            "notes": list(self.notes),
        }


def metric_report(
    pattern: ReePattern,
    normalized: NormalizedPattern,
    prices: Optional[Mapping[str, float]] = None,
    oxides: OxideConfig = OxideConfig(),
) -> MetricReport:
    """Assemble the full per-sample metric bundle."""
    ratios, notes = shape_ratios(normalized)
    basket = None
    if prices is not None:
        basket, warns = basket_value(pattern, prices, oxides)
        notes = notes + warns
    return MetricReport(
        sample_id=pattern.sample_id,
        treo_ppm=treo(pattern, oxides),
        ndpr_fraction=ndpr(pattern),
        lree_hree_ratio=lree_hree_ratio(pattern),
        ratios=ratios,
        basket_value_usd_per_tonne=basket,
        notes=tuple(notes),
    )


METRICS_CSV_COLUMNS = (
    "sample",
    "treo_ppm",
    "ndpr_fraction",
    "lree_hree_ratio",
    "la_lu",
    "la_gd",
    "gd_lu",
    "basket_value_usd_per_tonne",
)


def metrics_csv(reports: list[MetricReport]) -> str:
    """Fixed-column metrics table; empty cells for unavailable values."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(METRICS_CSV_COLUMNS)
    for r in reports:
        writer.writerow(
            [
                r.sample_id,
                repr(r.treo_ppm),
                repr(r.ndpr_fraction),
                repr(r.lree_hree_ratio) if r.lree_hree_ratio is not None else "",
                repr(r.ratios["La/Lu"]) if "La/Lu" in r.ratios else "",
                repr(r.ratios["La/Gd"]) if "La/Gd" in r.ratios else "",
                repr(r.ratios["Gd/Lu"]) if "Gd/Lu" in r.ratios else "",
                repr(r.basket_value_usd_per_tonne)
                if r.basket_value_usd_per_tonne is not None
                else "",
            ]
        )
    return buf.getvalue()


def parse_price_csv(text: str) -> dict[str, float]:
    """Parse a price file: columns ``element,usd_per_kg_oxide``."""
    try:
        rows = list(csv.DictReader(io.StringIO(text)))
    except csv.Error as err:
        raise InvalidPriceFile(f"cannot parse price file: {err}") from err
    if not rows:
        raise InvalidPriceFile("price file has no data rows")
    prices: dict[str, float] = {}
    for i, row in enumerate(rows, start=1):
        element = (row.get("element") or "").strip()
        raw = (row.get("usd_per_kg_oxide") or "").strip()
        if element not in CANONICAL_ELEMENTS:
            raise InvalidPriceFile(f"row {i}: unknown element {element!r}")
        try:
            price = float(raw)
        except ValueError:
            raise InvalidPriceFile(f"row {i}: bad price {raw!r}") from None
        if price < 0:
            raise InvalidPriceFile(f"row {i}: negative price for {element}")
        prices[element] = price
    return prices
