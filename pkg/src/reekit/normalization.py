"""Reference normalisation: raw concentrations to log-space fit inputs and back.

The fitted quantity is y = ln(concentration / reference), natural log. The
log base choice is recorded on every NormalizedPattern (``fit_space``) since
published tooling is not consistent about it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .domain import CANONICAL_ELEMENTS, RadiiTable, ReePattern, ReferenceStandard
from .errors import NonPositiveConcentration, TooFewElements

#: Valid non-positive handling policies.
POLICIES = ("reject", "drop-nonpositive")

MIN_FIT_ELEMENTS = 5


class NormalizedPoint(NamedTuple):
    element: str
    radius_pm: float
    y: float


@dataclass(frozen=True)
class NormalizedPattern:
    """Log-normalised pattern: points ordered by decreasing radius."""

    sample_id: str
    points: tuple[NormalizedPoint, ...]
    mask: frozenset[str]
    reference_name: str
    fit_space: str = "ln"

    def elements(self) -> tuple[str, ...]:
        return tuple(p.element for p in self.points)

    def radius_array(self) -> np.ndarray:
        return np.array([p.radius_pm for p in self.points])

    def y_array(self) -> np.ndarray:
        return np.array([p.y for p in self.points])

    def y_by_element(self) -> dict[str, float]:
        return {p.element: p.y for p in self.points}


def normalize_values(
    concentrations_ppm: Mapping[str, float],
    standard: ReferenceStandard,
    radii: RadiiTable,
    exclusions: Iterable[str] = (),
    policy: str = "reject",
    min_points: int = MIN_FIT_ELEMENTS,
    sample_id: str = "",
) -> NormalizedPattern:
    """Core normalisation over a raw element -> ppm map.

    ``policy`` controls non-positive concentrations: ``reject`` raises
    NonPositiveConcentration naming the element; ``drop-nonpositive`` moves
    the element into the mask.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; use one of {POLICIES}")
    excluded = set(exclusions)
    points = []
    mask = set()
    for e in CANONICAL_ELEMENTS:
        c = concentrations_ppm.get(e)
        if c is None:
            mask.add(e)
            continue
        if e in excluded:
            mask.add(e)
            continue
        if c <= 0:
            if policy == "reject":
                raise NonPositiveConcentration(
                    f"sample {sample_id!r}: non-positive concentration for {e}"
                )
            mask.add(e)
            continue
        y = math.log(c / standard.values_ppm[e])
        points.append(NormalizedPoint(e, radii.radius_pm[e], y))
    if len(points) < min_points:
        raise TooFewElements(
            f"sample {sample_id!r}: {len(points)} usable elements after "
            f"exclusions, need at least {min_points}"
        )
    return NormalizedPattern(
        sample_id=sample_id,
        points=tuple(points),
        mask=frozenset(mask),
        reference_name=standard.name,
    )


def normalize(
    pattern: ReePattern,
    standard: ReferenceStandard,
    radii: RadiiTable,
    exclusions: Iterable[str] = (),
    policy: str = "reject",
) -> NormalizedPattern:
    """Normalise one pattern against a reference standard."""
    return normalize_values(
        pattern.concentrations_ppm,
        standard,
        radii,
        exclusions=exclusions,
        policy=policy,
        sample_id=pattern.sample_id,
    )


def denormalize(
    y_values: Mapping[str, float], standard: ReferenceStandard
) -> dict[str, float]:
    """Invert normalisation: c = reference * exp(y), per element."""
    return {e: standard.values_ppm[e] * math.exp(y) for e, y in y_values.items()}
