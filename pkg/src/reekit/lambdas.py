"""Orthogonal-polynomial parameterisation of normalised REE patterns.

A pattern's log-normalised values y(r) are modelled as

    y(r) = lambda_0 * f0(r) + lambda_1 * f1(r) + ... + lambda_k * fk(r)

where the f_j are monic polynomials in ionic radius r (pm), built to be
mutually orthogonal under the unweighted discrete inner product over the
full canonical 14-radius grid. Orthogonalising over the *fixed* grid - not
per-sample - keeps coefficients comparable across samples that are missing
elements. With f0 = 1, lambda_0 is the pattern's mean height, lambda_1 its
slope, lambda_2 its curvature, lambda_3 its sinusoidality.

Construction uses the three-term (Stieltjes) recurrence on the mean-centered
radius variable, which is numerically benign for degree <= 6 over 14 points.
Fits go through an SVD-based solve of the design matrix; plain normal
equations are reserved for test oracles.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .domain import (
    CANONICAL_ELEMENTS,
    Dataset,
    RadiiTable,
    ReePattern,
    ReferenceStandard,
    builtin_reference,
    canonical_index,
    canonical_radii,
)
from .errors import (
    DegreeOutOfRange,
    EmptyDataset,
    RankDeficient,
    ReekitError,
    TooFewPoints,
)
from .normalization import NormalizedPattern, denormalize, normalize

DEFAULT_DEGREE_COUNT = 4
MIN_DEGREE_COUNT = 2
MAX_DEGREE_COUNT = 6

# Smallest/largest singular value ratio below which a fit is refused.
RANK_TOLERANCE = 1e-10

# Display glosses for the coefficient axes, by index.
LAMBDA_GLOSSES = (
    "REE abundance",
    "heavy or light REE enrichment",
    "enrichment of middle REEs",
    "sinusoidality",
    "higher-order shape",
    "higher-order shape",
)

# Slider ranges for the interactive sandbox, per coefficient index. Chosen to
# cover coefficients fitted from the synthetic fixtures with ample margin.
SANDBOX_BOUNDS = (
    (-5.0, 15.0),
    (-1.0, 1.0),
    (-0.1, 0.1),
    (-0.01, 0.01),
    (-0.001, 0.001),
    (-0.0001, 0.0001),
)


def lambda_axis_label(index: int) -> str:
    if 0 <= index < len(LAMBDA_GLOSSES):
        return f"λ{index} ({LAMBDA_GLOSSES[index]})"
    return f"λ{index}"


@dataclass(frozen=True, eq=False)
class OrthogonalBasis:
    """Fixed polynomial basis over the canonical radius grid.

    ``coefficients`` holds each f_j's monic coefficients in raw radius r
    (ascending powers). Evaluation goes through the mean-centered
    representation, which is the numerically stable one.
    """

    degree_count: int
    coefficients: tuple[tuple[float, ...], ...]
    grid: tuple[float, ...]
    gram_norms: tuple[float, ...]
    center: float
    centered_coefficients: tuple[tuple[float, ...], ...]
    basis_id: str
    design: np.ndarray = field(repr=False)

    def evaluate(self, j: int, radius_pm) -> np.ndarray:
        """Evaluate basis function f_j at radius values (pm)."""
        u = np.asarray(radius_pm, dtype=float) - self.center
        return P.polyval(u, np.asarray(self.centered_coefficients[j]))

    def design_rows(self, elements: Sequence[str]) -> np.ndarray:
        rows = [canonical_index(e) for e in elements]
        return self.design[rows, :]


def build_basis(
    radii: Optional[RadiiTable] = None, degree_count: int = DEFAULT_DEGREE_COUNT
) -> OrthogonalBasis:
    """Build the monic orthogonal basis over the full 14-radius grid.

    The basis is fixed on the complete grid regardless of which elements any
    particular sample carries, so fitted coefficients are comparable across
    samples.
    """
    if radii is None:
        radii = canonical_radii()
    if not MIN_DEGREE_COUNT <= degree_count <= MAX_DEGREE_COUNT:
        raise DegreeOutOfRange(
            f"degree_count must be within [{MIN_DEGREE_COUNT}, {MAX_DEGREE_COUNT}], "
            f"got {degree_count}"
        )
    grid = radii.as_array()
    center = float(grid.mean())
    u = grid - center

    # Stieltjes three-term recurrence for monic orthogonal polynomials:
    # p_{k+1}(u) = (u - a_k) p_k(u) - b_k p_{k-1}(u).
    values = np.empty((degree_count, grid.size))
    coeffs: list[np.ndarray] = []
    values[0] = 1.0
    coeffs.append(np.array([1.0]))
    if degree_count > 1:
        norms = [float(np.dot(values[0], values[0]))]
        for k in range(degree_count - 1):
            a = float(np.dot(u * values[k], values[k])) / norms[k]
            c_next = np.concatenate(([0.0], coeffs[k])) - a * np.pad(
                coeffs[k], (0, 1)
            )
            v_next = (u - a) * values[k]
            if k > 0:
                b = norms[k] / norms[k - 1]
                c_next = c_next - b * np.pad(coeffs[k - 1], (0, 2))
                v_next = v_next - b * values[k - 1]
            coeffs.append(c_next)
            values[k + 1] = v_next
            norms.append(float(np.dot(v_next, v_next)))
    gram = tuple(float(np.dot(values[j], values[j])) for j in range(degree_count))

    # Expand to raw-r coefficients: substitute u = r - center.
    shift = P.Polynomial([-center, 1.0])
    raw = tuple(
        tuple(float(c) for c in P.Polynomial(cu)(shift).coef) for cu in coeffs
    )
    centered = tuple(tuple(float(c) for c in cu) for cu in coeffs)

    digest = hashlib.sha256()
    digest.update(np.int64(degree_count).tobytes())
    digest.update(grid.tobytes())
    for cu in coeffs:
        digest.update(np.asarray(cu).tobytes())
    basis_id = digest.hexdigest()[:16]

    return OrthogonalBasis(
        degree_count=degree_count,
        coefficients=raw,
        grid=tuple(float(r) for r in grid),
        gram_norms=gram,
        center=center,
        centered_coefficients=centered,
        basis_id=basis_id,
        design=values.T.copy(),
    )


@dataclass(frozen=True)
class LambdaSet:
    """Fitted coefficients for one sample plus fit diagnostics."""

    sample_id: str
    lambdas: tuple[float, ...]
    residuals: Mapping[str, float]
    rms_misfit: float
    excluded: frozenset[str]
    basis_id: str

    def __post_init__(self):
        if not isinstance(self.residuals, MappingProxyType):
            object.__setattr__(self, "residuals", MappingProxyType(dict(self.residuals)))

    def to_jsonable(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "lambdas": list(self.lambdas),
            "residuals": dict(self.residuals),
            "rms_misfit": self.rms_misfit,
            "excluded": sorted(self.excluded),
            "basis_id": self.basis_id,
        }


@dataclass(frozen=True)
class AnomalyReport:
    """Ce/Eu anomaly factors: observed over smooth-fit prediction."""

    sample_id: str
    factors: Mapping[str, float]
    basis_id: str

    def __post_init__(self):
        if not isinstance(self.factors, MappingProxyType):
            object.__setattr__(self, "factors", MappingProxyType(dict(self.factors)))

    def to_jsonable(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "factors": dict(self.factors),
            "basis_id": self.basis_id,
        }


def fit_lambdas(
    pattern: NormalizedPattern,
    basis: OrthogonalBasis,
    weights: Optional[Mapping[str, float]] = None,
) -> LambdaSet:
    """Weighted least-squares fit of the basis to one normalised pattern.

    Solved by SVD of the (weighted) design matrix, never by normal
    equations. Default weights are uniform.
    """
    elements = pattern.elements()
    m = len(elements)
    k = basis.degree_count
    if m < k + 1:
        raise TooFewPoints(
            f"sample {pattern.sample_id!r}: {m} usable points, "
            f"need at least {k + 1} for degree_count {k}"
        )
    D = basis.design_rows(elements)
    y = pattern.y_array()
    if weights is not None:
        w = np.array([float(weights.get(e, 1.0)) for e in elements])
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
    else:
        w = np.ones(m)
    sw = np.sqrt(w)
    lam, _, _, sv = np.linalg.lstsq(D * sw[:, None], y * sw, rcond=None)
    if sv[-1] < RANK_TOLERANCE * sv[0]:
        raise RankDeficient(
            f"sample {pattern.sample_id!r}: included radii cannot resolve "
            f"degree_count {k} (singular value ratio {sv[-1] / sv[0]:.2e})"
        )
    fitted = D @ lam
    resid = y - fitted
    rms = float(np.sqrt(np.dot(w, resid**2) / w.sum()))
    return LambdaSet(
        sample_id=pattern.sample_id,
        lambdas=tuple(float(v) for v in lam),
        residuals={e: float(r) for e, r in zip(elements, resid)},
        rms_misfit=rms,
        excluded=pattern.mask,
        basis_id=basis.basis_id,
    )


def reconstruct(
    lambdas: Sequence[float],
    basis: OrthogonalBasis,
    elements: Iterable[str],
    standard: ReferenceStandard,
) -> dict[str, tuple[float, float]]:
    """Forward model: element -> (y_fitted, concentration ppm).

    This is what the sandbox renders while sliders move.
    """
    lam = np.asarray(lambdas, dtype=float)
    if lam.size != basis.degree_count:
        raise DegreeOutOfRange(
            f"lambda vector length {lam.size} does not match basis "
            f"degree_count {basis.degree_count}"
        )
    wanted = set(elements)
    out: dict[str, tuple[float, float]] = {}
    for e in CANONICAL_ELEMENTS:
        if e not in wanted:
            continue
        y = float(basis.design[canonical_index(e)] @ lam)
        conc = denormalize({e: y}, standard)[e]
        out[e] = (y, conc)
    return out


ANOMALY_CANDIDATES = ("Ce", "Eu")


def anomaly_factors(
    pattern: ReePattern,
    standard: ReferenceStandard,
    radii: RadiiTable,
    basis: OrthogonalBasis,
    policy: str = "reject",
    extra_exclusions: Iterable[str] = (),
) -> AnomalyReport:
    """Quantify Ce and Eu anomalies against a smooth fit.

    All candidate anomalous elements present in the pattern are excluded
    from the reference fit together, then each is predicted from it; a
    factor of 1 means no anomaly. Excluding the full candidate set keeps
    one element's anomaly from contaminating the other's prediction.

    Elements with non-positive observed concentrations are skipped (no
    meaningful ratio exists).
    """
    present = pattern.present_canonical()
    candidates = [
        e
        for e in ANOMALY_CANDIDATES
        if e in present and pattern.concentrations_ppm[e] > 0
    ]
    if not candidates:
        return AnomalyReport(pattern.sample_id, {}, basis.basis_id)
    exclusions = set(ANOMALY_CANDIDATES) | set(extra_exclusions)
    smooth = normalize(
        pattern, standard, radii, exclusions=exclusions, policy=policy
    )
    fit = fit_lambdas(smooth, basis)
    predicted = reconstruct(fit.lambdas, basis, candidates, standard)
    factors = {
        e: float(pattern.concentrations_ppm[e] / predicted[e][1]) for e in candidates
    }
    return AnomalyReport(pattern.sample_id, factors, basis.basis_id)


@dataclass(frozen=True)
class FitConfig:
    """Batch fit configuration; ``key()`` is the cache identity."""

    standard: str = "chondrite"
    degree_count: int = DEFAULT_DEGREE_COUNT
    exclusions: frozenset[str] = frozenset()
    nonpositive_policy: str = "reject"
    weights_policy: str = "uniform"

    def key(self) -> str:
        return "|".join(
            (
                self.standard.lower(),
                str(self.degree_count),
                ",".join(sorted(self.exclusions)),
                self.nonpositive_policy,
                self.weights_policy,
            )
        )


class SampleError(NamedTuple):
    sample_id: str
    code: str
    message: str


@dataclass
class BatchFitResult:
    lambda_sets: list[LambdaSet]
    anomalies: list[AnomalyReport]
    errors: list[SampleError]

    def anomaly_by_sample(self) -> dict[str, AnomalyReport]:
        return {a.sample_id: a for a in self.anomalies}


def _uncertainty_weights(pattern: ReePattern) -> Optional[dict[str, float]]:
    if not pattern.uncertainties_ppm:
        return None
    weights = {}
    for e, sigma in pattern.uncertainties_ppm.items():
        c = pattern.concentrations_ppm.get(e)
        if c and c > 0 and sigma and sigma > 0:
            # 1-sigma in log space is approximately sigma/c.
            weights[e] = (c / sigma) ** 2
    return weights or None


def fit_dataset(
    ds: Dataset,
    config: FitConfig = FitConfig(),
    standard: Optional[ReferenceStandard] = None,
    radii: Optional[RadiiTable] = None,
    basis: Optional[OrthogonalBasis] = None,
) -> BatchFitResult:
    """Fit every pattern in a dataset; one result or one named error each.

    A bad row never aborts the batch. Anomaly reports are best-effort: if
    the main fit succeeded but the anomaly sub-fit lacks points, the sample
    simply has no report.
    """
    if not ds.patterns:
        raise EmptyDataset(f"dataset {ds.dataset_id!r} has no patterns")
    if standard is None:
        standard = builtin_reference(config.standard)
    if radii is None:
        radii = canonical_radii()
    if basis is None:
        basis = build_basis(radii, config.degree_count)

    result = BatchFitResult([], [], [])
    for pattern in ds.patterns:
        try:
            npat = normalize(
                pattern,
                standard,
                radii,
                exclusions=config.exclusions,
                policy=config.nonpositive_policy,
            )
            weights = (
                _uncertainty_weights(pattern)
                if config.weights_policy == "inverse-variance"
                else None
            )
            result.lambda_sets.append(fit_lambdas(npat, basis, weights))
        except ReekitError as err:
            result.errors.append(SampleError(pattern.sample_id, err.code, str(err)))
            continue
        try:
            report = anomaly_factors(
                pattern,
                standard,
                radii,
                basis,
                policy=config.nonpositive_policy,
                extra_exclusions=config.exclusions,
            )
        except ReekitError:
            continue
        if report.factors:
            result.anomalies.append(report)
    return result


def lambda_table_csv(result: BatchFitResult, degree_count: int) -> str:
    """Render batch results in the fixed CSV contract.

    Columns: sample, lambda0..lambda{k-1}, rms_misfit, ce_anomaly,
    eu_anomaly, excluded. Floats use shortest round-trip formatting so the
    output is bit-stable across runs.
    """
    anomalies = {a.sample_id: a.factors for a in result.anomalies}
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["sample"]
        + [f"lambda{j}" for j in range(degree_count)]
        + ["rms_misfit", "ce_anomaly", "eu_anomaly", "excluded"]
    )
    for ls in result.lambda_sets:
        factors = anomalies.get(ls.sample_id, {})
        row = [ls.sample_id]
        row += [repr(v) for v in ls.lambdas]
        row.append(repr(ls.rms_misfit))
        row.append(repr(factors["Ce"]) if "Ce" in factors else "")
        row.append(repr(factors["Eu"]) if "Eu" in factors else "")
        row.append(";".join(sorted(ls.excluded)))
        writer.writerow(row)
    return buf.getvalue()
