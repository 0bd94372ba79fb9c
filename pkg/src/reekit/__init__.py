"""reekit: rare earth element pattern parameterisation and visualisation.

Turns REE concentration patterns into orthogonal-polynomial coefficients
(lambdas), computes exploration metrics, and builds payloads for six chart
kinds, behind a CLI and an HTTP service.
"""

from .domain import (
    BUILTIN_STANDARDS,
    CANONICAL_ELEMENTS,
    Dataset,
    EXTENDED_ELEMENTS,
    RadiiTable,
    ReePattern,
    ReferenceStandard,
    builtin_reference,
    canonical_radii,
)
from .lambdas import (
    AnomalyReport,
    FitConfig,
    LambdaSet,
    OrthogonalBasis,
    anomaly_factors,
    build_basis,
    fit_dataset,
    fit_lambdas,
    reconstruct,
)
from .normalization import NormalizedPattern, denormalize, normalize

__version__ = "0.1.0"

__all__ = [
    "AnomalyReport",
    "BUILTIN_STANDARDS",
    "CANONICAL_ELEMENTS",
    "Dataset",
    "EXTENDED_ELEMENTS",
    "FitConfig",
    "LambdaSet",
    "NormalizedPattern",
    "OrthogonalBasis",
    "RadiiTable",
    "ReePattern",
    "ReferenceStandard",
    "anomaly_factors",
    "build_basis",
    "builtin_reference",
    "canonical_radii",
    "denormalize",
    "fit_dataset",
    "fit_lambdas",
    "normalize",
    "reconstruct",
    "__version__",
]
