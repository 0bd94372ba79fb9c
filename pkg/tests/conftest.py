import pathlib

import numpy as np
import pytest

from reekit.domain import builtin_reference, canonical_radii
from reekit.ingestion import ImportOptions, parse_csv
from reekit.lambdas import build_basis

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
GOLDEN = pathlib.Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def fixture_csv_bytes() -> bytes:
    return (FIXTURES / "fixture_patterns.csv").read_bytes()


@pytest.fixture(scope="session")
def fixture_dataset(fixture_csv_bytes):
    dataset, report = parse_csv(
        fixture_csv_bytes, ImportOptions(source_name="fixture_patterns.csv")
    )
    assert report.rows_accepted == 30
    return dataset


@pytest.fixture(scope="session")
def chondrite():
    return builtin_reference("chondrite")


@pytest.fixture(scope="session")
def radii():
    return canonical_radii()


@pytest.fixture(scope="session")
def basis4(radii):
    return build_basis(radii, 4)


def synthetic_pattern_concentrations(basis, standard, lam, rng=None, noise=0.0):
    """Forward-model concentrations from a lambda vector (optionally noisy)."""
    from reekit.domain import CANONICAL_ELEMENTS

    y = basis.design @ np.asarray(lam, dtype=float)
    if noise and rng is not None:
        y = y + rng.normal(0.0, noise, size=y.size)
    return {
        e: standard.values_ppm[e] * float(np.exp(y[i]))
        for i, e in enumerate(CANONICAL_ELEMENTS)
    }
