"""Regenerate committed golden SVGs from the fixture dataset.

Run after any intentional rendering change, eyeball the output, and commit:

    python3 scripts/make_goldens.py
"""

from pathlib import Path

from reekit.domain import builtin_reference, canonical_radii
from reekit.ingestion import ImportOptions, parse_csv
from reekit.lambdas import FitConfig, fit_dataset
from reekit.viz import export_svg, spider_payload, splom_payload

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"


def main() -> None:
    data = (ROOT / "tests" / "fixtures" / "fixture_patterns.csv").read_bytes()
    dataset, _ = parse_csv(data, ImportOptions(source_name="fixture_patterns.csv"))
    chondrite = builtin_reference("chondrite")
    radii = canonical_radii()
    result = fit_dataset(dataset, FitConfig())
    categories = {ptn.sample_id: dict(ptn.categories) for ptn in dataset.patterns}

    GOLDEN.mkdir(parents=True, exist_ok=True)
    spider = spider_payload(dataset, chondrite, radii, color_by="mineralogy")
    (GOLDEN / "spider_fixture.svg").write_bytes(export_svg(spider))
    splom = splom_payload(result.lambda_sets, (0, 1, 2), "mineralogy", categories)
    (GOLDEN / "splom_fixture.svg").write_bytes(export_svg(splom))
    print(f"wrote goldens to {GOLDEN}")


if __name__ == "__main__":
    main()
