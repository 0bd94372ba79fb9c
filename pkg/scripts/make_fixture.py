"""Generate the committed synthetic fixture dataset.

Thirty patterns across three mineral groups with distinct lambda
distributions, a few imposed Eu anomalies, and a couple of absent cells.
Deterministic (fixed seed); values rounded to 5 significant digits. Run
from the repo root:

    python3 scripts/make_fixture.py tests/fixtures/fixture_patterns.csv
"""

import sys
from pathlib import Path

import numpy as np

from reekit.domain import CANONICAL_ELEMENTS, builtin_reference, canonical_radii
from reekit.lambdas import build_basis

GROUPS = {
    "apatite": {"lam": (4.5, 0.12, -0.004, 0.0002), "spread": (0.6, 0.03, 0.001, 0.0001), "n": 12},
    "allanite": {"lam": (6.0, 0.20, -0.002, -0.0001), "spread": (0.5, 0.02, 0.0008, 0.00008), "n": 10},
    "monazite": {"lam": (7.5, 0.28, 0.001, 0.0003), "spread": (0.4, 0.025, 0.0012, 0.00012), "n": 8},
}

EU_ANOMALY_SAMPLES = {5: 0.45, 14: 0.6, 27: 0.3}  # row index -> Eu multiplier
ABSENT_CELLS = {(8, "Tm"), (21, "Ho")}  # (row index, element)


def main(out_path: str) -> None:
    rng = np.random.default_rng(20240313)
    basis = build_basis(canonical_radii(), 4)
    chondrite = builtin_reference("chondrite")
    ref = chondrite.as_array()

    rows = []
    idx = 0
    for mineral, spec in GROUPS.items():
        lam0 = np.array(spec["lam"])
        spread = np.array(spec["spread"])
        for _ in range(spec["n"]):
            lam = lam0 + rng.normal(0.0, spread)
            y = basis.design @ lam + rng.normal(0.0, 0.015, size=len(CANONICAL_ELEMENTS))
            conc = ref * np.exp(y)
            if idx in EU_ANOMALY_SAMPLES:
                conc[CANONICAL_ELEMENTS.index("Eu")] *= EU_ANOMALY_SAMPLES[idx]
            hole = f"NB{1 + idx % 4:02d}"
            cells = {}
            for e, c in zip(CANONICAL_ELEMENTS, conc):
                if (idx, e) in ABSENT_CELLS:
                    cells[e] = ""
                else:
                    cells[e] = f"{c:.5g}"
            rows.append((f"S{idx + 1:03d}", cells, mineral, hole))
            idx += 1

    lines = ["sample," + ",".join(CANONICAL_ELEMENTS) + ",mineralogy,hole_id"]
    for sample, cells, mineral, hole in rows:
        lines.append(
            sample + "," + ",".join(cells[e] for e in CANONICAL_ELEMENTS)
            + f",{mineral},{hole}"
        )
    Path(out_path).write_text("\n".join(lines) + "\n")
    print(f"wrote {len(rows)} rows to {out_path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/fixture_patterns.csv")
