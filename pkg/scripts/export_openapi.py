"""Write the service's OpenAPI schema to docs/openapi.json.

Re-run after changing routes:

    python3 scripts/export_openapi.py
"""

import json
import tempfile
from pathlib import Path

from reekit.service import create_app

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    app = create_app(tempfile.mkdtemp())
    schema = app.openapi()
    out = ROOT / "docs" / "openapi.json"
    out.parent.mkdir(exist_ok=True)
    out.write_text(json.dumps(schema, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out} ({len(schema['paths'])} paths)")


if __name__ == "__main__":
    main()
