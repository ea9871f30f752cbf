"""Rewrite the golden fixtures under src/conjoint/fixtures from conjoint.catalog."""
from pathlib import Path

from conjoint import catalog
from conjoint.scenario_io import write_scenario

OUT = Path(__file__).resolve().parent.parent / "src" / "conjoint" / "fixtures"

if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    for name in catalog.FIXTURE_NAMES:
        path = OUT / f"{name}.scenario"
        path.write_bytes(write_scenario(catalog.build(name)))
        print(path)
