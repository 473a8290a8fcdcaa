#!/usr/bin/env python3
"""Record the competitive-ratio baselines for the bundled compare suite.

Run once per intentional behavior change; the acceptance suite then asserts
every future run reproduces these rows exactly.
"""
import json
from pathlib import Path

from linepack.suite import COMPARE_SUITE, compare_entry

OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "calibration.json"


def main() -> None:
    rows = [compare_entry(entry) for entry in COMPARE_SUITE]
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    print(f"wrote {len(rows)} baselines to {OUT}")
    for row in rows:
        print(f"  {row['name']:20s} alg={row['alg']:5d} "
              f"frac={row['frac_opt']:10.3f} ratio={row['ratio']}")


if __name__ == "__main__":
    main()
