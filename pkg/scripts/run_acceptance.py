"""Run the acceptance suites and print one line per criterion.

    python3 scripts/run_acceptance.py [--seed 0] [--json out.json]
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass

from tubestab import suites as su


@dataclass(frozen=True)
class Config:
    seed: int = 0
    json_path: str | None = None


BUDGETS = {  # criterion -> (suite, seconds)
    1: ("clifford", 5),
    2: ("t27", 30),
    3: ("exceptional", 60),
    4: ("roundtrips", 30),
    5: ("lieball", 60),
    6: ("polydisk_reps", 120),
    7: ("lorentz_reps", 120),
    8: ("linechecks", 120),
    9: ("strictness", 60),
    10: ("interpolation", 30),
}


def main(cfg: Config) -> int:
    rows = []
    for number, (name, budget) in BUDGETS.items():
        t0 = time.perf_counter()
        (rep,) = su.run_suite(name, seed=cfg.seed)
        elapsed = time.perf_counter() - t0
        ok = rep.passed and elapsed < budget
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f} s of {budget} s) {name}", flush=True)
        for c in rep.checks:
            if not c.passed:
                print(f"    failed: {c.name} value={c.value} tol={c.tol} {c.note}")
        rows.append({"criterion": number, "suite": name, "passed": ok, "seconds": elapsed, "report": rep.to_json()})
    if cfg.json_path:
        with open(cfg.json_path, "w") as fh:
            json.dump(rows, fh, indent=1)
    return 0 if all(r["passed"] for r in rows) else 1


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", dest="json_path")
    a = ap.parse_args()
    sys.exit(main(Config(a.seed, a.json_path)))
