"""Agreement table of the four Lie ball membership tests.

For each n, points are drawn around the unit sphere of the eig_formula
gauge and every method's verdict is compared with eig_formula outside a
margin band.  Prints counts of inside points, points in the band, and
disagreements per method.
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from tubestab import domains as dm
from tubestab.suites import lie_ball_points


@dataclass(frozen=True)
class Config:
    n_values: tuple = (2, 3, 4, 5, 6)
    samples: int = 10_000
    band: float = 1e-6
    seed: int = 0


def run(cfg: Config) -> list[dict]:
    rows = []
    for n in cfg.n_values:
        z = lie_ball_points(n, cfg.samples, cfg.seed + n)
        ref = dm.lie_ball_margin(z, "eig_formula")
        keep = np.abs(ref) > cfg.band
        row = {"n": n, "inside": int((ref > 0).sum()), "in_band": int((~keep).sum())}
        for method in dm.LIE_METHODS[1:]:
            m = dm.lie_ball_margin(z, method)
            row[method] = int(np.sum((m > 0)[keep] != (ref > 0)[keep]))
        rows.append(row)
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description="Lie ball membership agreement")
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    cfg = Config(samples=a.samples, seed=a.seed)
    cols = ["n", "inside", "in_band"] + list(dm.LIE_METHODS[1:])
    print("  ".join(f"{c:>13}" for c in cols))
    for row in run(cfg):
        print("  ".join(f"{row[c]:>13}" for c in cols))
