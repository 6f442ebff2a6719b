"""Sampling probe: do rotations zeta -> e^{i theta} zeta keep ||X(zeta)|| < 1?

A diagnostic, not a proof.  Interior points come from the bounded
exceptional sampler (interior and near-boundary), and the fraction that
stays inside is reported per angle together with the largest rotated
norm.  A fraction below 1 exhibits points that leave the domain; the
script also shrinks the worst point toward 0 to report a witness well
inside the domain whose rotation lies well outside it.
"""
from __future__ import annotations

import argparse
import json
from dataclasses import dataclass

import numpy as np

from tubestab import cayley as cy
from tubestab import domains as dm
from tubestab import numkernel as nk


@dataclass(frozen=True)
class Config:
    samples: int = 2000
    seed: int = 0
    near_fraction: float = 0.5


def run(cfg: Config) -> dict:
    spec = dm.DomainSpec("BoundedExceptional27")
    n_near = int(cfg.near_fraction * cfg.samples)
    pts = np.concatenate([
        dm.sample(spec, cfg.samples - n_near, cfg.seed),
        dm.sample(spec, max(n_near, 1), cfg.seed + 1, "near_boundary"),
    ])
    out = cy.rotational_invariance_probe(pts)
    out["samples"] = int(pts.shape[0])
    # a clear single witness: take the point whose rotations reach the largest
    # norm, then shrink it toward 0 while some rotation still leaves the domain
    thetas = np.linspace(0.1, np.pi, 30)
    worst = np.zeros(pts.shape[0])
    for t in thetas:
        worst = np.maximum(worst, np.asarray(nk.op_norm(cy.build_X_zeta(np.exp(1j * t) * pts))))
    base = pts[int(np.argmax(worst))]
    witness = None
    for s in np.linspace(1.0, 0.3, 71):
        z = s * base
        rot = [float(nk.op_norm(cy.build_X_zeta(np.exp(1j * t) * z))) for t in thetas]
        if max(rot) <= 1:
            break
        k = int(np.argmax(rot))
        witness = {"scale": float(s), "theta": float(thetas[k]), "norm_before": float(nk.op_norm(cy.build_X_zeta(z))),
                   "norm_after": rot[k], "zeta_re": z.real.tolist(), "zeta_im": z.imag.tolist()}
    out["witness"] = witness
    return out


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description="rotation probe for the bounded exceptional domain")
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    print(json.dumps(run(Config(a.samples, a.seed)), indent=1))
