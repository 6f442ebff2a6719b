"""Tolerances and run settings shared by the suites and the command line."""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass

VERSION = "0.1.0"
SEED_ENV = "TUBESTAB_SEED"


@dataclass(frozen=True)
class Tolerances:
    identity: float = 1e-12  # Clifford-type matrix identities
    det_factor: float = 1e-9  # det(I - X(zeta)) factorization, relative
    block_cayley: float = 1e-10
    pattern: float = 1e-9  # tube-27 pattern residual
    roundtrip: float = 1e-10
    pd_band: float = 1e-8  # PD verdicts inside this band are not compared
    lie_band: float = 1e-6
    chain: float = 1e-8  # Cayley proof chains, relative
    im_formula: float = 1e-10
    v_isometry: float = 1e-12
    bridge: float = 1e-6
    coefficients: float = 1e-9
    falsify: float = 1e-10
    polydisk_slack: float = 1e-9

    def to_json(self) -> dict:
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()


def default_seed(fallback: int = 0) -> int:
    """Seed from TUBESTAB_SEED when set, else ``fallback``."""
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return fallback
    return int(raw)
