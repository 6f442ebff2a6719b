"""tubestab: determinantal representations and stability checks on tube domains."""
from __future__ import annotations

from .config import VERSION as __version__
from .detrep import DetRep, verify_rep
from .domains import DomainSpec
from .mvpoly import MultiPoly
from .stability import StabilityReport, sampled_stability, strictness_estimate

__all__ = ["DetRep", "DomainSpec", "MultiPoly", "StabilityReport", "__version__", "sampled_stability",
           "strictness_estimate", "verify_rep"]
