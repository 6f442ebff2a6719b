"""Membership predicates and seeded samplers for the bounded domains and tubes.

Every point is a flat coordinate vector (see :mod:`tubestab.cayley` for the
flattening of matrix variables).  Margins are certificates with a common
sign convention: positive inside, zero on the boundary, negative outside.
A point counts as a member when its margin exceeds ``MARGIN_TOL``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import cayley as cy
from . import numkernel as nk
from .errors import NotSkew, NotSymmetric, PatternViolation, PoleAtOne, SchemaError

MARGIN_TOL = 1e-9
MARGIN_FLOOR = 1e-3
NEAR_BAND = 0.05
CHUNK = 256
SYM_TOL = 1e-10
PATTERN_TOL = 1e-10
SCHEMA = "tubestab/1"

BOUNDED = ("PolyDisk", "LieBall", "MatrixBall", "SiegelBall", "SkewBall", "BoundedExceptional27")
TUBES = ("HalfPlaneTube", "LorentzTube", "MatrixUHP", "SiegelUHP", "SkewDomain", "ExceptionalTube27")
KINDS = BOUNDED + TUBES + ("LorentzCone", "CartanProduct")
LIE_METHODS = ("eig_formula", "M_matrix", "Q_contraction", "Ppm_pencil")


@dataclass(frozen=True)
class DomainSpec:
    """A domain by kind and parameters.

    Parameters: ``d`` for PolyDisk/HalfPlaneTube, ``n`` for the Lie ball and
    Lorentz cone/tube, ``l`` for MatrixUHP/MatrixBall, ``s`` for the Siegel
    kinds, ``dim`` (even) for the skew kinds, ``factors`` (a list of
    DomainSpec) for CartanProduct.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown domain kind {self.kind!r}")
        p = self.params
        if self.kind in ("SkewDomain", "SkewBall"):
            if p.get("dim", 0) < 2 or p["dim"] % 2:
                raise SchemaError("skew domains need an even dim >= 2")
        elif self.kind == "CartanProduct":
            if not p.get("factors"):
                raise SchemaError("CartanProduct needs factors")
        elif self.kind not in ("BoundedExceptional27", "ExceptionalTube27"):
            key = self._size_key()
            if int(p.get(key, 0)) < 1:
                raise SchemaError(f"{self.kind} needs {key} >= 1")
            if self.kind in ("LorentzCone", "LorentzTube") and p[key] < 2:
                raise SchemaError("Lorentz kinds need n >= 2")

    def _size_key(self) -> str:
        return {"PolyDisk": "d", "HalfPlaneTube": "d", "LieBall": "n", "LorentzCone": "n", "LorentzTube": "n",
                "MatrixUHP": "l", "MatrixBall": "l", "SiegelUHP": "s", "SiegelBall": "s"}[self.kind]

    @property
    def nvars(self) -> int:
        p = self.params
        k = self.kind
        if k in ("PolyDisk", "HalfPlaneTube"):
            return int(p["d"])
        if k in ("LieBall", "LorentzCone", "LorentzTube"):
            return int(p["n"])
        if k in ("MatrixUHP", "MatrixBall"):
            return int(p["l"]) ** 2
        if k in ("SiegelUHP", "SiegelBall"):
            s = int(p["s"])
            return s * (s + 1) // 2
        if k in ("SkewDomain", "SkewBall"):
            m = int(p["dim"])
            return m * (m - 1) // 2
        if k == "CartanProduct":
            return sum(f.nvars for f in self.factors)
        return 27

    @property
    def factors(self) -> list["DomainSpec"]:
        return [f if isinstance(f, DomainSpec) else DomainSpec.from_json(f) for f in self.params.get("factors", [])]

    @property
    def is_real(self) -> bool:
        return self.kind == "LorentzCone"

    def to_json(self) -> dict:
        params = dict(self.params)
        if self.kind == "CartanProduct":
            params["factors"] = [f.to_json() for f in self.factors]
        return {"schema": SCHEMA, "kind": self.kind, "params": params}

    @classmethod
    def from_json(cls, obj: dict) -> "DomainSpec":
        try:
            kind = obj["kind"]
            params = dict(obj.get("params", {}))
        except (KeyError, TypeError, AttributeError) as exc:
            raise SchemaError(f"malformed domain JSON: {exc}") from exc
        if kind == "CartanProduct":
            params["factors"] = tuple(cls.from_json(f) for f in params.get("factors", []))
        return cls(kind, params)


@dataclass(frozen=True)
class MembershipReport:
    inside: bool
    margin: float
    method: str
    boundary: bool = False
    details: dict = field(default_factory=dict)


def _report(margin: float, method: str, **details) -> MembershipReport:
    margin = float(margin)
    return MembershipReport(margin > MARGIN_TOL, margin, method, abs(margin) <= MARGIN_TOL, details)


def _max_eig(H) -> np.ndarray:
    return -nk.min_eig(-np.asarray(H))


# ---------------------------------------------------------------------------
# batched margins


def lorentz_cone_margin(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.minimum(x[..., 0], x[..., 0] ** 2 - np.sum(x[..., 1:] ** 2, axis=-1))


def lorentz_tube_margin(w) -> np.ndarray:
    return nk.min_eig(nk.im_part(cy.build_W(w)))


def lie_ball_value(z) -> np.ndarray:
    """s(z) = ||z||^2 + sqrt(||z||^4 - |sum z_j^2|^2); the ball is s < 1."""
    z = np.asarray(z, dtype=complex)
    n2 = np.sum(np.abs(z) ** 2, axis=-1)
    q = np.abs(np.sum(z ** 2, axis=-1)) ** 2
    return n2 + np.sqrt(np.maximum(n2 ** 2 - q, 0.0))


def lie_ball_margin(z, method: str = "eig_formula") -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if method == "eig_formula":
        return 1 - lie_ball_value(z)
    if method == "M_matrix":
        return 1 - _max_eig(cy.build_M(z))
    if method == "Q_contraction":
        return 1 - np.asarray(nk.op_norm(cy.build_Q(z)))
    if method == "Ppm_pencil":
        pp, pm = cy.build_Ppm(z)
        return nk.min_eig(nk.adjoint(pp) @ pp - nk.adjoint(pm) @ pm)
    raise ValueError(f"unknown Lie ball method {method!r}")


def skew_domain_margin(W) -> np.ndarray:
    W = np.asarray(W, dtype=complex)
    J = cy.J_matrix(W.shape[-1] // 2)
    return nk.min_eig(nk.im_part(J @ W))


def exceptional_bounded_margin(zeta) -> np.ndarray:
    return 1 - np.asarray(nk.op_norm(cy.build_X_zeta(zeta)))


def exceptional_tube_margin(w) -> np.ndarray:
    return nk.min_eig(nk.im_part(cy.tube27_matrix(w)))


def to_matrix(spec: DomainSpec, v) -> np.ndarray:
    """Matrix form of a point of a matrix-variable domain."""
    p = spec.params
    if spec.kind in ("MatrixUHP", "MatrixBall"):
        return cy.full_to_matrix(v, p["l"])
    if spec.kind in ("SiegelUHP", "SiegelBall"):
        return cy.sym_to_matrix(v, p["s"])
    if spec.kind in ("SkewDomain", "SkewBall"):
        return cy.skew_to_matrix(v, p["dim"])
    raise ValueError(f"{spec.kind} points are not matrices")


def from_matrix(spec: DomainSpec, M) -> np.ndarray:
    if spec.kind in ("MatrixUHP", "MatrixBall"):
        return cy.matrix_to_full(M)
    if spec.kind in ("SiegelUHP", "SiegelBall"):
        return cy.matrix_to_sym(M)
    if spec.kind in ("SkewDomain", "SkewBall"):
        return cy.matrix_to_skew(M)
    raise ValueError(f"{spec.kind} points are not matrices")


def split_product(spec: DomainSpec, pts) -> list[np.ndarray]:
    pts = np.asarray(pts)
    out, o = [], 0
    for f in spec.factors:
        out.append(pts[..., o:o + f.nvars])
        o += f.nvars
    return out


def margins(spec: DomainSpec, pts, method: str | None = None) -> np.ndarray:
    """Margins for a batch of points (last axis = coordinates)."""
    pts = np.asarray(pts)
    k = spec.kind
    if k == "PolyDisk":
        return 1 - np.max(np.abs(pts), axis=-1)
    if k == "HalfPlaneTube":
        return np.min(np.asarray(pts, dtype=complex).imag, axis=-1)
    if k == "LorentzCone":
        return lorentz_cone_margin(pts)
    if k == "LorentzTube":
        return lorentz_tube_margin(pts)
    if k == "LieBall":
        return lie_ball_margin(pts, method or "eig_formula")
    if k in ("MatrixUHP", "SiegelUHP"):
        return nk.min_eig(nk.im_part(to_matrix(spec, pts)))
    if k in ("MatrixBall", "SiegelBall", "SkewBall"):
        return 1 - np.asarray(nk.op_norm(to_matrix(spec, pts)))
    if k == "SkewDomain":
        return skew_domain_margin(to_matrix(spec, pts))
    if k == "BoundedExceptional27":
        return exceptional_bounded_margin(pts)
    if k == "ExceptionalTube27":
        return exceptional_tube_margin(pts)
    parts = [margins(f, x) for f, x in zip(spec.factors, split_product(spec, pts))]
    return np.min(np.stack(parts), axis=0)


def contains(spec: DomainSpec, pts, method: str | None = None) -> np.ndarray:
    return margins(spec, pts, method) > MARGIN_TOL


# ---------------------------------------------------------------------------
# single-point predicates


def in_lorentz_cone(x) -> MembershipReport:
    x = np.asarray(x, dtype=float)
    return _report(lorentz_cone_margin(x), "inequalities")


def in_lorentz_tube(w) -> MembershipReport:
    w = np.asarray(w, dtype=complex)
    m = lorentz_tube_margin(w)
    cone = in_lorentz_cone(w.imag)
    return _report(m, "W_matrix", cone_agrees=bool((m > MARGIN_TOL) == cone.inside))


def in_lie_ball(z, method: str = "eig_formula") -> MembershipReport:
    z = np.asarray(z, dtype=complex)
    if method not in LIE_METHODS:
        raise ValueError(f"unknown Lie ball method {method!r}")
    return _report(lie_ball_margin(z, method), method)


def in_matrix_uhp(Z, symmetric: bool = False, tol: float = SYM_TOL) -> MembershipReport:
    Z = nk.as_cmatrix(Z, square=True)
    if symmetric and np.max(np.abs(Z - Z.T), initial=0.0) > tol * max(1.0, float(np.max(np.abs(Z), initial=0.0))):
        raise NotSymmetric("Siegel points must be symmetric")
    return _report(nk.min_eig(nk.im_part(Z)), "im_part_pd")


def in_skew_domain(W, tol: float = SYM_TOL) -> MembershipReport:
    W = nk.as_cmatrix(W, square=True)
    if W.shape[0] % 2 or np.max(np.abs(W + W.T), initial=0.0) > tol * max(1.0, float(np.max(np.abs(W), initial=0.0))):
        raise NotSkew("expected an even-dimensional skew-symmetric matrix")
    return _report(skew_domain_margin(W), "im_JW_pd")


def in_exceptional(x, side: str = "bounded", pattern_tol: float = PATTERN_TOL) -> MembershipReport:
    """Bounded side: x is zeta in C^27.  Tube side: x is a 17x17 matrix or 27 coordinates."""
    x = np.asarray(x, dtype=complex)
    if side == "bounded":
        if abs(1 - x[0]) < cy.POLE_TOL:
            raise PoleAtOne("w_1 = 1")
        return _report(exceptional_bounded_margin(x), "X_norm")
    if side != "tube":
        raise ValueError("side must be 'bounded' or 'tube'")
    if x.ndim == 1:
        W = cy.tube27_matrix(x)
    else:
        W = x
        if W.shape != (17, 17):
            raise PatternViolation("tube side expects a 17x17 matrix")
        _, res = cy.read_tube27(W)
        if res > pattern_tol:
            raise PatternViolation(f"pattern residual {float(res):.3e}")
    return _report(nk.min_eig(nk.im_part(W)), "im_W_pd")


def member(spec: DomainSpec, pt, method: str | None = None) -> MembershipReport:
    m = margins(spec, np.asarray(pt)[None, :], method)[0]
    return _report(m, method or spec.kind)


# ---------------------------------------------------------------------------
# samplers


def _rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _cgauss(rng, shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def _targets(rng, m: int, where: str) -> np.ndarray:
    """Target margins: near the boundary in (0, 0.05], else in [floor, 1)."""
    u = rng.random(m)
    if where == "near_boundary":
        return NEAR_BAND * 10.0 ** (-3 * u)
    if where == "boundary":
        return np.zeros(m)
    if where == "interior":
        return MARGIN_FLOOR + (1 - 2 * MARGIN_FLOOR) * u
    raise ValueError(f"unknown sampling region {where!r}")


def _gauge(spec: DomainSpec, v) -> np.ndarray:
    """Degree-one gauge of a bounded symmetric domain (inside iff gauge < 1)."""
    k = spec.kind
    if k == "PolyDisk":
        return np.max(np.abs(v), axis=-1)
    if k == "LieBall":
        return np.sqrt(lie_ball_value(v))
    return np.asarray(nk.op_norm(to_matrix(spec, v)))


def _identity_shift(spec: DomainSpec, pts: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Move along the direction that adds s to the tube margin."""
    pts = pts.copy()
    k = spec.kind
    if k in ("HalfPlaneTube",):
        pts += 1j * s[:, None]
    elif k == "LorentzTube":
        pts[:, 0] += 1j * s
    elif k == "LorentzCone":
        pts[:, 0] += s
    elif k in ("MatrixUHP", "SiegelUHP"):
        M = to_matrix(spec, pts) + 1j * s[:, None, None] * np.eye(to_matrix(spec, pts[:1]).shape[-1])
        pts = from_matrix(spec, M)
    elif k == "SkewDomain":
        J = cy.J_matrix(spec.params["dim"] // 2)
        pts = from_matrix(spec, to_matrix(spec, pts) - 1j * s[:, None, None] * J)
    elif k == "ExceptionalTube27":
        pts[:, [0, 17, 26]] += 1j * s[:, None]
    return pts


def _sample_tube(spec: DomainSpec, rng, m: int, where: str) -> np.ndarray:
    if spec.kind == "LorentzCone":
        x = rng.normal(size=(m, spec.nvars))
        t = _targets(rng, m, where)
        if where == "interior":
            t = MARGIN_FLOOR + 10.0 ** rng.uniform(-2, 0, m)
        # x_1^2 - |x'|^2 = t and x_1 >= sqrt(t) >= t give margin exactly t
        x[:, 0] = np.sqrt(np.sum(x[:, 1:] ** 2, axis=1) + t)
        return x
    else:
        pts = _cgauss(rng, (m, spec.nvars))
    scale = 0.3 if spec.kind == "ExceptionalTube27" else 1.0
    pts = pts * scale
    t = _targets(rng, m, where)
    if where == "interior":
        t = MARGIN_FLOOR + 10.0 ** rng.uniform(-2, 1, m)
    base = margins(spec, pts)
    out = _identity_shift(spec, pts, t - base)
    # one corrective pass absorbs eigenvalue round-off in the shift
    return _identity_shift(spec, out, t - margins(spec, out))


def _sample_gauge(spec: DomainSpec, rng, m: int, where: str) -> np.ndarray:
    v = _cgauss(rng, (m, spec.nvars))
    g = _gauge(spec, v)
    t = _targets(rng, m, where)
    if spec.kind == "LieBall":
        r = np.sqrt(1 - t)
    else:
        r = 1 - t
    if where == "interior":
        dim = 2 * spec.nvars
        r = (1 - MARGIN_FLOOR) * rng.random(m) ** (1.0 / dim)
    return v * (r / g)[:, None]


def _exceptional_ray(rng, m: int, where: str) -> np.ndarray:
    """Points t * d on random rays, with t found by batched bisection.

    Near the boundary the bisection targets ||X|| = 1 - delta/2 for the drawn
    delta, so the margin lands in (0, delta].
    """
    d = _cgauss(rng, (m, 27))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    delta = _targets(rng, m, "near_boundary")
    fr = rng.random(m)
    level = 1 - delta / 2 if where == "near_boundary" else np.ones(m)

    def below(t):
        out = np.zeros(m, dtype=bool)
        ok = np.abs(1 - t * d[:, 0]) > 1e-6
        X = cy.build_X_zeta(t[ok, None] * d[ok])
        g = nk.adjoint(X) @ X
        idx = np.arange(17)
        g[:, idx, idx] -= (level[ok] ** 2)[:, None]
        out[ok] = nk.cholesky_pd(-g)
        return out

    lo = np.zeros(m)
    hi = np.full(m, 0.5)
    while True:
        grow = below(hi)
        if not grow.any():
            break
        lo[grow] = hi[grow]
        hi[grow] *= 2
    steps = 40 if where == "near_boundary" else 12
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        ins = below(mid)
        lo = np.where(ins, mid, lo)
        hi = np.where(ins, hi, mid)
    if where == "near_boundary":
        return lo[:, None] * d
    t = lo * fr
    for _ in range(30):
        low = ~nk.is_contraction(cy.build_X_zeta(t[:, None] * d), 1 - MARGIN_FLOOR)
        if not low.any():
            break
        t[low] *= 0.5
    return t[:, None] * d


def _sample_chunk(spec: DomainSpec, rng, m: int, where: str) -> np.ndarray:
    k = spec.kind
    if k in ("PolyDisk", "LieBall", "MatrixBall", "SiegelBall", "SkewBall"):
        return _sample_gauge(spec, rng, m, where)
    if k == "BoundedExceptional27":
        return _exceptional_ray(rng, m, where)
    if k == "CartanProduct":
        fs = spec.factors
        pick = rng.integers(len(fs), size=m)
        parts = []
        for j, f in enumerate(fs):
            inner = _sample_chunk(f, rng, m, "interior")
            if where != "interior":
                edge = _sample_chunk(f, rng, m, where)
                inner[pick == j] = edge[pick == j]
            parts.append(inner)
        return np.concatenate(parts, axis=-1)
    return _sample_tube(spec, rng, m, where)


def sample(spec: DomainSpec, count: int, seed: int = 0, where: str = "interior") -> np.ndarray:
    """Deterministic samples; the first m points do not depend on count.

    ``where``: "interior" (margin >= MARGIN_FLOOR), "near_boundary" (margin in
    (0, 0.05]) or "boundary" (margin 0; bounded gauge domains and tubes).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    chunks = []
    for c in range((count + CHUNK - 1) // CHUNK):
        rng = _rng(seed, c)
        chunks.append(_sample_chunk(spec, rng, CHUNK, where))
    return np.concatenate(chunks)[:count]


def sample_closed_polydisk(d: int, count: int, seed: int = 0, boundary_fraction: float = 0.25) -> np.ndarray:
    """Points of the closed polydisk, a fraction with every |z_j| = 1."""
    spec = DomainSpec("PolyDisk", {"d": d})
    inner = sample(spec, count, seed)
    rng = _rng(seed, 10 ** 6)
    nb = int(boundary_fraction * count)
    ang = rng.uniform(0, 2 * np.pi, (nb, d))
    inner[:nb] = np.exp(1j * ang)
    return inner
