"""Sampled stability tests, strictness estimates and line checks for tube stability.

Sampling can falsify stability (by exhibiting a zero inside the domain) but
never prove it; a ``no_zero_found`` verdict is evidence carrying its sample
count and the smallest |p| seen.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import cayley as cy
from . import domains as dm
from . import mvpoly as mv
from . import numkernel as nk
from . import rootfind as rf
from .errors import NormalizationFailure, WeightPole
from .mvpoly import MultiPoly

FALSIFY_TOL = 1e-10
FAR_RADII = (1.0, 10.0, 100.0, 1000.0)
N_PHASES = 720
REAL_TOL = 1e-9
NEWTON_STARTS = 16
NEWTON_STEPS = 60
EPS_TOL = 1e-9


@dataclass(frozen=True)
class StabilityReport:
    verdict: str  # "no_zero_found" | "falsified"
    witness: np.ndarray | None
    witness_abs: float | None
    witness_margin: float | None
    min_abs_over_samples: float
    samples_used: int
    seed: int
    domain: str

    @property
    def falsified(self) -> bool:
        return self.verdict == "falsified"

    def to_json(self) -> dict:
        from .serialization import vector_to_json

        return {
            "verdict": self.verdict,
            "witness": None if self.witness is None else vector_to_json(self.witness),
            "witness_abs": self.witness_abs,
            "witness_margin": self.witness_margin,
            "min_abs_over_samples": self.min_abs_over_samples,
            "samples_used": self.samples_used,
            "seed": self.seed,
            "domain": self.domain,
        }


def _grad(p: MultiPoly):
    return [p.derivative(j) for j in range(p.nvars)]


def newton_to_zero(p: MultiPoly, z0, steps: int = NEWTON_STEPS, grads=None) -> np.ndarray:
    """Minimum-norm Newton steps z <- z - p(z) conj(g) / |g|^2 from each start."""
    grads = _grad(p) if grads is None else grads
    z = np.array(z0, dtype=complex, copy=True)
    for _ in range(steps):
        val = mv.evaluate(p, z)
        g = np.stack([mv.evaluate(gj, z) for gj in grads], axis=-1)
        g2 = np.sum(np.abs(g) ** 2, axis=-1)
        ok = g2 > 1e-300
        step = np.zeros_like(z)
        step[ok] = (val[ok] / g2[ok])[:, None] * np.conj(g[ok])
        z = z - step
        if np.all(np.abs(step) <= 1e-15 * (1 + np.abs(z))):
            break
    return z


def _zero_test(p: MultiPoly, z, tol: float):
    val = np.abs(mv.evaluate(p, z))
    scale = np.maximum(mv.abs_scale(p, z), 1e-300)
    return val, val <= tol * scale


def sampled_stability(p: MultiPoly, spec: dm.DomainSpec, n_samples: int = 10_000, seed: int = 0,
                      falsify_tol: float = FALSIFY_TOL, near_fraction: float = 0.1,
                      witnesses: Sequence | None = None) -> StabilityReport:
    """Look for zeros of p in the domain: samples, then Newton refinement of the best ones.

    Previously found witnesses are re-checked first so a larger sample set
    never loses a falsification.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial vanishes everywhere")
    if witnesses is not None and len(witnesses):
        W = np.atleast_2d(np.asarray(witnesses, dtype=complex))
        val, hit = _zero_test(p, W, falsify_tol)
        marg = dm.margins(spec, W)
        good = hit & (marg > dm.MARGIN_TOL)
        if good.any():
            i = int(np.argmax(good))
            return StabilityReport("falsified", W[i], float(val[i]), float(marg[i]), float(val.min()), 0, seed, spec.kind)
    n_near = int(n_samples * near_fraction)
    pts = dm.sample(spec, n_samples - n_near, seed, "interior")
    if n_near:
        pts = np.concatenate([pts, dm.sample(spec, n_near, seed + 1, "near_boundary")])
    val, hit = _zero_test(p, pts, falsify_tol)
    min_abs = float(val.min())
    if hit.any():
        i = int(np.argmax(hit))
        return StabilityReport("falsified", pts[i], float(val[i]), float(dm.margins(spec, pts[i:i + 1])[0]),
                               min_abs, pts.shape[0], seed, spec.kind)
    rel = val / np.maximum(mv.abs_scale(p, pts), 1e-300)
    starts = pts[np.argsort(rel)[:NEWTON_STARTS]]
    z = newton_to_zero(p, starts)
    ok = np.all(np.isfinite(z), axis=1)
    z = z[ok]
    if z.shape[0]:
        val2, hit2 = _zero_test(p, z, falsify_tol)
        marg = dm.margins(spec, z)
        good = hit2 & (marg > dm.MARGIN_TOL)
        if good.any():
            i = int(np.argmax(good))
            return StabilityReport("falsified", z[i], float(val2[i]), float(marg[i]), min_abs, pts.shape[0], seed, spec.kind)
    return StabilityReport("no_zero_found", None, None, None, min_abs, pts.shape[0], seed, spec.kind)


# ---------------------------------------------------------------------------
# strictness


WEIGHT_KINDS = ("halfplane", "cartan", "skew", "lorentz", "lorentz2", "lorentzn", "none")
_ALIASES = {"lorentz2": "lorentz", "lorentzn": "lorentz"}


@dataclass(frozen=True)
class StrictnessEstimate:
    """epsilon_hat = min over samples of |p| / weight.

    A sampled minimum can only sit above the true infimum, so epsilon_hat is
    an upper bound for the best constant in the weighted lower bound.
    """

    epsilon_hat: float
    weight_kind: str
    exponents: tuple
    samples: int
    per_radius: dict = field(default_factory=dict)
    argmin: np.ndarray | None = None

    def to_json(self) -> dict:
        return {"epsilon_hat": self.epsilon_hat, "weight_kind": self.weight_kind, "exponents": list(self.exponents),
                "samples": self.samples, "per_radius": {str(k): v for k, v in self.per_radius.items()}}


def block_total_degrees(p: MultiPoly, sizes: Sequence[int]) -> list[int]:
    """Total degree of p in each consecutive block of variables."""
    out, o = [], 0
    for s in sizes:
        out.append(max((sum(e[o:o + s]) for e in p.terms), default=0))
        o += s
    return out


def weight(spec: dm.DomainSpec, kind: str, exponents: Sequence[int], z) -> np.ndarray:
    """The lower-bound weight at points z (batched)."""
    z = np.asarray(z, dtype=complex)
    kind = _ALIASES.get(kind, kind)
    if kind == "none":
        return np.ones(z.shape[:-1])
    if kind == "halfplane":
        return np.prod(np.abs(z + 1j) ** np.asarray(exponents), axis=-1)
    if kind == "cartan":
        factors = spec.factors if spec.kind == "CartanProduct" else [spec]
        parts = dm.split_product(spec, z) if spec.kind == "CartanProduct" else [z]
        out = np.ones(z.shape[:-1])
        for f, x, t in zip(factors, parts, exponents):
            M = dm.to_matrix(f, x)
            out = out * np.abs(nk.det(M + 1j * nk.eye_like(M))) ** t
        return out
    if kind == "skew":
        M = dm.to_matrix(spec, z)
        J = cy.J_matrix(M.shape[-1] // 2)
        return np.abs(nk.det(M - 1j * J)) ** exponents[0]
    if kind == "lorentz":
        u = cy.Phi_n_inv(z)
        base = (1 - u[..., 0]) ** 2 + np.sum(u[..., 1:] ** 2, axis=-1)
        return np.abs(base) ** (-float(exponents[0]))
    raise ValueError(f"unknown weight kind {kind!r}")


def default_exponents(p: MultiPoly, spec: dm.DomainSpec, kind: str) -> tuple:
    kind = _ALIASES.get(kind, kind)
    if kind == "halfplane":
        return tuple(p.multidegree())
    if kind == "cartan":
        factors = spec.factors if spec.kind == "CartanProduct" else [spec]
        return tuple(block_total_degrees(p, [f.nvars for f in factors]))
    if kind == "skew":
        return (max(p.degree, 0),)
    if kind == "lorentz":
        return (sum(p.multidegree()),)
    return ()


def strictness_at(p: MultiPoly, spec: dm.DomainSpec, kind: str, pts, exponents=None) -> np.ndarray:
    exponents = default_exponents(p, spec, kind) if exponents is None else tuple(exponents)
    w = weight(spec, kind, exponents, pts)
    if np.any(~np.isfinite(w)) or np.any(w <= 0):
        raise WeightPole("weight vanishes or is infinite at a sample")
    return np.abs(mv.evaluate(p, pts)) / w


def strictness_estimate(p: MultiPoly, spec: dm.DomainSpec, weight_kind: str = "halfplane", n_samples: int = 4000,
                        seed: int = 0, exponents=None, radii: Sequence[float] = FAR_RADII) -> StrictnessEstimate:
    """min |p| / weight over interior, near-boundary and scaled far-field samples."""
    exponents = default_exponents(p, spec, weight_kind) if exponents is None else tuple(exponents)
    if spec.kind in dm.BOUNDED:
        radii = (1.0,)  # scaling would leave a bounded domain
    base = dm.sample(spec, n_samples, seed, "interior")
    near = dm.sample(spec, max(n_samples // 4, 1), seed + 1, "near_boundary")
    per_radius = {}
    best, arg = np.inf, None
    for r in radii:
        for pts in (base * r, near * r):
            vals = strictness_at(p, spec, weight_kind, pts, exponents)
            i = int(np.argmin(vals))
            per_radius[r] = min(per_radius.get(r, np.inf), float(vals[i]))
            if vals[i] < best:
                best, arg = float(vals[i]), pts[i]
    total = (base.shape[0] + near.shape[0]) * len(radii)
    return StrictnessEstimate(best, weight_kind, exponents, total, per_radius, arg)


@dataclass(frozen=True)
class CayleyBridge:
    epsilon_tube: float
    disc_min: float
    predicted: float  # 2^{-sum n} * disc_min
    rel_err: float
    max_pointwise_rel_err: float

    def to_json(self) -> dict:
        return self.__dict__.copy()


def cayley_bridge(p: MultiPoly, degrees: Sequence[int] | None = None, n_samples: int = 2000, seed: int = 0) -> CayleyBridge:
    """Compare the half-plane strictness of p with the disc minimum of its Cayley transform.

    Disc samples u are transported to w = phi(u); at each pair
    |p(w)| / prod |w_j + i|^{n_j} = 2^{-sum n} |p~(u)|.
    """
    degrees = tuple(p.multidegree()) if degrees is None else tuple(degrees)
    d = p.nvars
    ptilde = mv.mobius_substitute(p, degrees, "disc_to_halfplane")
    spec = dm.DomainSpec("PolyDisk", {"d": d})
    u = np.concatenate([dm.sample(spec, n_samples, seed), dm.sample(spec, max(n_samples // 4, 1), seed + 1, "near_boundary")])
    w = cy.phi(u)
    tube = strictness_at(p, dm.DomainSpec("HalfPlaneTube", {"d": d}), "halfplane", w, degrees)
    disc = np.abs(mv.evaluate(ptilde, u))
    scale = 2.0 ** (-sum(degrees))
    pointwise = np.max(np.abs(tube - scale * disc) / np.maximum(scale * disc, 1e-300))
    eps_t, dmin = float(tube.min()), float(disc.min())
    pred = scale * dmin
    return CayleyBridge(eps_t, dmin, pred, abs(eps_t - pred) / max(pred, 1e-300), float(pointwise))


# ---------------------------------------------------------------------------
# equivalent strictness conditions on the half-plane tube


@dataclass(frozen=True)
class EquivalenceReport:
    weighted_bound: bool
    epsilon_hat: float
    disc_min_holds: bool
    disc_min: float
    extreme_monomial: bool
    extreme_coeff: complex
    unweighted_min_holds: bool
    unweighted_min: float
    agree: bool

    def to_json(self) -> dict:
        out = self.__dict__.copy()
        out["extreme_coeff"] = {"re": float(np.real(self.extreme_coeff)), "im": float(np.imag(self.extreme_coeff))}
        return out


def halfplane_equivalences(p: MultiPoly, degrees: Sequence[int] | None = None, n_samples: int = 2000, seed: int = 0,
                           tol: float = EPS_TOL) -> EquivalenceReport:
    """Sample-level versions of three equivalent strictness conditions on the half-plane tube.

    (i) |p| >= eps prod |z_j + i|^{n_j}; (ii) p~ has a positive minimum on the
    closed polydisk; (iii) the monomial prod z_j^{n_j} is present and |p| is
    bounded below on the tube.
    """
    degrees = tuple(p.multidegree()) if degrees is None else tuple(degrees)
    d = p.nvars
    scale = max(p.max_abs_coeff(), 1e-300)
    tube = dm.DomainSpec("HalfPlaneTube", {"d": d})
    est = strictness_estimate(p, tube, "halfplane", n_samples, seed, exponents=degrees)
    ptilde = mv.mobius_substitute(p, degrees, "disc_to_halfplane")
    u = dm.sample_closed_polydisk(d, n_samples, seed + 2)
    dmin = float(np.min(np.abs(mv.evaluate(ptilde, u))))
    coeff = p.coefficient(degrees)
    mono = abs(coeff) > 1e-12 * scale
    pts = np.concatenate([dm.sample(tube, n_samples, seed + 3), dm.sample(tube, n_samples // 4, seed + 4, "near_boundary")])
    umin = float(np.min(np.abs(mv.evaluate(p, pts))))
    c1 = est.epsilon_hat > tol * scale
    c2 = dmin > tol * scale
    c3u = umin > tol * scale
    c3 = mono and c3u
    return EquivalenceReport(c1, est.epsilon_hat, c2, dmin, mono, complex(coeff), c3u, umin, c1 == c2 == c3)


# ---------------------------------------------------------------------------
# line checks


def random_lines(d: int, cone: dm.DomainSpec, count: int, seed: int = 0):
    """count pairs (x, y) with x real Gaussian and y sampled from the cone."""
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(count, d))
    if cone.kind == "HalfPlaneTube":
        y = np.abs(rng.normal(size=(count, d))) + 0.05
    else:
        y = np.real(dm.sample(cone, count, seed)).astype(float)
    return x, y


@dataclass(frozen=True)
class LineReport:
    lines: int
    hurwitz_fail: int
    interlace_fail: int
    im_ratio_fail: int
    q_zero_lines: int
    consistent: bool
    first_failure: dict | None = None
    details: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.hurwitz_fail == 0 and self.interlace_fail == 0 and self.im_ratio_fail == 0

    def to_json(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "details"}
        out["passed"] = self.passed
        return out


def line_checks(p: MultiPoly, cone_samples, x_samples, t_density: int = 8, seed: int = 0,
                keep_details: bool = False) -> LineReport:
    """Per line x + t y: Hurwitz stability of p, interlacing of r and q, sign of Im(r/q)."""
    Y = np.atleast_2d(np.asarray(cone_samples, dtype=float))
    X = np.atleast_2d(np.asarray(x_samples, dtype=float))
    r, q = mv.real_imag_split(p)
    rng = np.random.default_rng(seed)
    hf = inf = imf = qz = 0
    consistent = True
    first = None
    details = []
    for x, y in zip(X, Y):
        lp = mv.line_restrict(p, x, y)
        hv = rf.is_hurwitz_stable(lp) if lp.degree > 0 else rf.HurwitzVerdict(not lp.is_zero(), float("-inf"), None, False)
        lr = mv.line_restrict(r, x, y)
        lq = mv.line_restrict(q, x, y)
        lr = mv.MultiPoly(1, {e: c.real for e, c in lr.terms.items()})
        lq = mv.MultiPoly(1, {e: c.real for e, c in lq.terms.items()})
        q_zero = lq.is_zero()
        if q_zero:
            qz += 1
            if lr.is_zero():
                iv = rf.InterlacingVerdict("fails", None, "p vanishes identically on the line")
            else:
                rr = rf.roots(lr) if lr.degree > 0 else None
                real = rr is None or bool(np.all(np.abs(rr.roots.imag) <= rf.REAL_BAND * np.maximum(1, np.abs(rr.roots))))
                iv = rf.InterlacingVerdict("weak" if real else "fails", None, "q vanishes on the line")
        elif lr.is_zero():
            iv = rf.InterlacingVerdict("weak", None, "r vanishes on the line")
        else:
            iv = rf.real_rooted_and_interlace(lr, lq)
        # Im(r/q) at interior points x + (t + i s) y
        t = rng.normal(size=t_density) * 2
        s = 10.0 ** rng.uniform(-1, 1, t_density)
        z = x[None, :] + (t + 1j * s)[:, None] * y[None, :]
        qv = mv.evaluate(q, z)
        rv = mv.evaluate(r, z)
        ok_q = np.abs(qv) > 1e-300
        im_ok = bool(np.all(np.imag(rv[ok_q] / qv[ok_q]) > 0)) if ok_q.any() else True
        if q_zero:
            im_ok = True
        hf += not hv.stable
        inf += not iv.passed
        imf += not im_ok
        if hv.stable and not (iv.passed and im_ok):
            consistent = False
        if first is None and not (hv.stable and iv.passed and im_ok):
            first = {"x": x.tolist(), "y": y.tolist(), "hurwitz": hv.stable, "witness_root": hv.witness,
                     "interlace": iv.verdict, "interlace_witness": iv.witness, "im_ratio_positive": im_ok}
        if keep_details:
            details.append({"hurwitz": hv.stable, "margin": hv.margin, "interlace": iv.verdict, "im_ratio": im_ok, "q_zero": q_zero})
    return LineReport(len(X), hf, inf, imf, qz, consistent, first, details)


@dataclass(frozen=True)
class Normalization:
    c: complex
    residual: float  # max |Im(c a_k)| / max |a_k|


def normalization_constant(pn: MultiPoly, tol: float = REAL_TOL) -> Normalization:
    """Unit c with c * p_n real: phase grid, then the closed-form optimum.

    For coefficients a_k the phase maximizing sum (Re e^{i t} a_k)^2 is
    t = -arg(sum a_k^2) / 2 (mod pi).
    """
    _, a = pn.exps_coeffs()
    if a.size == 0:
        return Normalization(1.0 + 0j, 0.0)
    amax = np.max(np.abs(a))
    th = 2 * np.pi * np.arange(N_PHASES) / N_PHASES
    score = np.sum(np.abs(np.real(np.exp(1j * th)[:, None] * a[None, :])), axis=1)
    t0 = th[int(np.argmax(score))]
    s = np.sum(a ** 2)
    if abs(s) > 1e-300:
        base = -np.angle(s) / 2
        cands = base + np.pi * np.arange(-3, 4) / 2
        t1 = cands[int(np.argmin(np.abs(np.angle(np.exp(1j * (cands - t0))))))]
    else:
        t1 = t0
    c = np.exp(1j * t1)
    res = float(np.max(np.abs(np.imag(c * a))) / amax)
    if res > tol:
        raise NormalizationFailure(f"no phase makes the initial form real (residual {res:.3e})")
    return Normalization(complex(c), res)


def _real_poly(p: MultiPoly) -> MultiPoly:
    return MultiPoly(p.nvars, {e: c.real for e, c in p.terms.items()})


@dataclass(frozen=True)
class HyperbolicityReport:
    c: complex
    normalization_residual: float
    lines: int
    failures: int
    first_failure: dict | None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        return {"c": {"re": self.c.real, "im": self.c.imag}, "normalization_residual": self.normalization_residual,
                "lines": self.lines, "failures": self.failures, "first_failure": self.first_failure, "passed": self.passed}


def initial_form_hyperbolicity(p: MultiPoly, cone_samples, x_samples) -> HyperbolicityReport:
    """Real-rootedness of c p_n(x + t y) for sampled x and cone directions y."""
    n = p.degree
    pn = mv.homogeneous_part(p, n)
    norm = normalization_constant(pn)
    cpn = _real_poly(pn.scale(norm.c))
    Y = np.atleast_2d(np.asarray(cone_samples, dtype=float))
    X = np.atleast_2d(np.asarray(x_samples, dtype=float))
    fails, first = 0, None
    for x, y in zip(X, Y):
        lp = _real_poly(mv.line_restrict(cpn, x, y))
        if lp.degree <= 0:
            ok = not lp.is_zero()
            bad = None
        else:
            rr = rf.roots(lp)
            badmask = np.abs(rr.roots.imag) > rf.REAL_BAND * np.maximum(1, np.abs(rr.roots))
            ok = not badmask.any()
            bad = complex(rr.roots[np.argmax(badmask)]) if not ok else None
        if not ok:
            fails += 1
            if first is None:
                first = {"x": x.tolist(), "y": y.tolist(), "nonreal_root": bad}
    return HyperbolicityReport(norm.c, norm.residual, len(X), fails, first)


@dataclass(frozen=True)
class PnQnReport:
    c: complex
    lines: int
    failures: int
    verdicts: dict
    first_failure: dict | None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        return {"c": {"re": self.c.real, "im": self.c.imag}, "lines": self.lines, "failures": self.failures,
                "verdicts": self.verdicts, "first_failure": self.first_failure, "passed": self.passed}


def pn_qn1_interlacing(p: MultiPoly, cone_samples, x_samples) -> PnQnReport:
    """Interlacing of p_n(x + t y) and q_{n-1}(x + t y) after normalizing p."""
    n = p.degree
    norm = normalization_constant(mv.homogeneous_part(p, n))
    cp = p.scale(norm.c)
    r, q = mv.real_imag_split(cp)
    pn = mv.homogeneous_part(r, n)
    qn1 = mv.homogeneous_part(q, n - 1) if n >= 1 else MultiPoly.zero(p.nvars)
    Y = np.atleast_2d(np.asarray(cone_samples, dtype=float))
    X = np.atleast_2d(np.asarray(x_samples, dtype=float))
    counts = {"strict": 0, "weak": 0, "fails": 0}
    first = None
    for x, y in zip(X, Y):
        a = _real_poly(mv.line_restrict(pn, x, y))
        b = _real_poly(mv.line_restrict(qn1, x, y))
        if a.is_zero():
            v = rf.InterlacingVerdict("fails", None, "p_n vanishes on the line")
        elif b.is_zero():
            v = rf.InterlacingVerdict("weak", None, "q_{n-1} vanishes on the line")
        else:
            v = rf.real_rooted_and_interlace(a, b)
        counts[v.verdict] += 1
        if v.verdict == "fails" and first is None:
            first = {"x": x.tolist(), "y": y.tolist(), "reason": v.reason, "witness": v.witness}
    return PnQnReport(norm.c, len(X), counts["fails"], counts, first)


# names used by the published operation list
prop_s3_equivalences = halfplane_equivalences
theorem1_line_checks = line_checks
