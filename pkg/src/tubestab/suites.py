"""Identity suites: each check reports a measured error, its tolerance and a sample count."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import cayley as cy
from . import detrep as dr
from . import domains as dm
from . import mvpoly as mv
from . import numkernel as nk
from . import stability as st
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import UnknownSuite


@dataclass
class Check:
    name: str
    value: float | None
    tol: float | None
    passed: bool
    samples: int = 0
    note: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "value": self.value, "tol": self.tol, "passed": self.passed,
                "samples": self.samples, "note": self.note}


@dataclass
class SuiteReport:
    name: str
    seed: int
    checks: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add_le(self, name: str, value: float, tol: float, samples: int = 0, note: str = "") -> Check:
        c = Check(name, float(value), tol, bool(value <= tol), samples, note)
        self.checks.append(c)
        return c

    def add_flag(self, name: str, ok: bool, samples: int = 0, note: str = "", value: float | None = None) -> Check:
        c = Check(name, value, None, bool(ok), samples, note)
        self.checks.append(c)
        return c

    def to_json(self) -> dict:
        return {"schema": "tubestab/1", "suite": self.name, "seed": self.seed, "passed": self.passed,
                "wall_time": self.wall_time, "checks": [c.to_json() for c in self.checks]}


def _cgauss(rng, shape, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.normal(size=shape) + 1j * rng.normal(size=shape))


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


# ---------------------------------------------------------------------------
# exceptional building blocks


def suite_clifford(seed: int = 0, samples: int = 1000, tol: Tolerances = DEFAULT_TOLERANCES) -> SuiteReport:
    rep = SuiteReport("clifford", seed)
    T = cy.generators_T()
    eye8 = np.eye(8, dtype=np.int64)
    exact = [np.array_equal(T[k].T @ T[j] + T[j].T @ T[k], 2 * (j == k) * eye8) for j in range(8) for k in range(8)]
    rep.add_flag("T_k^T T_j + T_j^T T_k = 2 delta I (integer)", all(exact), len(exact),
                 note=f"{sum(exact)} of {len(exact)} relations exact")
    rng = np.random.default_rng(seed)
    w = _cgauss(rng, (samples, 8))
    Y = cy.build_Y(w)
    s = np.sum(w * w, axis=-1)[:, None, None] * np.eye(8)
    scale = np.maximum(np.abs(s[:, 0, 0]), 1.0)[:, None, None]
    e1 = np.max(np.abs(np.swapaxes(Y, -1, -2) @ Y - s) / scale)
    e2 = np.max(np.abs(Y @ np.swapaxes(Y, -1, -2) - s) / scale)
    rep.add_le("Y^T Y = (sum w^2) I", e1, tol.identity, samples)
    rep.add_le("Y Y^T = (sum w^2) I", e2, tol.identity, samples)
    y = _cgauss(rng, (samples, 8))
    lhs = np.einsum("bij,bj->bi", Y, y)
    rhs = np.einsum("ij,bjk,bk->bi", T[0], cy.build_Y(y), w)
    sc = np.maximum(np.linalg.norm(w, axis=-1) * np.linalg.norm(y, axis=-1), 1.0)[:, None]
    rep.add_le("Y(z) y = T_1 Y(y) z", np.max(np.abs(lhs - rhs) / sc), tol.identity, samples)
    # diagonal switch: [[a, x^T],[x, b I]] > 0 iff [[b, x^T],[x, a I]] > 0
    nsw = 0
    agree = 0
    for n in (1, 3, 8):
        m = samples // 3
        a = rng.uniform(-0.5, 2, m)
        b = rng.uniform(-0.5, 2, m)
        x = rng.normal(size=(m, n))
        A = np.zeros((m, n + 1, n + 1))
        B = np.zeros((m, n + 1, n + 1))
        A[:, 0, 0], B[:, 0, 0] = a, b
        A[:, 0, 1:] = A[:, 1:, 0] = x
        B[:, 0, 1:] = B[:, 1:, 0] = x
        A[:, 1:, 1:] = b[:, None, None] * np.eye(n)
        B[:, 1:, 1:] = a[:, None, None] * np.eye(n)
        ea, eb = nk.min_eig(A), nk.min_eig(B)
        keep = (np.abs(ea) > tol.pd_band) & (np.abs(eb) > tol.pd_band)
        nsw += int(keep.sum())
        agree += int(np.sum((ea > 0)[keep] == (eb > 0)[keep]))
    rep.add_flag("diagonal switch preserves PD", agree == nsw, nsw, note=f"{agree}/{nsw} verdicts agree")
    return rep


def t27_parameters(rng, samples: int) -> np.ndarray:
    """Real 27-parameter samples: unit diagonal plus Gaussian off-diagonal data of mixed sizes."""
    y = rng.normal(size=(samples, 27)) * rng.choice([0.1, 0.2, 0.3], size=(samples, 1))
    y[:, [0, 17, 26]] += 1.0
    return y


def suite_t27(seed: int = 0, samples: int = 1000, tol: Tolerances = DEFAULT_TOLERANCES) -> SuiteReport:
    rep = SuiteReport("t27", seed)
    rng = np.random.default_rng(seed)
    y = t27_parameters(rng, samples)
    forms = cy.build_Omega(y)
    v = [nk.min_eig(f) for f in forms]
    keep = np.min(np.abs(v), axis=0) > tol.pd_band
    pd = [(vi > 0)[keep] for vi in v]
    agree12 = int(np.sum(pd[0] == pd[1]))
    agree13 = int(np.sum(pd[0] == pd[2]))
    n = int(keep.sum())
    rep.add_flag("form 1 vs form 2 PD verdicts", agree12 == n, n, note=f"{agree12}/{n}; {int(pd[0].sum())} PD")
    rep.add_flag("form 1 vs form 3 PD verdicts", agree13 == n, n, note=f"{agree13}/{n}")
    # Schur step: y33 > 0 and the 9x9 complement of the y33 I_8 block PD iff the 17x17 matrix PD
    M = np.real(forms[0])
    y33 = M[:, 16, 16]
    pos = y33 > tol.pd_band
    comp_eig = nk.min_eig(nk.schur_complement(M[pos], slice(9, 17)))
    sc = (v[0] > 0)[pos]
    keep2 = keep[pos] & (np.abs(comp_eig) > tol.pd_band)
    rep.add_flag("Schur complement criterion", bool(np.array_equal((comp_eig > 0)[keep2], sc[keep2])), int(keep2.sum()))
    return rep


def suite_exceptional(seed: int = 0, samples: int = 1000, tol: Tolerances = DEFAULT_TOLERANCES) -> SuiteReport:
    rep = SuiteReport("exceptional", seed)
    rng = np.random.default_rng(seed)
    zeta = _cgauss(rng, (samples, 27), 0.2)
    w1, x, y, w2, z, w3 = cy.zeta_split(zeta)
    lhs = nk.det(np.eye(17) - cy.build_X_zeta(zeta))
    rhs = (1 - w1) * ((1 - w2) * (1 - w3) - np.sum(z * z, axis=-1)) ** 8
    rep.add_le("det(I - X) factorization", _rel(lhs, rhs), tol.det_factor, samples)
    # closed-form Cayley transform of the 2x2 block matrix
    w = _cgauss(rng, samples, 0.3)
    psi = _cgauss(rng, (samples, 16), 0.2)
    Z = nk.random_contraction(16, 0.8, rng, size=samples)
    X = cy.assemble_block_X(w, psi, Z)
    direct = nk.matrix_cayley(X)
    closed = cy.block_cayley_2x2(w, psi, Z)
    err = np.max(np.abs(direct - closed) / np.maximum(np.max(np.abs(direct), axis=(-2, -1)), 1.0)[:, None, None])
    rep.add_le("block Cayley closed form", err, tol.block_cayley, samples)
    # phi maps the bounded domain into the tube-27 pattern
    spec = dm.DomainSpec("BoundedExceptional27")
    zi = dm.sample(spec, samples, seed)
    W = nk.matrix_cayley(cy.build_X_zeta(zi))
    wv, res = cy.read_tube27(W)
    rep.add_le("phi(X(zeta)) pattern residual", float(np.max(res)), tol.pattern, samples)
    marg = dm.exceptional_tube_margin(wv)
    rep.add_flag("phi(X(zeta)) in tube", bool(np.all(marg > dm.MARGIN_TOL)), samples, value=float(np.min(marg)))
    zb, _ = cy.eta(wv)
    rep.add_le("eta(phi(X(zeta))) = zeta", float(np.max(np.abs(zb - zi))), tol.roundtrip * 100, samples,
               note="inverse map through zeta_from_X")
    return rep


# ---------------------------------------------------------------------------
# round trips


def suite_roundtrips(seed: int = 0, samples: int = 1000, tol: Tolerances = DEFAULT_TOLERANCES) -> SuiteReport:
    rep = SuiteReport("roundtrips", seed)
    rng = np.random.default_rng(seed)
    u = dm.sample(dm.DomainSpec("PolyDisk", {"d": 1}), samples, seed)[:, 0]
    rep.add_le("phi_inv(phi(z)) = z", float(np.max(np.abs(cy.phi_inv(cy.phi(u)) - u))), tol.roundtrip, samples)
    wv = dm.sample(dm.DomainSpec("HalfPlaneTube", {"d": 1}), samples, seed)[:, 0]
    rep.add_le("phi(phi_inv(w)) = w", _rel(cy.phi(cy.phi_inv(wv)), wv), tol.roundtrip, samples)
    # skew domain map
    for n in (1, 2, 3):
        Zs = dm.sample(dm.DomainSpec("SkewBall", {"dim": 2 * n}), samples, seed + n)
        Zm = cy.skew_to_matrix(Zs, 2 * n)
        back = cy.psi_inv(cy.psi(Zm))
        rep.add_le(f"psi_inv(psi(Z)) = Z, 2n = {2 * n}", float(np.max(np.abs(back - Zm))), tol.roundtrip, samples)
    # two-variable pencil link
    z2 = dm.sample(dm.DomainSpec("LieBall", {"n": 2}), samples, seed)
    w1, w2, err = cy.Phi_2_pencil_link(z2[:, 0], z2[:, 1])
    rep.add_le("Phi_2 pencil link", float(np.max(err)), tol.roundtrip, samples)
    for n in range(2, 7):
        zn = dm.sample(dm.DomainSpec("LieBall", {"n": n}), samples, seed + n)
        wn = cy.Phi_n(zn)
        rep.add_le(f"Phi_n_inv(Phi_n(z)) = z, n = {n}", float(np.max(np.abs(cy.Phi_n_inv(wn) - zn))), tol.roundtrip, samples)
        rep.add_le(f"Jordan-form Cayley = Phi_n, n = {n}", _rel(cy.Phi_n_jordan(zn), wn), tol.roundtrip, samples)
        inside = dm.lorentz_tube_margin(wn)
        rep.add_flag(f"Phi_n maps the Lie ball into the Lorentz tube, n = {n}", bool(np.all(inside > 0)), samples,
                     value=float(np.min(inside)))
    for m in (2, 5, 8):
        X = nk.random_contraction(m, 0.95, rng, size=samples)
        back = nk.matrix_cayley_inv(nk.matrix_cayley(X))
        rep.add_le(f"matrix Cayley round trip, {m}x{m}", float(np.max(np.abs(back - X))), tol.roundtrip, samples)
    f = np.eye(4, dtype=np.int64)
    left = cy.jordan_mul(cy.jordan_mul(f[2], f[1]), f[1])
    right = cy.jordan_mul(f[2], cy.jordan_mul(f[1], f[1]))
    ok = np.array_equal(left, np.zeros(4)) and np.array_equal(right, f[2])
    rep.add_flag("(f3 f2) f2 = 0 and f3 (f2 f2) = f3", ok, 1, note=f"left={np.real(left).tolist()} right={np.real(right).tolist()}")
    return rep


# ---------------------------------------------------------------------------
# Lie ball


def lie_ball_points(n: int, count: int, seed: int) -> np.ndarray:
    """Ball samples radially rescaled by factors in [0.6, 1.4], so both sides of the boundary appear."""
    z = dm.sample(dm.DomainSpec("LieBall", {"n": n}), count, seed)
    r = np.random.default_rng([seed, n]).uniform(0.6, 1.4, count)
    return z * r[:, None]


def suite_lieball(seed: int = 0, samples: int = 10_000, tol: Tolerances = DEFAULT_TOLERANCES) -> SuiteReport:
    rep = SuiteReport("lieball", seed)
    for n in range(2, 7):
        z = lie_ball_points(n, samples, seed + n)
        ref = dm.lie_ball_margin(z, "eig_formula")
        keep = np.abs(ref) > tol.lie_band
        for method in dm.LIE_METHODS[1:]:
            m = dm.lie_ball_margin(z, method)
            agree = int(np.sum((m > 0)[keep] == (ref > 0)[keep]))
            rep.add_flag(f"n = {n}: {method} agrees with eig_formula", agree == keep.sum(), int(keep.sum()),
                         note=f"{agree}/{int(keep.sum())}; {int(np.sum(ref > 0))} inside")
        if n == 2:
            pn = np.asarray(nk.op_norm(cy.build_P2(z)))
            agree = int(np.sum((pn < 1)[keep] == (ref > 0)[keep]))
            rep.add_flag("n = 2: ||P(z1, z2)|| < 1 agrees", agree == keep.sum(), int(keep.sum()))
    return rep


# ---------------------------------------------------------------------------
# representations and chains


def random_multiplicities(rng, total_max: int, d_max: int = 4) -> list[int]:
    d = int(rng.integers(1, d_max + 1))
    total = int(rng.integers(d, max(d, total_max) + 1))
    cuts = np.sort(rng.choice(np.arange(1, total), size=d - 1, replace=False)) if d > 1 else np.array([], dtype=int)
    return np.diff(np.concatenate([[0], cuts, [total]])).astype(int).tolist()


def suite_proofchains(seed: int = 0, samples: int = 1000, cases: int = 5, tol: Tolerances = DEFAULT_TOLERANCES) -> SuiteReport:
    rep = SuiteReport("proofchains", seed)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for c in range(cases):
        N = random_multiplicities(rng, 8)
        K = nk.random_contraction(sum(N), 0.9, rng)
        w = dm.sample(dm.DomainSpec("HalfPlaneTube", {"d": len(N)}), samples, seed + c)
        worst = max(worst, dr.chain_halfplane(K, N, w))
    rep.add_le("half-plane chain", worst, tol.chain, samples * cases)
    worst = 0.0
    for k in (1, 2, 3):
        K = nk.random_contraction(2 * k, 0.9, rng)
        w = dm.sample(dm.DomainSpec("LorentzTube", {"n": 2}), samples, seed + k)
        worst = max(worst, dr.chain_lorentz2(K, w))
    rep.add_le("two-variable Lorentz chain", worst, tol.chain, samples * 3)
    worst = {"first": 0.0, "second": 0.0, "total": 0.0}
    for n in (2, 3, 4, 5):
        for k in (1, 2):
            K = lorentz_test_contraction(rng, n * k, m=int(rng.integers(0, 2)))
            w = dm.sample(dm.DomainSpec("LorentzTube", {"n": n}), samples, seed + 10 * n + k)
            r = dr.chain_lorentzn(K, n, w)
            worst = {key: max(worst[key], r[key]) for key in worst}
    for key in ("first", "second", "total"):
        rep.add_le(f"n-variable Lorentz chain ({key})", worst[key], tol.chain, samples * 8)
    worst = 0.0
    for n, N in ((1, 1), (2, 1), (1, 2), (3, 1)):
        K = nk.random_contraction(2 * n * N, 0.9, rng)
        W = dm.sample(dm.DomainSpec("SkewDomain", {"dim": 2 * n}), samples // 4, seed + n + N)
        worst = max(worst, dr.chain_skew(K, n, N, W))
    rep.add_le("skew-domain chain", worst, tol.chain, samples)
    K = nk.random_contraction(2 * 1 + 2 * 2, 0.9, rng)
    spec = dm.DomainSpec("CartanProduct", {"factors": [dm.DomainSpec("MatrixUHP", {"l": 2}), dm.DomainSpec("SiegelUHP", {"s": 2})]})
    w = dm.sample(spec, samples // 4, seed)
    rep.add_le("Cartan block chain", dr.chain_cartan(K, [2], [2], [1], [2], w), tol.chain, samples // 4)
    return rep


def lorentz_test_contraction(rng, size: int, m: int = 0, norm: float = 0.9) -> np.ndarray:
    """U (I_m (+) Kt) U* with a random unitary U and a strict contraction Kt."""
    U = nk.random_unitary(size, rng)
    B = np.zeros((size, size), dtype=complex)
    B[:m, :m] = np.eye(m)
    if size > m:
        B[m:, m:] = nk.random_contraction(size - m, norm, rng)
    return U @ B @ nk.adjoint(U)


def _nonvanishing_ratio(M: np.ndarray) -> np.ndarray:
    """|det M| / prod of row norms (Hadamard ratio, 1 for orthogonal rows, 0 for singular M)."""
    rows = np.prod(np.linalg.norm(M, axis=-1), axis=-1)
    return np.abs(nk.det(M)) / np.maximum(rows, 1e-300)


HADAMARD_FLOOR = 1e-12


def suite_polydisk_reps(seed: int = 0, cases: int = 200, samples: int = 10_000, chain_samples: int = 1000,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> SuiteReport:
    """Contraction forms on the polydisk and their Cayley-pushed half-plane pencils."""
    rep = SuiteReport("polydisk_reps", seed)
    rng = np.random.default_rng(seed)
    worst_lb, worst_im, worst_chain = np.inf, 0.0, 0.0
    min_imeig = np.inf
    for c in range(cases):
        N = random_multiplicities(rng, 12)
        size = sum(N)
        K = nk.random_contraction(size, rng.uniform(0.3, 0.9), rng)
        d = len(N)
        u = dm.sample_closed_polydisk(d, samples, seed + c)
        smap = cy.StructureMap("DiagonalZN", {"N": N})
        vals = np.abs(nk.det(np.eye(size) - K @ cy.apply_structure(smap, u)))
        worst_lb = min(worst_lb, float(np.min(vals) / 0.1 ** size))
        pushed = dr.cayley_push_halfplane(K, N)
        worst_im = max(worst_im, pushed.metadata["im_A0_formula_err"])
        min_imeig = min(min_imeig, pushed.metadata["im_A0_min_eig"])
        w = dm.sample(dm.DomainSpec("HalfPlaneTube", {"d": d}), chain_samples, seed + c)
        worst_chain = max(worst_chain, dr.chain_halfplane(K, N, w))
    rep.add_flag("|det(I - K Z_N)| >= 0.1^|N| on the closed polydisk", worst_lb >= 1 - tol.polydisk_slack,
                 cases * samples, value=worst_lb, note="value = min |det| / 0.1^|N|")
    rep.add_flag("Im A0 positive definite", min_imeig > 0, cases, value=min_imeig)
    rep.add_le("Im A0 direct vs factored", worst_im, tol.im_formula, cases)
    rep.add_le("half-plane chain", worst_chain, tol.chain, cases * chain_samples)
    return rep


def suite_lorentz_reps(seed: int = 0, chain_samples: int = 1000, lorentz_samples: int = 10_000,
                       tol: Tolerances = DEFAULT_TOLERANCES) -> SuiteReport:
    """Two-variable and n-variable Lorentz pencils, the eigenvalue-1 split and the chains."""
    rep = SuiteReport("lorentz_reps", seed)
    rng = np.random.default_rng(seed)
    floor2 = np.inf
    w2 = dm.sample(dm.DomainSpec("LorentzTube", {"n": 2}), lorentz_samples, seed)
    chain2 = 0.0
    for k in (1, 2, 3):
        K = nk.random_contraction(2 * k, 0.9, rng)
        r2 = dr.lorentz2_rep_from_contraction(K)
        floor2 = min(floor2, float(np.min(_nonvanishing_ratio(r2.matrix(w2)))))
        chain2 = max(chain2, dr.chain_lorentz2(K, w2[:chain_samples]))
    rep.add_flag("two-variable Lorentz pencils nonvanishing", floor2 > HADAMARD_FLOOR, 3 * lorentz_samples,
                 value=floor2, note="value = min Hadamard ratio")
    rep.add_le("two-variable Lorentz chain", chain2, tol.chain, 3 * chain_samples)
    floorn, v_err, chain_n = np.inf, 0.0, 0.0
    split_ok, split_err = True, 0.0
    count = 0
    for n in (2, 3, 4, 5):
        wn = dm.sample(dm.DomainSpec("LorentzTube", {"n": n}), lorentz_samples, seed + n)
        for k in (1, 2, 3):
            m = int(rng.integers(0, min(n * k, 3) + 1))
            K = lorentz_test_contraction(rng, n * k, m)
            rn = dr.lorentzn_rep_from_contraction(K, n, k)
            if rn.size:
                floorn = min(floorn, float(np.min(_nonvanishing_ratio(rn.matrix(wn)))))
            v_err = max(v_err, rn.metadata["V_orth_err"])
            split_ok &= rn.metadata["eig1_dim"] == m
            U1, V, Kt = dr.split_eigenvalue_one(K)
            recon = U1 @ nk.adjoint(U1) + V @ Kt @ nk.adjoint(V)
            split_err = max(split_err, float(np.max(np.abs(recon - K))))
            chain_n = max(chain_n, dr.chain_lorentzn(K, n, wn[:chain_samples])["total"])
            count += 1
    rep.add_flag("n-variable Lorentz pencils nonvanishing", floorn > HADAMARD_FLOOR, count * lorentz_samples,
                 value=floorn, note="value = min Hadamard ratio")
    rep.add_le("V* V = I", v_err, tol.v_isometry, count)
    # block-diagonal cases with U = I: the split must find the identity block exactly
    exact = True
    for m, size in ((1, 3), (2, 4), (3, 6), (0, 4), (4, 4)):
        B = np.zeros((size, size), dtype=complex)
        B[:m, :m] = np.eye(m)
        Kt = nk.random_contraction(size - m, 0.8, rng) if size > m else np.zeros((0, 0))
        B[m:, m:] = Kt
        U1, V, Kt2 = dr.split_eigenvalue_one(B)
        P1 = U1 @ nk.adjoint(U1)
        target = np.zeros((size, size))
        target[:m, :m] = np.eye(m)
        exact &= U1.shape[1] == m and np.max(np.abs(P1 - target), initial=0.0) <= 1e-15 * size
        if size > m:
            ev_a = np.sort_complex(np.linalg.eigvals(Kt))
            ev_b = np.sort_complex(np.linalg.eigvals(Kt2))
            exact &= np.max(np.abs(ev_a - ev_b)) <= 1e-12
    rep.add_flag("eigenvalue-1 split on block-diagonal cases", exact, 5)
    rep.add_flag("eigenvalue-1 dimension recovered", split_ok, count)
    rep.add_le("split reconstruction U1 U1* + V Kt V* = K", split_err, tol.v_isometry, count)
    rep.add_le("n-variable Lorentz chain", chain_n, tol.chain, count * chain_samples)
    return rep



# ---------------------------------------------------------------------------
# stability-level suites


def generated_halfplane_poly(rng, d: int, N=None, norm: float = 0.9):
    """A half-plane-stable p pulled back from a strict polydisk polynomial det(I - K Z_N)."""
    N = [1] * d if N is None else list(N)
    K = nk.random_contraction(sum(N), norm, rng)
    ptilde, _ = dr.polydisk_rep_from_contraction(K, N)
    return mv.mobius_substitute(ptilde, N, "halfplane_to_disc"), ptilde, K


def planted_zero(p: mv.MultiPoly, z0) -> mv.MultiPoly:
    """p - p(z0): same top-degree part, with a zero at z0."""
    return p - mv.MultiPoly.constant(p.nvars, complex(mv.evaluate(p, np.asarray(z0))))


def suite_linechecks(seed: int = 0, polys: int = 100, lines: int = 100, controls: int = 10,
                   control_samples: int = 2000, tol: Tolerances = DEFAULT_TOLERANCES) -> SuiteReport:
    rep = SuiteReport("linechecks", seed)
    rng = np.random.default_rng(seed)
    fails = {"hurwitz": 0, "interlace": 0, "im_ratio": 0, "hyperbolic": 0, "pn_qn1": 0}
    consistent = True
    generated = []
    for i in range(polys):
        d = 2 + i % 3
        p, _, _ = generated_halfplane_poly(rng, d)
        generated.append(p)
        H = dm.DomainSpec("HalfPlaneTube", {"d": d})
        X, Y = st.random_lines(d, H, lines, seed + i)
        L = st.line_checks(p, Y, X, seed=seed + i)
        fails["hurwitz"] += L.hurwitz_fail
        fails["interlace"] += L.interlace_fail
        fails["im_ratio"] += L.im_ratio_fail
        consistent &= L.consistent
        fails["hyperbolic"] += st.initial_form_hyperbolicity(p, Y, X).failures
        fails["pn_qn1"] += st.pn_qn1_interlacing(p, Y, X).failures
    total = polys * lines
    rep.add_flag("fibered Hurwitz stability", fails["hurwitz"] == 0, total, note=f"{fails['hurwitz']} failing lines")
    rep.add_flag("r/q real-rooted and interlacing", fails["interlace"] == 0, total, note=f"{fails['interlace']} failing lines")
    rep.add_flag("Im(r/q) > 0", fails["im_ratio"] == 0, total, note=f"{fails['im_ratio']} failing lines")
    rep.add_flag("initial form hyperbolic along cone directions", fails["hyperbolic"] == 0, total)
    rep.add_flag("p_n / q_(n-1) interlacing", fails["pn_qn1"] == 0, total, note=f"{fails['pn_qn1']} failing lines")
    rep.add_flag("line checks consistent", consistent, total)
    # planted zeros
    caught, line_caught = 0, 0
    for c in range(controls):
        p = generated[c % len(generated)]
        d = p.nvars
        H = dm.DomainSpec("HalfPlaneTube", {"d": d})
        z0 = dm.sample(H, 1, seed + 1000 + c)[0]
        bad = planted_zero(p, z0)
        r = st.sampled_stability(bad, H, control_samples, seed + c)
        caught += r.falsified and r.witness_margin is not None and r.witness_margin > 0
        L = st.line_checks(bad, np.imag(z0)[None, :], np.real(z0)[None, :], seed=c)
        line_caught += L.hurwitz_fail
    rep.add_flag("planted zeros falsified with a witness", caught == controls, controls, note=f"{caught}/{controls}")
    rep.add_flag("line through a planted zero fails Hurwitz", line_caught == controls, controls)
    return rep


def suite_strictness(seed: int = 0, polys: int = 20, samples: int = 2000, tol: Tolerances = DEFAULT_TOLERANCES) -> SuiteReport:
    rep = SuiteReport("strictness", seed)
    rng = np.random.default_rng(seed)
    worst, worst_pt = 0.0, 0.0
    agree = 0
    for i in range(polys):
        d = 1 + i % 3
        N = [int(x) for x in rng.integers(1, 3, size=d)]
        p, _, _ = generated_halfplane_poly(rng, d, N)
        b = st.cayley_bridge(p, N, samples, seed + i)
        worst = max(worst, b.rel_err)
        worst_pt = max(worst_pt, b.max_pointwise_rel_err)
        e = st.halfplane_equivalences(p, N, samples // 4, seed + i)
        agree += e.agree and e.weighted_bound
    rep.add_le("epsilon_hat = 2^(-sum n) min |p~|", worst, tol.bridge, polys * samples)
    rep.add_le("pointwise Cayley weight identity", worst_pt, tol.bridge, polys * samples)
    rep.add_flag("three strictness conditions hold together", agree == polys, polys, note=f"{agree}/{polys}")
    return rep


def suite_interpolation(seed: int = 0, cases: int = 30, tol: Tolerances = DEFAULT_TOLERANCES) -> SuiteReport:
    rep = SuiteReport("interpolation", seed)
    rng = np.random.default_rng(seed)
    worst_c, worst_p = 0.0, 0.0
    for _ in range(cases):
        N = random_multiplicities(rng, 6, d_max=3)
        size, d = sum(N), len(N)
        K = nk.random_contraction(size, 0.9, rng)
        proj = cy.StructureMap("DiagonalZN", {"N": N}).coordinate_projections()
        p_interp, _ = dr.polydisk_rep_from_contraction(K, N)
        p_sym = mv.det_of_linear_pencil([np.eye(size)] + [-K @ P for P in proj], d)
        worst_c = max(worst_c, p_interp.max_coeff_diff(p_sym))
        pushed = dr.cayley_push_halfplane(K, N)
        q_interp = dr.extract_polynomial(pushed)
        q_sym = mv.det_of_linear_pencil([pushed.A0] + list(proj), d)
        worst_p = max(worst_p, q_interp.max_coeff_diff(q_sym))
    rep.add_le("det(I - K Z_N): interpolation vs cofactor expansion", worst_c, tol.coefficients, cases)
    rep.add_le("det(A0 + Z_N): interpolation vs cofactor expansion", worst_p, tol.coefficients, cases)
    return rep


SUITES: dict[str, Callable[..., SuiteReport]] = {
    "clifford": suite_clifford,
    "t27": suite_t27,
    "exceptional": suite_exceptional,
    "roundtrips": suite_roundtrips,
    "lieball": suite_lieball,
    "proofchains": suite_proofchains,
    "polydisk_reps": suite_polydisk_reps,
    "lorentz_reps": suite_lorentz_reps,
    "linechecks": suite_linechecks,
    "strictness": suite_strictness,
    "interpolation": suite_interpolation,
}


def run_suite(name: str, seed: int = 0, **kw) -> list[SuiteReport]:
    """Run one suite (or every suite for ``all``), timing each."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(list(SUITES) + ['all'])}")
    out = []
    for n in names:
        t = time.perf_counter()
        r = SUITES[n](seed=seed, **kw) if name != "all" else SUITES[n](seed=seed)
        r.wall_time = time.perf_counter() - t
        out.append(r)
    return out
