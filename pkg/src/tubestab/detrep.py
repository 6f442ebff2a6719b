"""Determinantal representations built from contractions, and their verification.

A :class:`DetRep` stores one of two forms:

* ``"pencil"`` (tube side): value ``c (w_1 + i)^e det(A0 + V* L(w) V)``;
* ``"contraction"`` (bounded side): value ``c det(I - K L(z))``, or for the
  Lie ball ``c det(P_+(z) (x) I - K (P_-(z) (x) I))``.  Here ``A0`` holds K.

Scalar constants that relate the two sides are kept in ``metadata`` so each
link of a Cayley chain can be tested separately.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import cayley as cy
from . import domains as dm
from . import mvpoly as mv
from . import numkernel as nk
from .errors import GridTooLarge, NotContraction, SchemaError, SplitFailure
from .mvpoly import MultiPoly
from .serialization import matrix_from_json, matrix_to_json

SCHEMA = "tubestab/1"
CONTRACTION_TOL = 1e-12
EIG1_TOL = 1e-8
ID_TOL = 1e-8
BACKWARD_TOL = 1e-12  # allowed backward error, multiplied by the evaluation condition numbers
V_TOL = 1e-12
MAX_GRID = 250_000


@dataclass(frozen=True)
class DetRep:
    A0: np.ndarray
    structure: cy.StructureMap
    k: int = 1
    V: np.ndarray | None = None
    c: complex = 1.0
    w1_plus_i_pow: int = 0
    form: str = "pencil"
    provenance: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.form not in ("pencil", "contraction"):
            raise SchemaError(f"unknown representation form {self.form!r}")
        n = self.A0.shape[0]
        inner = self.structure.dim
        if self.V is not None:
            if self.V.shape != (inner, n):
                raise SchemaError(f"V has shape {self.V.shape}, expected {(inner, n)}")
        elif n != inner:
            raise SchemaError(f"A0 is {n}x{n} but the structure has dimension {inner}")

    @property
    def nvars(self) -> int:
        return self.structure.nvars

    @property
    def size(self) -> int:
        return self.A0.shape[0]

    def matrix(self, z) -> np.ndarray:
        """The pencil matrix at z (batched); for the contraction form I - K L(z)."""
        z = np.asarray(z, dtype=complex)
        if self.form == "contraction":
            K = self.A0
            if self.structure.kind == "LiePpm":
                pp, pm = cy.apply_structure(self.structure, z)
                return pp - K @ pm
            return nk.eye_like(cy.apply_structure(self.structure, z)) - K @ cy.apply_structure(self.structure, z)
        L = cy.apply_structure(self.structure, z)
        if self.V is not None:
            L = nk.adjoint(self.V) @ L @ self.V
        return self.A0 + L

    def prefactor(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        base = np.full(z.shape[:-1], complex(self.c))
        if self.w1_plus_i_pow:
            base = base * (z[..., 0] + 1j) ** self.w1_plus_i_pow
        return base

    def __call__(self, z) -> np.ndarray:
        return self.prefactor(z) * nk.det(self.matrix(z))

    def im_A0_min_eig(self) -> float:
        if self.form != "pencil":
            return float("nan")
        return float(nk.min_eig(nk.im_part(self.A0)))

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "A0": matrix_to_json(self.A0),
            "structure": self.structure.to_json(),
            "k": self.k,
            "V": None if self.V is None else matrix_to_json(self.V),
            "prefactor": {"c_re": float(np.real(self.c)), "c_im": float(np.imag(self.c)), "w1_plus_i_pow": self.w1_plus_i_pow},
            "form": self.form,
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DetRep":
        try:
            pre = obj.get("prefactor", {}) or {}
            V = obj.get("V")
            return cls(
                A0=matrix_from_json(obj["A0"]),
                structure=cy.StructureMap.from_json(obj["structure"]),
                k=int(obj.get("k", 1)),
                V=None if V is None else matrix_from_json(V),
                c=complex(pre.get("c_re", 1.0), pre.get("c_im", 0.0)),
                w1_plus_i_pow=int(pre.get("w1_plus_i_pow", 0)),
                form=obj.get("form", "pencil"),
                provenance=dict(obj.get("provenance", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed DetRep JSON: {exc}") from exc


@dataclass(frozen=True)
class RepVerification:
    identity_max_rel_err: float
    A0_im_min_eig: float
    structure_checks: list
    verdict: bool
    samples: int
    coefficient_max_diff: float | None = None

    def to_json(self) -> dict:
        return {
            "identity_max_rel_err": self.identity_max_rel_err,
            "A0_im_min_eig": self.A0_im_min_eig,
            "structure_checks": [{"name": n, "passed": bool(ok), "value": v} for n, ok, v in self.structure_checks],
            "verdict": "pass" if self.verdict else "fail",
            "samples": self.samples,
            "coefficient_max_diff": self.coefficient_max_diff,
        }


# ---------------------------------------------------------------------------
# helpers


def _check_contraction(K, strict: bool = True) -> tuple[np.ndarray, float]:
    K = nk.as_cmatrix(K, square=True)
    nrm = float(nk.op_norm(K)) if K.size else 0.0
    if (strict and nrm >= 1 - CONTRACTION_TOL) or nrm > 1 + CONTRACTION_TOL:
        raise NotContraction(f"||K|| = {nrm:.15g}")
    return K, nrm


def _diag_structure(N: Sequence[int]) -> cy.StructureMap:
    return cy.StructureMap("DiagonalZN", {"N": [int(x) for x in N]})


def im_A0_factored(K) -> np.ndarray:
    """(I - K*)^{-1} (I - K*K) (I - K)^{-1}."""
    K = nk.as_cmatrix(K)
    e = nk.eye_like(K)
    R = nk.inv(e - K)
    return nk.adjoint(R) @ (e - nk.adjoint(K) @ K) @ R


# ---------------------------------------------------------------------------
# constructions


def polydisk_rep_from_contraction(K, N: Sequence[int]) -> tuple[MultiPoly, DetRep]:
    """det(I - K Z_N(z)) as explicit coefficients, with its contraction form."""
    K, nrm = _check_contraction(K)
    N = [int(x) for x in N]
    if K.shape[0] != sum(N):
        raise SchemaError(f"K is {K.shape[0]}x{K.shape[0]} but |N| = {sum(N)}")
    rep = DetRep(K, _diag_structure(N), form="contraction", provenance={"path": "polydisk", "norm_K": nrm})
    return extract_polynomial(rep, degrees=N), rep


def cayley_push_halfplane(K, N: Sequence[int]) -> DetRep:
    """A0 = i (I + K)(I - K)^{-1} with the coordinate projections of Z_N."""
    K, nrm = _check_contraction(K)
    N = [int(x) for x in N]
    if K.shape[0] != sum(N):
        raise SchemaError(f"K is {K.shape[0]}x{K.shape[0]} but |N| = {sum(N)}")
    A0 = nk.matrix_cayley(K)
    direct = nk.im_part(A0)
    factored = im_A0_factored(K)
    meta = {
        "det_I_minus_K": complex(nk.det(np.eye(K.shape[0]) - K)),
        "im_A0_formula_err": float(np.max(np.abs(direct - factored), initial=0.0)),
        "im_A0_min_eig": float(nk.min_eig(direct)) if K.size else float("inf"),
    }
    return DetRep(A0, _diag_structure(N), provenance={"path": "halfplane", "norm_K": nrm}, metadata=meta)


def cartan_rep_from_contraction(K, uhp: Sequence[int] = (), suhp: Sequence[int] = (),
                                N: Sequence[int] = (), M: Sequence[int] = ()) -> DetRep:
    """A0 = phi(K) against the block operand diag(Z_q (x) I_{N_q}, W_r (x) I_{M_r})."""
    K, nrm = _check_contraction(K)
    smap = cy.StructureMap("CartanBlocks", {"uhp": list(uhp), "suhp": list(suhp), "N": list(N), "M": list(M)})
    if K.shape[0] != smap.dim:
        raise SchemaError(f"K is {K.shape[0]}x{K.shape[0]} but the block operand is {smap.dim}")
    A0 = nk.matrix_cayley(K)
    meta = {"det_I_minus_K": complex(nk.det(np.eye(K.shape[0]) - K)), "im_A0_min_eig": float(nk.min_eig(nk.im_part(A0)))}
    return DetRep(A0, smap, provenance={"path": "cartan", "norm_K": nrm}, metadata=meta)


def lorentz2_rep_from_contraction(K, k: int | None = None) -> DetRep:
    """Two-variable Lorentz tube: det(A0 + W(w) (x) I_k) with A0 = phi(K)."""
    K, nrm = _check_contraction(K)
    if K.shape[0] % 2:
        raise SchemaError("K must be 2k x 2k")
    k = K.shape[0] // 2 if k is None else int(k)
    A0 = nk.matrix_cayley(K)
    meta = {"det_I_minus_K": complex(nk.det(np.eye(2 * k) - K)), "im_A0_min_eig": float(nk.min_eig(nk.im_part(A0)))}
    return DetRep(A0, cy.StructureMap("LorentzW", {"n": 2, "k": k}), k=k,
                  provenance={"path": "lorentz2", "norm_K": nrm}, metadata=meta)


def split_eigenvalue_one(K, tol: float = EIG1_TOL):
    """Unitary U = [U1 | V] with K = U (I (+) Kt) U*, Kt = V* K V.

    The eigenspace of a contraction at eigenvalue 1 is the kernel of the
    positive semidefinite matrix I - (K + K*)/2, and it reduces K.  Its
    eigenvectors with eigenvalue below ``tol`` form U1.
    """
    K = nk.as_cmatrix(K, square=True)
    n = K.shape[0]
    e = np.eye(n)
    H = e - (K + nk.adjoint(K)) / 2
    res = nk.herm_eigs((H + nk.adjoint(H)) / 2, vectors=True)
    lam, U = res.eigenvalues, res.vectors
    ones = lam < tol
    U1, V = U[:, ones], U[:, ~ones]
    scale = max(float(nk.op_norm(K)), 1e-300)
    if U1.shape[1]:
        r1 = float(nk.op_norm((K - e) @ U1))
        r2 = float(nk.op_norm((nk.adjoint(K) - e) @ U1))
        if max(r1, r2) > tol * scale:
            raise SplitFailure(f"eigenvalue-1 space is not reducing: residuals {r1:.3e}, {r2:.3e}")
    Kt = nk.adjoint(V) @ K @ V
    return U1, V, Kt


def lorentzn_rep_from_contraction(K, n: int, k: int | None = None) -> DetRep:
    """n-variable Lorentz tube: (w_1 + i)^k det(A0 + V* (W(w) (x) I_k) V).

    A0 = i (I - Kt)^{-1} (I + Kt) where Kt is K compressed to the orthogonal
    complement of its eigenvalue-1 space.
    """
    K, nrm = _check_contraction(K, strict=False)
    if K.shape[0] % n:
        raise SchemaError(f"K is {K.shape[0]}x{K.shape[0]}, not a multiple of n = {n}")
    k = K.shape[0] // n if k is None else int(k)
    U1, V, Kt = split_eigenvalue_one(K)
    m = V.shape[1]
    e = np.eye(m)
    A0 = 1j * nk.solve(e - Kt, e + Kt) if m else np.zeros((0, 0), dtype=complex)
    dKt = complex(nk.det(e - Kt)) if m else 1.0
    meta = {
        "m": m,
        "eig1_dim": int(U1.shape[1]),
        "det_I_minus_Kt": dKt,
        # disc side * D^{nk} = const * (w1+i)^k det(A0 + V*(W (x) I)V)
        "chain_const": complex((2j) ** ((n - 1) * k + n * k - m) * dKt),
        "V_orth_err": float(np.max(np.abs(nk.adjoint(V) @ V - e), initial=0.0)),
        "im_A0_min_eig": float(nk.min_eig(nk.im_part(A0))) if m else float("inf"),
    }
    return DetRep(A0, cy.StructureMap("LorentzW", {"n": n, "k": k}), k=k, V=V, w1_plus_i_pow=k,
                  provenance={"path": "lorentzn", "norm_K": nrm}, metadata=meta)


def skew_rep_from_contraction(K, n: int, N: int = 1) -> DetRep:
    """Skew domain: det(A0 + (W J) (x) I_N), A0 = i (I + (J (x) I)K)^{-1} (I - (J (x) I)K)."""
    K, nrm = _check_contraction(K)
    if K.shape[0] != 2 * n * N:
        raise SchemaError(f"K must be {2 * n * N} x {2 * n * N}")
    JN = np.kron(cy.J_matrix(n), np.eye(N))
    e = np.eye(K.shape[0])
    A0 = 1j * nk.solve(e + JN @ K, e - JN @ K)
    meta = {"det_I_plus_JK": complex(nk.det(e + JN @ K)), "im_A0_min_eig": float(nk.min_eig(nk.im_part(A0)))}
    return DetRep(A0, cy.StructureMap("SkewZJ", {"n": n, "N": N}), k=N,
                  provenance={"path": "skew", "norm_K": nrm}, metadata=meta)


def lieball_rep_from_contraction(K, n: int, k: int | None = None) -> DetRep:
    """Contraction form det(P_+(z) (x) I_k - K (P_-(z) (x) I_k)) on the Lie ball."""
    K, nrm = _check_contraction(K)
    if K.shape[0] % n:
        raise SchemaError(f"K is {K.shape[0]}x{K.shape[0]}, not a multiple of n = {n}")
    k = K.shape[0] // n if k is None else int(k)
    return DetRep(K, cy.StructureMap("LiePpm", {"n": n, "k": k}), k=k, form="contraction",
                  provenance={"path": "lieball", "norm_K": nrm})


@dataclass(frozen=True)
class LieBallCheck:
    nonvanishing: bool
    min_abs_det: float
    factorization_max_rel_err: float
    samples: int
    min_abs_det_I_minus_KQ: float

    def to_json(self) -> dict:
        return self.__dict__.copy()


def lieball_pencil_check(K, n: int, samples: int = 10_000, seed: int = 0, k: int | None = None) -> LieBallCheck:
    """Nonvanishing of the P_+/P_- pencil on sampled Lie ball points.

    The pencil determinant is compared against det(P_+ (x) I) det(I - K(Q (x) I)).
    """
    rep = lieball_rep_from_contraction(K, n, k)
    K = rep.A0
    k = rep.k
    spec = dm.DomainSpec("LieBall", {"n": n})
    nb = samples // 10
    z = np.concatenate([dm.sample(spec, samples - nb, seed), dm.sample(spec, max(nb, 1), seed + 1, "near_boundary")])[:samples]
    vals = rep(z)
    pp, _ = cy.build_Ppm(z)
    Q = cy.kron_I(cy.build_Q(z), k)
    dq = nk.det(np.eye(n * k) - K @ Q)
    fac = nk.det(cy.kron_I(pp, k)) * dq
    rel = np.abs(vals - fac) / np.maximum(np.abs(fac), 1e-300)
    m = float(np.min(np.abs(vals)))
    return LieBallCheck(bool(m > 0 and np.all(np.isfinite(vals))), m, float(rel.max()), int(z.shape[0]), float(np.min(np.abs(dq))))


# ---------------------------------------------------------------------------
# polynomial extraction


def degree_bounds(rep: DetRep) -> list[int]:
    """Per-variable degree bounds: rows of the pencil each variable touches."""
    smap = rep.structure
    d = smap.nvars
    if smap.kind == "LiePpm":
        bounds = [2 * rep.size] * d
    else:
        bounds = []
        for A in smap.coordinate_projections():
            rows = int(np.count_nonzero(np.any(A != 0, axis=1)))
            bounds.append(min(rows, rep.size))
    if rep.w1_plus_i_pow:
        bounds[0] += rep.w1_plus_i_pow
    return bounds


def extract_polynomial(rep: DetRep, degrees: Sequence[int] | None = None, max_points: int = MAX_GRID,
                       include_prefactor: bool = True) -> MultiPoly:
    """Coefficients of the represented polynomial by tensor-grid interpolation."""
    if degrees is None:
        degrees = degree_bounds(rep)
        if not include_prefactor and rep.w1_plus_i_pow:
            degrees[0] -= rep.w1_plus_i_pow
    degrees = [int(n) for n in degrees]
    npts = int(np.prod([n + 1 for n in degrees]))
    if npts > max_points:
        raise GridTooLarge(f"{npts} grid points exceed the cap {max_points}")

    def f(pts):
        out = np.empty(pts.shape[0], dtype=complex)
        for s in range(0, pts.shape[0], 4096):
            blk = pts[s:s + 4096]
            v = nk.det(rep.matrix(blk))
            out[s:s + 4096] = rep.prefactor(blk) * v if include_prefactor else v
        return out

    return mv.interpolate_from_grid(mv.sample_on_grid(f, degrees), degrees)


# ---------------------------------------------------------------------------
# verification


def _pencil_cond(M: np.ndarray) -> np.ndarray:
    try:
        Minv = nk.inv(M, cond_cap=np.inf)
    except Exception:  # singular at the sample
        return np.full(M.shape[:-2], np.inf)
    return np.sum(np.abs(M), axis=-2).max(axis=-1) * np.sum(np.abs(Minv), axis=-2).max(axis=-1)


def verify_rep(p: MultiPoly, q: MultiPoly | None, rep: DetRep, samples: int = 200, seed: int = 0,
               id_tol: float = ID_TOL, coefficients: bool = False) -> RepVerification:
    """Structural checks plus the sampled identity p q = prefactor * det(pencil)."""
    checks: list = []
    pq = p if q is None else p * q
    if pq.nvars != rep.nvars:
        checks.append(("variable_count", False, float(pq.nvars)))
        return RepVerification(float("inf"), float("nan"), checks, False, 0)
    im_min = rep.im_A0_min_eig()
    if rep.form == "pencil":
        checks.append(("im_A0_psd", im_min >= -1e-10, im_min))
    else:
        nrm = float(nk.op_norm(rep.A0)) if rep.size else 0.0
        checks.append(("K_contraction", nrm <= 1 + CONTRACTION_TOL, nrm))
    if rep.structure.kind == "DiagonalZN":
        projs = rep.structure.coordinate_projections()
        diag01 = all(np.array_equal(A, np.diag(np.diag(A))) and np.all(np.isin(np.diag(A), (0, 1))) for A in projs)
        total = sum(projs) if projs else np.zeros((0, 0))
        checks.append(("A_j_diagonal_projections", bool(diag01), None))
        checks.append(("sum_A_j_identity", bool(np.array_equal(total, np.eye(rep.structure.dim))), None))
    if rep.V is not None:
        err = float(np.max(np.abs(nk.adjoint(rep.V) @ rep.V - np.eye(rep.size)), initial=0.0))
        checks.append(("V_isometry", err <= V_TOL, err))
    budget = sum(degree_bounds(rep))
    checks.append(("degree_budget", pq.degree <= budget, float(pq.degree)))

    rng = np.random.default_rng(seed)
    z = rng.normal(size=(samples, rep.nvars)) + 1j * rng.normal(size=(samples, rep.nvars))
    lhs = mv.evaluate(pq, z)
    M = rep.matrix(z)
    rhs = rep.prefactor(z) * nk.det(M)
    scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-300)
    rel = np.abs(lhs - rhs) / scale
    # attainable accuracy is limited by both evaluations: the pencil's condition
    # number and the polynomial's sum |c||z^e| / |p(z)|
    poly_cond = mv.abs_scale(pq, z) / np.maximum(np.abs(lhs), 1e-300)
    tol = np.maximum(id_tol, BACKWARD_TOL * (_pencil_cond(M) + poly_cond))
    id_err = float(np.max(rel)) if samples else 0.0
    checks.append(("sampled_identity", bool(np.all(rel <= tol)), id_err))

    cdiff = None
    if coefficients:
        try:
            cdiff = extract_polynomial(rep).max_coeff_diff(pq)
            checks.append(("coefficients", cdiff <= 1e-9, cdiff))
        except GridTooLarge:
            checks.append(("coefficients", True, None))
    verdict = all(ok for _, ok, _ in checks)
    return RepVerification(id_err, im_min, checks, verdict, samples, cdiff)


# ---------------------------------------------------------------------------
# Cayley chains: each returns the max relative error over the given points


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def chain_halfplane(K, N: Sequence[int], w) -> float:
    """det(I - K Z_N(phi^{-1}(w))) prod (w_j + i)^{N_j} = det(I - K) det(A0 + Z_N(w))."""
    rep = cayley_push_halfplane(K, N)
    K = nk.as_cmatrix(K)
    w = np.asarray(w, dtype=complex)
    Zd = cy.apply_structure(rep.structure, cy.phi_inv(w))
    lhs = nk.det(np.eye(K.shape[0]) - K @ Zd) * np.prod((w + 1j) ** np.asarray(N), axis=-1)
    rhs = rep.metadata["det_I_minus_K"] * rep(w)
    return _rel(lhs, rhs)


def chain_cartan(K, uhp, suhp, N, M, w) -> float:
    """Block version of the half-plane chain for CartanBlocks."""
    rep = cartan_rep_from_contraction(K, uhp, suhp, N, M)
    K = nk.as_cmatrix(K)
    blocks = cy.cartan_split(w, list(uhp), list(suhp))
    mults = list(N) + list(M)
    inv_blocks = [cy.kron_I(nk.matrix_cayley_inv(b), int(mm)) for b, mm in zip(blocks, mults)]
    lhs = nk.det(np.eye(K.shape[0]) - K @ cy.block_diag(inv_blocks))
    for b, mm in zip(blocks, mults):
        lhs = lhs * nk.det(b + 1j * nk.eye_like(b)) ** int(mm)
    rhs = rep.metadata["det_I_minus_K"] * rep(w)
    return _rel(lhs, rhs)


def chain_lorentz2(K, w) -> float:
    """det(I - K (P(z) (x) I_k)) D(w)^k = det(I - K) det(A0 + W(w) (x) I_k), z = Phi_2^{-1}(w)."""
    rep = lorentz2_rep_from_contraction(K)
    K = nk.as_cmatrix(K)
    k = rep.k
    w = np.asarray(w, dtype=complex)
    z = cy.Phi_n_inv(w)
    lhs = nk.det(np.eye(2 * k) - K @ cy.kron_I(cy.build_P2(z), k)) * cy.lorentz_den(w) ** k
    return _rel(lhs, rep.metadata["det_I_minus_K"] * rep(w))


def chain_lorentzn(K, n: int, w) -> dict:
    """Both links of the n-variable chain at points w of the tube.

    first:  det(P_+ (x) I - K (P_- (x) I))|_{z = Phi_n^{-1}(w)} D^{nk}
            = (2i)^{(n-1)k} (w_1+i)^k det(i(I+K) + (I-K)(W (x) I))
    second: the right side = chain_const * (w_1+i)^k det(A0 + V*(W (x) I)V)
    """
    rep = lorentzn_rep_from_contraction(K, n)
    K = nk.as_cmatrix(K)
    k = rep.k
    w = np.asarray(w, dtype=complex)
    z = cy.Phi_n_inv(w)
    pp, pm = cy.build_Ppm(z)
    disc = nk.det(cy.kron_I(pp, k) - K @ cy.kron_I(pm, k)) * cy.lorentz_den(w) ** (n * k)
    e = np.eye(n * k)
    Wk = cy.kron_I(cy.build_W(w), k)
    mid = (2j) ** ((n - 1) * k) * (w[..., 0] + 1j) ** k * nk.det(1j * (e + K) + (e - K) @ Wk)
    tube = rep.metadata["chain_const"] * rep(w)
    return {"first": _rel(disc, mid), "second": _rel(mid, tube), "total": _rel(disc, tube)}


def chain_skew(K, n: int, N: int, W) -> float:
    """det(I - K(psi^{-1}(W) (x) I)) det(iI + WJ)^N = det(I + (J (x) I)K) det(A0 + WJ (x) I)."""
    rep = skew_rep_from_contraction(K, n, N)
    K = nk.as_cmatrix(K)
    W = np.asarray(W, dtype=complex)
    Wm = cy.skew_to_matrix(W, 2 * n)
    J = cy.J_matrix(n)
    Z = cy.psi_inv(Wm)
    lhs = nk.det(np.eye(2 * n * N) - K @ cy.kron_I(Z, N)) * nk.det(1j * np.eye(2 * n) + Wm @ J) ** N
    return _rel(lhs, rep.metadata["det_I_plus_JK"] * rep(W))
