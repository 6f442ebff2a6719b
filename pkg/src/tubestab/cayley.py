"""Structure maps and Cayley-type transforms between bounded domains and tubes.

Conventions
-----------
* Scalar and vector maps accept a leading batch axis; the last axis holds the
  coordinates.
* Matrix variables are flattened to coordinate vectors: full matrices
  row-major, symmetric matrices by their upper triangle (i <= j) row-major,
  skew matrices by their strict upper triangle row-major.
* The exceptional coordinates are ordered ``(w11, w12[8], w13[8], w22,
  w23[8], w33)``, i.e. 1, 2-9, 10-17, 18, 19-26, 27 in one-based indexing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

import numpy as np

from . import numkernel as nk
from .errors import DimMismatch, NotInvertible, NotSkew, Pole, PoleAtOne, SchemaError, SingularPencil

POLE_TOL = 1e-12
SCHEMA = "tubestab/1"


def _c(x) -> np.ndarray:
    return np.asarray(x, dtype=complex)


# ---------------------------------------------------------------------------
# scalar Cayley transform


def phi(z):
    """i (1 + z) / (1 - z), disc to upper half plane."""
    z = _c(z)
    if np.any(np.abs(1 - z) < POLE_TOL):
        raise Pole("phi has a pole at z = 1")
    out = 1j * (1 + z) / (1 - z)
    return out if out.ndim else complex(out)


def phi_inv(w):
    """(w - i) / (w + i), upper half plane to disc."""
    w = _c(w)
    if np.any(np.abs(w + 1j) < POLE_TOL):
        raise Pole("phi^{-1} has a pole at w = -i")
    out = (w - 1j) / (w + 1j)
    return out if out.ndim else complex(out)


# ---------------------------------------------------------------------------
# the spin-factor product on C^n


def jordan_mul(u, v) -> np.ndarray:
    """(uv)_1 = sum u_j v_j, (uv)_j = u_1 v_j + u_j v_1 for j >= 2."""
    u, v = _c(u), _c(v)
    first = np.sum(u * v, axis=-1, keepdims=True)
    rest = u[..., :1] * v[..., 1:] + u[..., 1:] * v[..., :1]
    return np.concatenate([first, rest], axis=-1)


def jordan_inv(u) -> np.ndarray:
    u = _c(u)
    q = u[..., 0] ** 2 - np.sum(u[..., 1:] ** 2, axis=-1)
    scale = np.sum(np.abs(u) ** 2, axis=-1)
    if np.any(np.abs(q) <= POLE_TOL * np.maximum(scale, 1e-300)):
        raise NotInvertible("u_1^2 - u_2^2 - ... - u_n^2 vanishes")
    conj = np.concatenate([u[..., :1], -u[..., 1:]], axis=-1)
    return conj / q[..., None]


def jordan_unit(n: int) -> np.ndarray:
    e = np.zeros(n, dtype=complex)
    e[0] = 1
    return e


def jordan_cayley(z) -> np.ndarray:
    """The literal product form -(ie + iz)(iz - ie)^{-1}.

    Algebraically this is (e + z)(e - z)^{-1}; it agrees with ``Phi_n``
    only after the change of coordinates used in :func:`Phi_n_jordan`.
    """
    z = _c(z)
    e = jordan_unit(z.shape[-1])
    return -jordan_mul(1j * e + 1j * z, jordan_inv(1j * z - 1j * e))


def Phi_n_jordan(z) -> np.ndarray:
    """Phi_n written through the spin-factor Cayley transform.

    With u = (z_1, i z_2, ..., i z_n) and sigma = diag(1, -1, ..., -1),
    Phi_n(z) = i sigma (e + u)(e - u)^{-1}.
    """
    z = _c(z)
    u = z.copy()
    u[..., 1:] *= 1j
    e = jordan_unit(z.shape[-1])
    c = jordan_mul(e + u, jordan_inv(e - u))
    c[..., 1:] *= -1
    return 1j * c


# ---------------------------------------------------------------------------
# Lie ball <-> Lorentz tube


def Phi_n(z) -> np.ndarray:
    z = _c(z)
    den = (1 - z[..., 0]) ** 2 + np.sum(z[..., 1:] ** 2, axis=-1)
    if np.any(np.abs(den) < POLE_TOL):
        raise Pole("(1 - z_1)^2 + z_2^2 + ... + z_n^2 vanishes")
    first = 1j * (1 - np.sum(z ** 2, axis=-1))
    return np.concatenate([first[..., None], 2 * z[..., 1:]], axis=-1) / den[..., None]


def Phi_n_inv(w) -> np.ndarray:
    w = _c(w)
    den = (w[..., 0] + 1j) ** 2 - np.sum(w[..., 1:] ** 2, axis=-1)
    if np.any(np.abs(den) < POLE_TOL):
        raise Pole("(w_1 + i)^2 - w_2^2 - ... - w_n^2 vanishes")
    first = 1 + w[..., 0] ** 2 - np.sum(w[..., 1:] ** 2, axis=-1)
    return np.concatenate([first[..., None], -2 * w[..., 1:]], axis=-1) / den[..., None]


def lorentz_den(w) -> np.ndarray:
    """D(w) = (w_1 + i)^2 - sum_{j>=2} w_j^2."""
    w = _c(w)
    return (w[..., 0] + 1j) ** 2 - np.sum(w[..., 1:] ** 2, axis=-1)


def build_P2(z) -> np.ndarray:
    z = _c(z)
    out = np.empty(z.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = z[..., 0]
    out[..., 0, 1] = -z[..., 1]
    out[..., 1, 0] = z[..., 1]
    out[..., 1, 1] = z[..., 0]
    return out


def build_W(w) -> np.ndarray:
    """W(w): w_1 on the diagonal, -i w_j in row 1 and i w_j in column 1."""
    w = _c(w)
    n = w.shape[-1]
    out = np.zeros(w.shape[:-1] + (n, n), dtype=complex)
    idx = np.arange(n)
    out[..., idx, idx] = w[..., :1]
    out[..., 0, 1:] = -1j * w[..., 1:]
    out[..., 1:, 0] = 1j * w[..., 1:]
    return out


def Phi_2_pencil_link(z1, z2):
    """(w1, w2) = Phi_2(z1, z2) and the max deviation of phi(P(z)) from W(w)."""
    z = np.stack(np.broadcast_arrays(_c(z1), _c(z2)), axis=-1)
    w = Phi_n(z)
    lhs = nk.matrix_cayley(build_P2(z))
    err = np.max(np.abs(lhs - build_W(w)), axis=(-2, -1))
    return w[..., 0], w[..., 1], err


def _check_pole_one(z):
    if np.any(np.abs(1 - z[..., 0]) < POLE_TOL):
        raise PoleAtOne("|1 - z_1| below 1e-12")


def build_Q(z) -> np.ndarray:
    z = _c(z)
    _check_pole_one(z)
    n = z.shape[-1]
    s = (1 - z[..., 0])[..., None, None]
    zr = z[..., 1:]
    out = np.empty(z.shape[:-1] + (n, n), dtype=complex)
    out[..., 0, 0] = z[..., 0]
    out[..., 0, 1:] = -zr
    out[..., 1:, 0] = zr
    inner = zr[..., :, None] * zr[..., None, :] / s
    sq = np.sum(zr ** 2, axis=-1)
    diag = z[..., :1] - (sq[..., None] - zr ** 2) / s[..., 0]
    idx = np.arange(n - 1)
    inner[..., idx, idx] = diag
    out[..., 1:, 1:] = inner
    return out


def build_Ppm(z):
    """P_+(z) = 1 (+) (1 - z_1) I and P_-(z) = Q(z) P_+(z)."""
    z = _c(z)
    n = z.shape[-1]
    pp = np.zeros(z.shape[:-1] + (n, n), dtype=complex)
    pp[..., 0, 0] = 1
    idx = np.arange(1, n)
    pp[..., idx, idx] = (1 - z[..., :1])
    return pp, build_Q(z) @ pp


def build_Ppm_polynomial(z):
    """(P_+, P_-) with P_- expanded as a polynomial (no 1/(1 - z_1) factor).

    This is the r = 1 case of :func:`build_Sr_Tr`; it equals
    ``build_Ppm(z)`` wherever z_1 != 1.
    """
    return build_Sr_Tr(z, 1.0)


def build_Sr_Tr(z, r: float):
    """S_r(z) = 1 (+) (r - z_1) I and the matching polynomial T_r(z)."""
    z = _c(z)
    n = z.shape[-1]
    s = r - z[..., 0]
    sr = np.zeros(z.shape[:-1] + (n, n), dtype=complex)
    sr[..., 0, 0] = 1
    idx = np.arange(1, n)
    sr[..., idx, idx] = s[..., None]
    zr = z[..., 1:]
    tr = np.empty_like(sr)
    tr[..., 0, 0] = z[..., 0]
    tr[..., 0, 1:] = -zr * s[..., None]
    tr[..., 1:, 0] = zr
    inner = zr[..., :, None] * zr[..., None, :]
    sq = np.sum(zr ** 2, axis=-1)
    j = np.arange(n - 1)
    inner[..., j, j] = (z[..., 0] * s)[..., None] - (sq[..., None] - zr ** 2)
    tr[..., 1:, 1:] = inner
    return sr, tr


def build_M(z) -> np.ndarray:
    """M(z) = ||z||^2 I + z z* - conj(z) z^T."""
    z = _c(z)
    n = z.shape[-1]
    nrm = np.sum(np.abs(z) ** 2, axis=-1)[..., None, None]
    return nrm * np.eye(n) + z[..., :, None] * np.conj(z)[..., None, :] - np.conj(z)[..., :, None] * z[..., None, :]


# ---------------------------------------------------------------------------
# skew-symmetric domain


@lru_cache(maxsize=None)
def J_matrix(n: int) -> np.ndarray:
    """J = [[0, I_n], [-I_n, 0]]."""
    j = np.zeros((2 * n, 2 * n), dtype=complex)
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    j.setflags(write=False)
    return j


def _check_skew(Z, tol: float = 1e-10):
    Z = _c(Z)
    if Z.shape[-1] % 2 or Z.shape[-1] != Z.shape[-2]:
        raise NotSkew("expected an even-dimensional square matrix")
    err = np.max(np.abs(Z + np.swapaxes(Z, -1, -2)))
    if err > tol * max(1.0, float(np.max(np.abs(Z)))):
        raise NotSkew(f"||Z + Z^T|| = {err:.3e}")
    return Z


def psi(Z) -> np.ndarray:
    """i (-J + Z)(I - J Z)^{-1}."""
    Z = _check_skew(Z)
    J = J_matrix(Z.shape[-1] // 2)
    e = nk.eye_like(Z)
    return 1j * (-J + Z) @ nk.inv(e - J @ Z)


def psi_inv(W) -> np.ndarray:
    """(iI + W J)^{-1} (W + iJ), the inverse of :func:`psi`."""
    W = _check_skew(W)
    J = J_matrix(W.shape[-1] // 2)
    e = nk.eye_like(W)
    return nk.solve(1j * e + W @ J, W + 1j * J)


def psi_inv_literal(W) -> np.ndarray:
    """J (W + iJ)(iJ - W)^{-1}; kept to document that it does not invert psi."""
    W = _c(W)
    J = J_matrix(W.shape[-1] // 2)
    return J @ (W + 1j * J) @ nk.inv(1j * J - W)


# ---------------------------------------------------------------------------
# exceptional domain building blocks

_Y_PATTERN = (
    (1, 2, 3, 4, 5, 6, 7, 8),
    (2, -1, -4, 3, -6, 5, 8, -7),
    (3, 4, -1, -2, -7, -8, 5, 6),
    (4, -3, 2, -1, -8, 7, -6, 5),
    (5, 6, 7, 8, -1, -2, -3, -4),
    (6, -5, 8, -7, 2, -1, 4, -3),
    (7, -8, -5, 6, 3, -4, -1, 2),
    (8, 7, -6, -5, 4, 3, -2, -1),
)


@lru_cache(maxsize=None)
def _generators() -> np.ndarray:
    t = np.zeros((8, 8, 8), dtype=np.int64)
    for i, row in enumerate(_Y_PATTERN):
        for j, v in enumerate(row):
            t[abs(v) - 1, i, j] = 1 if v > 0 else -1
    t.setflags(write=False)
    return t


def generators_T() -> list[np.ndarray]:
    """T_1, ..., T_8 with Y(omega) = sum omega_j T_j (integer entries)."""
    return [t.copy() for t in _generators()]


def build_Y(omega) -> np.ndarray:
    omega = np.asarray(omega)
    if omega.shape[-1] != 8:
        raise DimMismatch("Y needs an 8-vector")
    return np.einsum("...k,kij->...ij", omega, _generators())


def zeta_split(zeta):
    """(w1, x, y, w2, z, w3) from a 27-vector (batch axes allowed)."""
    zeta = _c(zeta)
    if zeta.shape[-1] != 27:
        raise DimMismatch("exceptional coordinates have length 27")
    return (zeta[..., 0], zeta[..., 1:9], zeta[..., 9:17], zeta[..., 17], zeta[..., 18:26], zeta[..., 26])


def zeta_join(w1, x, y, w2, z, w3) -> np.ndarray:
    parts = [_c(w1)[..., None], _c(x), _c(y), _c(w2)[..., None], _c(z), _c(w3)[..., None]]
    return np.concatenate(parts, axis=-1)


def _tube27(a11, a12, a13, a22, b23, a33) -> np.ndarray:
    """Assemble [[a11, a12^T, a13^T], [a12, a22 I, B], [a13, B^T, a33 I]]."""
    batch = np.shape(a11)
    out = np.zeros(batch + (17, 17), dtype=complex)
    out[..., 0, 0] = a11
    out[..., 0, 1:9] = a12
    out[..., 1:9, 0] = a12
    out[..., 0, 9:17] = a13
    out[..., 9:17, 0] = a13
    idx = np.arange(8)
    out[..., 1 + idx, 1 + idx] = np.asarray(a22)[..., None]
    out[..., 9 + idx, 9 + idx] = np.asarray(a33)[..., None]
    out[..., 1:9, 9:17] = b23
    out[..., 9:17, 1:9] = np.swapaxes(b23, -1, -2)
    return out


def build_X_zeta(zeta) -> np.ndarray:
    """X(zeta): the symmetric 17x17 matrix with the rank-one correction."""
    w1, x, y, w2, z, w3 = zeta_split(zeta)
    if np.any(np.abs(1 - w1) < POLE_TOL):
        raise PoleAtOne("X(zeta) needs w_1 != 1")
    base = _tube27(w1, x, y, w2, build_Y(z), w3)
    v = np.concatenate([np.zeros(np.shape(w1) + (1,), dtype=complex), x, y], axis=-1)
    return base - v[..., :, None] * v[..., None, :] / (1 - w1)[..., None, None]


def tube27_matrix(w) -> np.ndarray:
    """The first form: [[w11, w12^T, w13^T], [w12, w22 I, Y(w23)], [w13, Y(w23)^T, w33 I]]."""
    w11, w12, w13, w22, w23, w33 = zeta_split(w)
    return _tube27(w11, w12, w13, w22, build_Y(w23), w33)


def build_Omega(w):
    """The three 17x17 summands Omega_1, Omega_2, Omega_3.

    The (2,3) block of Omega_3 is Y(w_{2..9}) T_1, which is the block that
    makes the three summands have the same positivity region.
    """
    w11, w12, w13, w22, w23, w33 = zeta_split(w)
    T1 = _generators()[0]
    o1 = _tube27(w11, w12, w13, w22, build_Y(w23), w33)
    o2 = _tube27(w22, w12, w23, w11, T1 @ build_Y(w13), w33)
    o3 = _tube27(w33, w23, w13, w22, build_Y(w12) @ T1, w11)
    return o1, o2, o3


def build_Omega_literal3(w) -> np.ndarray:
    """Third summand with the block Y(T_1 w_{2..9}) exactly as displayed in print."""
    w11, w12, w13, w22, w23, w33 = zeta_split(w)
    T1 = _generators()[0]
    return _tube27(w33, w23, w13, w22, build_Y(np.einsum("ij,...j->...i", T1, w12)), w11)


def read_tube27(W, rel_tol: float = 1e-10):
    """Read the 27 coordinates off a 17x17 matrix and report the pattern residual.

    The residual is the max entry deviation of W from ``tube27_matrix`` of
    the read coordinates, relative to max(1, max |W|).
    """
    W = _c(W)
    w11 = W[..., 0, 0]
    w12 = (W[..., 1:9, 0] + W[..., 0, 1:9]) / 2
    w13 = (W[..., 9:17, 0] + W[..., 0, 9:17]) / 2
    w22 = np.trace(W[..., 1:9, 1:9], axis1=-2, axis2=-1) / 8
    w33 = np.trace(W[..., 9:17, 9:17], axis1=-2, axis2=-1) / 8
    # Y(w) has w as its first row
    blk = W[..., 1:9, 9:17]
    w23 = np.einsum("kij,...ij->...k", _generators(), blk) / 8  # <T_k, B> / 8
    w = zeta_join(w11, w12, w13, w22, w23, w33)
    res = np.max(np.abs(W - tube27_matrix(w)), axis=(-2, -1)) / np.maximum(1.0, np.max(np.abs(W), axis=(-2, -1)))
    return w, res


def block_cayley_2x2(w, psi_vec, Z) -> np.ndarray:
    """Closed form of phi(X) for X = [[w, psi^T], [psi, Z - psi psi^T/(1-w)]]."""
    w = _c(w)
    psi_vec = _c(psi_vec)
    Z = _c(Z)
    if np.any(np.abs(1 - w) < POLE_TOL):
        raise Pole("block Cayley needs w != 1")
    e = nk.eye_like(Z)
    R = nk.inv(e - Z)
    Rpsi = np.einsum("...ij,...j->...i", R, psi_vec)
    psiR = np.einsum("...i,...ij->...j", psi_vec, R)
    s = np.einsum("...i,...i->...", psi_vec, Rpsi)
    m = Z.shape[-1]
    out = np.empty(w.shape + (m + 1, m + 1), dtype=complex)
    out[..., 0, 0] = 1j * (1 + w) / (1 - w) + 2j / (1 - w) ** 2 * s
    out[..., 0, 1:] = 2j / (1 - w)[..., None] * psiR
    out[..., 1:, 0] = 2j / (1 - w)[..., None] * Rpsi
    out[..., 1:, 1:] = 1j * (e + Z) @ R
    return out


def assemble_block_X(w, psi_vec, Z) -> np.ndarray:
    w = _c(w)
    psi_vec = _c(psi_vec)
    Z = _c(Z)
    m = Z.shape[-1]
    out = np.empty(w.shape + (m + 1, m + 1), dtype=complex)
    out[..., 0, 0] = w
    out[..., 0, 1:] = psi_vec
    out[..., 1:, 0] = psi_vec
    out[..., 1:, 1:] = Z - psi_vec[..., :, None] * psi_vec[..., None, :] / (1 - w)[..., None, None]
    return out


def zeta_to_block(zeta):
    """(w, psi, Z) with X(zeta) = assemble_block_X(w, psi, Z)."""
    w1, x, y, w2, z, w3 = zeta_split(zeta)
    psi_vec = np.concatenate([x, y], axis=-1)
    Z = _tube27(np.zeros_like(w1), np.zeros_like(x), np.zeros_like(y), w2, build_Y(z), w3)[..., 1:, 1:]
    return w1, psi_vec, Z


def zeta_from_X(X):
    """Recover zeta from a matrix of the form X(zeta), with the pattern residual."""
    X = _c(X)
    w1 = X[..., 0, 0]
    if np.any(np.abs(1 - w1) < POLE_TOL):
        raise PoleAtOne("X[0, 0] = 1")
    x = X[..., 1:9, 0]
    y = X[..., 9:17, 0]
    v = np.concatenate([np.zeros(np.shape(w1) + (1,), dtype=complex), x, y], axis=-1)
    base = X + v[..., :, None] * v[..., None, :] / (1 - w1)[..., None, None]
    w2 = np.trace(base[..., 1:9, 1:9], axis1=-2, axis2=-1) / 8
    w3 = np.trace(base[..., 9:17, 9:17], axis1=-2, axis2=-1) / 8
    z = np.einsum("kij,...ij->...k", _generators(), base[..., 1:9, 9:17]) / 8
    zeta = zeta_join(w1, x, y, w2, z, w3)
    res = np.max(np.abs(X - build_X_zeta(zeta)), axis=(-2, -1)) / np.maximum(1.0, np.max(np.abs(X), axis=(-2, -1)))
    return zeta, res


def eta(w):
    """zeta with X(zeta) = phi^{-1}(Omega_1(w)); returns (zeta, pattern residual)."""
    return zeta_from_X(nk.matrix_cayley_inv(build_Omega(w)[0]))


def eta_inv(zeta):
    """Tube coordinates of phi(X(zeta)); returns (w, pattern residual)."""
    return read_tube27(nk.matrix_cayley(build_X_zeta(zeta)))


def rotational_invariance_probe(zetas, thetas=(np.pi / 7, np.pi / 3, np.pi / 2, 2.0, np.pi)) -> dict:
    """Fraction of sampled points of {||X(zeta)|| < 1} whose rotations stay inside.

    A diagnostic only: a sample-level check cannot settle invariance.
    """
    zetas = _c(zetas)
    inside = np.asarray(nk.op_norm(build_X_zeta(zetas))) < 1
    base = zetas[inside]
    kept = []
    worst = 0.0
    for th in thetas:
        rot = np.exp(1j * th) * base
        nrm = np.asarray(nk.op_norm(build_X_zeta(rot)))
        kept.append(float(np.mean(nrm < 1)) if nrm.size else float("nan"))
        worst = max(worst, float(nrm.max()) if nrm.size else 0.0)
    return {"n_inside": int(inside.sum()), "thetas": list(map(float, thetas)), "fraction_kept": kept, "max_rotated_norm": worst}


# ---------------------------------------------------------------------------
# matrix variables <-> coordinate vectors


def sym_index(s: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(s) for j in range(i, s)]


def skew_index(m: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(m) for j in range(i + 1, m)]


def full_to_matrix(v, l: int) -> np.ndarray:
    v = _c(v)
    return v.reshape(v.shape[:-1] + (l, l))


def sym_to_matrix(v, s: int) -> np.ndarray:
    v = _c(v)
    out = np.zeros(v.shape[:-1] + (s, s), dtype=complex)
    for k, (i, j) in enumerate(sym_index(s)):
        out[..., i, j] = v[..., k]
        out[..., j, i] = v[..., k]
    return out


def skew_to_matrix(v, m: int) -> np.ndarray:
    v = _c(v)
    out = np.zeros(v.shape[:-1] + (m, m), dtype=complex)
    for k, (i, j) in enumerate(skew_index(m)):
        out[..., i, j] = v[..., k]
        out[..., j, i] = -v[..., k]
    return out


def matrix_to_sym(M) -> np.ndarray:
    M = _c(M)
    return np.stack([M[..., i, j] for i, j in sym_index(M.shape[-1])], axis=-1)


def matrix_to_skew(M) -> np.ndarray:
    M = _c(M)
    return np.stack([M[..., i, j] for i, j in skew_index(M.shape[-1])], axis=-1)


def matrix_to_full(M) -> np.ndarray:
    M = _c(M)
    return M.reshape(M.shape[:-2] + (-1,))


# ---------------------------------------------------------------------------
# structure maps


STRUCTURE_KINDS = ("DiagonalZN", "CartanBlocks", "SkewZJ", "LorentzW", "LiePpm", "Exceptional")


@dataclass(frozen=True)
class StructureMap:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in STRUCTURE_KINDS:
            raise SchemaError(f"unknown structure kind {self.kind!r}")

    # variable count
    @property
    def nvars(self) -> int:
        p = self.params
        if self.kind == "DiagonalZN":
            return len(p["N"])
        if self.kind == "CartanBlocks":
            return sum(l * l for l in p.get("uhp", [])) + sum(s * (s + 1) // 2 for s in p.get("suhp", []))
        if self.kind == "SkewZJ":
            n = p["n"]
            return n * (2 * n - 1)
        if self.kind in ("LorentzW", "LiePpm"):
            return p["n"]
        return 27

    @property
    def dim(self) -> int:
        p = self.params
        if self.kind == "DiagonalZN":
            return int(sum(p["N"]))
        if self.kind == "CartanBlocks":
            return sum(l * m for l, m in zip(p.get("uhp", []), p.get("N", []))) + sum(
                s * m for s, m in zip(p.get("suhp", []), p.get("M", []))
            )
        if self.kind == "SkewZJ":
            return 2 * p["n"] * p.get("N", 1)
        if self.kind in ("LorentzW", "LiePpm"):
            return p["n"] * p.get("k", 1)
        sel = p.get("selector", 1)
        return (51 if sel == "all" else 17) * p.get("k", 1)

    def coordinate_projections(self) -> list[np.ndarray]:
        """A_j with L(z) = sum z_j A_j (linear kinds only)."""
        if self.kind == "LiePpm":
            raise ValueError("LiePpm is not linear")
        eye = np.eye(self.nvars)
        return [apply_structure(self, eye[j]) for j in range(self.nvars)]

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "kind": self.kind, "params": self.params}

    @classmethod
    def from_json(cls, obj: dict) -> "StructureMap":
        try:
            return cls(obj["kind"], dict(obj.get("params", {})))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed structure JSON: {exc}") from exc


def kron_I(M: np.ndarray, k: int) -> np.ndarray:
    if k == 1:
        return M
    return np.einsum("...ij,ab->...iajb", M, np.eye(k)).reshape(M.shape[:-2] + (M.shape[-2] * k, M.shape[-1] * k))


def block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    batch = blocks[0].shape[:-2]
    n = sum(b.shape[-1] for b in blocks)
    out = np.zeros(batch + (n, n), dtype=complex)
    o = 0
    for b in blocks:
        m = b.shape[-1]
        out[..., o:o + m, o:o + m] = b
        o += m
    return out


def cartan_split(v, uhp, suhp) -> list[np.ndarray]:
    """Split a CartanBlocks coordinate vector into its matrix blocks."""
    v = _c(v)
    out = []
    o = 0
    for l in uhp:
        out.append(full_to_matrix(v[..., o:o + l * l], l))
        o += l * l
    for s in suhp:
        k = s * (s + 1) // 2
        out.append(sym_to_matrix(v[..., o:o + k], s))
        o += k
    return out


def apply_structure(smap: StructureMap, z):
    """L(z) for a structure map; LiePpm returns the pair (P_+ (x) I, P_- (x) I)."""
    z = _c(z)
    if z.shape[-1] != smap.nvars:
        raise DimMismatch(f"{smap.kind} expects {smap.nvars} variables, got {z.shape[-1]}")
    p = smap.params
    if smap.kind == "DiagonalZN":
        diag = np.concatenate([np.repeat(z[..., j:j + 1], int(nj), axis=-1) for j, nj in enumerate(p["N"])], axis=-1) if sum(p["N"]) else np.zeros(z.shape[:-1] + (0,), complex)
        out = np.zeros(z.shape[:-1] + (diag.shape[-1],) * 2, dtype=complex)
        idx = np.arange(diag.shape[-1])
        out[..., idx, idx] = diag
        return out
    if smap.kind == "CartanBlocks":
        uhp, suhp = p.get("uhp", []), p.get("suhp", [])
        mults = list(p.get("N", [])) + list(p.get("M", []))
        blocks = [kron_I(b, int(m)) for b, m in zip(cartan_split(z, uhp, suhp), mults)]
        return block_diag(blocks)
    if smap.kind == "SkewZJ":
        n = p["n"]
        Z = skew_to_matrix(z, 2 * n)
        return kron_I(Z @ J_matrix(n), p.get("N", 1))
    if smap.kind == "LorentzW":
        return kron_I(build_W(z), p.get("k", 1))
    if smap.kind == "LiePpm":
        k = p.get("k", 1)
        pp, pm = build_Ppm_polynomial(z)
        return kron_I(pp, k), kron_I(pm, k)
    sel = p.get("selector", 1)
    oms = build_Omega(z)
    M = block_diag(list(oms)) if sel == "all" else oms[int(sel) - 1]
    return kron_I(M, p.get("k", 1))
