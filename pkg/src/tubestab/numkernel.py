"""Dense complex linear algebra on stacks of small matrices.

Every routine accepts arrays of shape ``(..., n, n)`` and works on the whole
stack at once.  Hermitian eigenvalues come from a cyclic Jacobi sweep and
determinants/inverses from partial-pivot LU, both written out here so the
numerical core has no hidden solver behind it.  numpy is used as an array
carrier only.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NoConvergence, NonFinite, NotHermitian, SingularBlock, SingularPencil

EPS = np.finfo(float).eps
PIVOT_TOL = 1e-13
COND_CAP = 1e12
HERM_TOL = 1e-10
MAX_SWEEPS = 60


def as_cmatrix(a, square: bool = False) -> np.ndarray:
    """Coerce to a complex128 array with at least two axes and finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim < 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite("matrix has NaN or Inf entries")
    if square and m.shape[-1] != m.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {m.shape}")
    return m


def eye_like(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    return np.broadcast_to(np.eye(n, dtype=complex), a.shape[:-2] + (n, n))


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def im_part(a: np.ndarray) -> np.ndarray:
    """Hermitian imaginary part (A - A*)/(2i)."""
    a = np.asarray(a, dtype=complex)
    return (a - adjoint(a)) / 2j


def re_part(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    return (a + adjoint(a)) / 2


def _fro(a: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))


# ---------------------------------------------------------------------------
# Hermitian eigenvalues


@dataclass(frozen=True)
class HermEigenResult:
    eigenvalues: np.ndarray  # (..., n) ascending
    residual: np.ndarray | float  # max ||A v - lambda v|| per matrix
    vectors: np.ndarray | None = None  # (..., n, n) columns

    @property
    def min(self):
        return self.eigenvalues[..., 0]

    @property
    def max(self):
        return self.eigenvalues[..., -1]


def _jacobi(a: np.ndarray, want_vectors: bool, max_sweeps: int):
    """Cyclic complex Jacobi on a (B, n, n) Hermitian stack (modified in place)."""
    bsz, n = a.shape[0], a.shape[-1]
    v = np.tile(np.eye(n, dtype=complex), (bsz, 1, 1)) if want_vectors else None
    scale = np.maximum(_fro(a), np.finfo(float).tiny)
    off_tol = EPS * scale
    offmask = 1.0 - np.eye(n)
    for _ in range(max_sweeps):
        off = _fro(a * offmask)
        if np.all(off <= off_tol):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                r = np.abs(apq)
                active = r > 0.1 * off_tol / n
                if not np.any(active):
                    continue
                rs = np.where(active, r, 1.0)
                ph = np.where(active, apq / rs, 1.0)  # e^{i theta}
                tau = (a[:, q, q].real - a[:, p, p].real) / (2.0 * rs)
                sgn = np.where(tau >= 0, 1.0, -1.0)
                t = sgn / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                c = np.where(active, c, 1.0)
                s = np.where(active, s, 0.0)
                emi = np.conj(ph)
                g = np.empty((bsz, 2, 2), dtype=complex)
                g[:, 0, 0] = c
                g[:, 0, 1] = s
                g[:, 1, 0] = -s * emi
                g[:, 1, 1] = c * emi
                idx = [p, q]
                a[:, :, idx] = a[:, :, idx] @ g
                a[:, idx, :] = adjoint(g) @ a[:, idx, :]
                a[:, p, q] = np.where(active, 0.0, a[:, p, q])
                a[:, q, p] = np.conj(a[:, p, q])
                a[:, p, p] = a[:, p, p].real
                a[:, q, q] = a[:, q, q].real
                if want_vectors:
                    v[:, :, idx] = v[:, :, idx] @ g
    else:
        off = _fro(a * offmask)
        if np.any(off > 1e3 * off_tol):
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps (off={off.max():.3e})")
    return np.diagonal(a, axis1=1, axis2=2).real.copy(), v


def herm_eigs(A, tol: float = HERM_TOL, vectors: bool = False, max_sweeps: int = MAX_SWEEPS) -> HermEigenResult:
    """Ascending eigenvalues of a Hermitian matrix or stack of them.

    The symmetry check is ``||A - A*||_F <= tol * ||A||_F`` per matrix.  The
    residual ``max_k ||A v_k - lambda_k v_k||`` is always computed (it needs
    the eigenvectors internally).
    """
    a = as_cmatrix(A, square=True)
    batch = a.shape[:-2]
    n = a.shape[-1]
    a2 = a.reshape((-1, n, n))
    asym = _fro(a2 - adjoint(a2))
    if np.any(asym > tol * np.maximum(_fro(a2), 1e-300)):
        raise NotHermitian(f"||A - A*|| = {asym.max():.3e} exceeds tolerance")
    work = (a2 + adjoint(a2)) / 2
    herm = work.copy()
    lam, v = _jacobi(work, True, max_sweeps)
    order = np.argsort(lam, axis=1)
    lam = np.take_along_axis(lam, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    res = np.max(np.sqrt(np.sum(np.abs(herm @ v - v * lam[:, None, :]) ** 2, axis=1)), axis=1)
    lam = lam.reshape(batch + (n,))
    res = res.reshape(batch)
    vec = v.reshape(batch + (n, n)) if vectors else None
    return HermEigenResult(lam, res if batch else float(res), vec)


def min_eig(A) -> np.ndarray:
    return herm_eigs(A).eigenvalues[..., 0]


def is_positive_definite(A, margin: float = 0.0) -> np.ndarray | bool:
    lam = min_eig(A)
    out = lam > margin
    return out if np.ndim(out) else bool(out)


def cholesky_pd(A, shift: float = 0.0) -> np.ndarray | bool:
    """Positive definiteness of A - shift*I by an unpivoted Cholesky sweep.

    Cheaper than an eigenvalue computation when only the verdict matters.
    """
    a = as_cmatrix(A).copy()
    n = a.shape[-1]
    if shift:
        idx = np.arange(n)
        a[..., idx, idx] -= shift
    ok = np.ones(a.shape[:-2], dtype=bool)
    for k in range(n):
        piv = a[..., k, k].real
        ok &= piv > 0
        safe = np.where(piv > 0, piv, 1.0)
        col = np.where(ok[..., None], a[..., k + 1:, k] / safe[..., None], 0.0)
        a[..., k + 1:, k + 1:] -= col[..., :, None] * np.conj(a[..., k + 1:, k])[..., None, :]
    return ok if ok.ndim else bool(ok)


def is_contraction(A, bound: float = 1.0) -> np.ndarray | bool:
    """||A|| < bound, via positive definiteness of bound^2 I - A*A."""
    a = as_cmatrix(A)
    g = adjoint(a) @ a
    return cholesky_pd(-g, -bound * bound)


def op_norm(A) -> np.ndarray | float:
    """Largest singular value, sqrt of the top eigenvalue of A*A."""
    a = as_cmatrix(A)
    g = adjoint(a) @ a
    g = (g + adjoint(g)) / 2
    lam = herm_eigs(g).eigenvalues[..., -1]
    out = np.sqrt(np.maximum(lam, 0.0))
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# LU: determinant, solve, inverse


@dataclass(frozen=True)
class LU:
    lu: np.ndarray  # (B, n, n) packed unit-lower / upper factors
    perm: np.ndarray  # (B, n) row permutation
    sign: np.ndarray  # (B,) permutation parity
    singular: np.ndarray  # (B,) tiny pivot encountered
    norm_inf: np.ndarray  # (B,)


def lu_factor(A) -> LU:
    a = as_cmatrix(A, square=True).reshape((-1,) + np.shape(A)[-2:]).copy()
    bsz, n = a.shape[0], a.shape[-1]
    ar = np.arange(bsz)
    perm = np.tile(np.arange(n), (bsz, 1))
    sign = np.ones(bsz)
    norm_inf = np.max(np.sum(np.abs(a), axis=2), axis=1) if n else np.zeros(bsz)
    singular = np.zeros(bsz, dtype=bool)
    for k in range(n):
        piv = k + np.argmax(np.abs(a[:, k:, k]), axis=1)
        swap = piv != k
        if np.any(swap):
            rows_k = a[ar, k].copy()
            a[ar, k] = a[ar, piv]
            a[ar, piv] = rows_k
            pk = perm[ar, k].copy()
            perm[ar, k] = perm[ar, piv]
            perm[ar, piv] = pk
            sign = np.where(swap, -sign, sign)
        pivot = a[:, k, k]
        tiny = np.abs(pivot) <= PIVOT_TOL * np.maximum(norm_inf, 1e-300)
        singular |= tiny
        safe = np.where(np.abs(pivot) > 0, pivot, 1.0)
        l = np.where(np.abs(pivot)[:, None] > 0, a[:, k + 1:, k] / safe[:, None], 0.0)
        a[:, k + 1:, k] = l
        a[:, k + 1:, k + 1:] -= l[:, :, None] * a[:, k, None, k + 1:]
    return LU(a, perm, sign, singular, norm_inf)


def det(A) -> np.ndarray | complex:
    """Determinant by partial-pivot LU; zero is a legitimate result."""
    a = as_cmatrix(A, square=True)
    batch = a.shape[:-2]
    if a.shape[-1] == 0:
        out = np.ones(batch, dtype=complex)
        return out if batch else complex(out)
    f = lu_factor(a)
    d = f.sign * np.prod(np.diagonal(f.lu, axis1=1, axis2=2), axis=1)
    d = d.reshape(batch)
    return d if batch else complex(d)


def _lu_solve(f: LU, b: np.ndarray) -> np.ndarray:
    """Solve with packed factors; b is (B, n, m)."""
    n = f.lu.shape[-1]
    ar = np.arange(b.shape[0])[:, None]
    x = b[ar, f.perm].copy()
    for k in range(n):
        x[:, k + 1:, :] -= f.lu[:, k + 1:, k, None] * x[:, k, None, :]
    for k in range(n - 1, -1, -1):
        x[:, k, :] /= f.lu[:, k, k, None]
        if k:
            x[:, :k, :] -= f.lu[:, :k, k, None] * x[:, k, None, :]
    return x


def _norm1(a: np.ndarray) -> np.ndarray:
    return np.max(np.sum(np.abs(a), axis=-2), axis=-1)


def solve(A, B, cond_cap: float = COND_CAP) -> np.ndarray:
    """Solve A X = B for a stack; raises SingularPencil on tiny pivots."""
    a = as_cmatrix(A, square=True)
    b = np.asarray(B, dtype=complex)
    vec = b.ndim == a.ndim - 1
    if vec:
        b = b[..., None]
    batch = np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    n = a.shape[-1]
    a2 = np.broadcast_to(a, batch + (n, n)).reshape((-1, n, n))
    b2 = np.broadcast_to(b, batch + b.shape[-2:]).reshape((-1,) + b.shape[-2:])
    f = lu_factor(a2)
    if np.any(f.singular):
        raise SingularPencil("matrix is numerically singular (tiny LU pivot)")
    x = _lu_solve(f, b2.astype(complex))
    x = x.reshape(batch + b.shape[-2:])
    return x[..., 0] if vec else x


def inv(A, cond_cap: float = COND_CAP) -> np.ndarray:
    """Inverse with a 1-norm condition check against ``cond_cap``."""
    a = as_cmatrix(A, square=True)
    batch = a.shape[:-2]
    n = a.shape[-1]
    a2 = a.reshape((-1, n, n))
    f = lu_factor(a2)
    if np.any(f.singular):
        raise SingularPencil("matrix is numerically singular (tiny LU pivot)")
    x = _lu_solve(f, np.tile(np.eye(n, dtype=complex), (a2.shape[0], 1, 1)))
    cond = _norm1(a2) * _norm1(x)
    if np.any(cond > cond_cap):
        raise SingularPencil(f"condition estimate {cond.max():.3e} exceeds cap {cond_cap:.1e}")
    return x.reshape(batch + (n, n))


# ---------------------------------------------------------------------------
# Cayley transforms and Schur complements


def matrix_cayley(X, cond_cap: float = COND_CAP) -> np.ndarray:
    """phi(X) = i (I + X)(I - X)^{-1}."""
    x = as_cmatrix(X, square=True)
    e = eye_like(x)
    return 1j * (e + x) @ inv(e - x, cond_cap)


def matrix_cayley_inv(W, cond_cap: float = COND_CAP) -> np.ndarray:
    """phi^{-1}(W) = (W - iI)(W + iI)^{-1}."""
    w = as_cmatrix(W, square=True)
    e = eye_like(w)
    return (w - 1j * e) @ inv(w + 1j * e, cond_cap)


def _as_index(block, n: int) -> np.ndarray:
    if isinstance(block, slice):
        return np.arange(n)[block]
    return np.asarray(block, dtype=int)


def schur_complement(M, block: slice | Sequence[int], cond_cap: float = COND_CAP) -> np.ndarray:
    """Complement of the ``block`` (indices of D) in M: A - B D^{-1} C.

    A is the principal submatrix on the remaining indices, in their original
    order.  Raises SingularBlock when D cannot be inverted.
    """
    m = as_cmatrix(M, square=True)
    n = m.shape[-1]
    d_idx = _as_index(block, n)
    keep = np.setdiff1d(np.arange(n), d_idx)
    a = m[..., keep[:, None], keep]
    b = m[..., keep[:, None], d_idx]
    c = m[..., d_idx[:, None], keep]
    d = m[..., d_idx[:, None], d_idx]
    try:
        return a - b @ solve(d, c, cond_cap)
    except SingularPencil as exc:
        raise SingularBlock(str(exc)) from exc


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Unitary from the Cayley transform of a random Hermitian matrix."""
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = (g + adjoint(g)) / 2
    return matrix_cayley_inv(h)


def random_contraction(n: int, norm: float, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Random complex matrix rescaled to operator norm exactly ``norm``."""
    shape = (n, n) if size is None else (size, n, n)
    g = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    s = np.asarray(op_norm(g))
    s = np.where(s > 0, s, 1.0)
    return g * (norm / s)[..., None, None] if size is not None else g * (norm / s)
