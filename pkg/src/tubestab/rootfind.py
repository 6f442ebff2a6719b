"""Univariate roots, half-plane classification and interlacing.

Roots are computed by Aberth-Ehrlich simultaneous iteration.  Approximations
whose inclusion disks overlap are merged into one cluster whose size is the
multiplicity, so exact multiple roots come back as a single location.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, NotRealCoefficient, ZeroPolynomial
from .mvpoly import MultiPoly

EPS = np.finfo(float).eps
STABILITY_BAND = 1e-9
REAL_BAND = 1e-6
TIE_TOL = 1e-7
MAX_ITER = 500


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray  # cluster locations
    multiplicities: np.ndarray
    residual: float  # max |p(root)| / sum |c_k||root|^k

    @property
    def degree(self) -> int:
        return int(np.sum(self.multiplicities))

    def expanded(self) -> np.ndarray:
        return np.repeat(self.roots, self.multiplicities)


def _coeffs(p) -> np.ndarray:
    if isinstance(p, MultiPoly):
        c = p.univariate_coeffs()
    else:
        c = np.asarray(p, dtype=complex).ravel()
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise ZeroPolynomial("the zero polynomial has no finite root set")
    return c[: nz[-1] + 1]


def _horner(c_desc: np.ndarray, z: np.ndarray):
    """p(z), p'(z) and sum |c_k||z|^k for descending coefficients."""
    p = np.zeros_like(z) + c_desc[0]
    dp = np.zeros_like(z)
    s = np.zeros(z.shape) + abs(c_desc[0])
    az = np.abs(z)
    for c in c_desc[1:]:
        dp = dp * z + p
        p = p * z + c
        s = s * az + abs(c)
    return p, dp, s


def _initial(c: np.ndarray) -> np.ndarray:
    """Points on a circle about the root centroid, radius from the Fujiwara bound."""
    n = c.size - 1
    an = c[-1]
    center = -c[-2] / (n * an)
    bound = 2 * max(abs(c[n - k] / an) ** (1.0 / k) for k in range(1, n + 1))
    rad = max(0.5 * bound, 1e-300)
    ang = 2 * np.pi * np.arange(n) / n + 0.4
    return center + rad * np.exp(1j * ang)


def _aberth(c: np.ndarray, max_iter: int) -> np.ndarray:
    n = c.size - 1
    c_desc = c[::-1]
    if n == 1:
        return np.array([-c[0] / c[1]])
    z = _initial(c)
    frozen = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        p, dp, s = _horner(c_desc, z)
        frozen |= np.abs(p) <= 4 * n * EPS * s
        if np.all(frozen):
            break
        act = ~frozen
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        sums = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            w = ratio / (1 - ratio * sums)
        bad = ~np.isfinite(w)
        w[bad] = 1e-3 * (1 + np.abs(z[bad]))
        z = np.where(act, z - w, z)
    else:
        p, dp, s = _horner(c_desc, z)
        if np.any(np.abs(p) > 1e3 * n * EPS * s):
            raise NoConvergence(f"Aberth iteration did not converge in {max_iter} steps")
    return z


def _clusters(c: np.ndarray, z: np.ndarray, cluster_tol: float) -> list[list[int]]:
    n = z.size
    if n == 1:
        return [[0]]
    p, _, s = _horner(c[::-1], z)
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    denom = np.abs(c[-1]) * np.abs(np.prod(diff, axis=1))
    eff = np.maximum(np.abs(p), EPS * s)
    with np.errstate(divide="ignore"):
        rad = np.where(denom > 0, n * eff / denom, np.inf)
    dist = np.abs(z[:, None] - z[None, :])
    scale = np.maximum(1.0, np.abs(z))
    link = (dist <= rad[:, None] + rad[None, :]) | (dist <= cluster_tol * np.maximum(scale[:, None], scale[None, :]))
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if link[i, j]:
                parent[find(i)] = find(j)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def roots(p, tol: float = 1e-12, cluster_tol: float = 1e-10, max_iter: int = MAX_ITER) -> RootSet:
    """All roots of a univariate polynomial, clustered with multiplicities.

    Nonzero constants have an empty root set.  Exact zero roots (vanishing
    trailing coefficients) are split off before iterating.
    """
    c = _coeffs(p)
    n = c.size - 1
    if n == 0:
        return RootSet(np.zeros(0, dtype=complex), np.zeros(0, dtype=int), 0.0)
    m0 = int(np.argmax(c != 0))
    core = c[m0:]
    locs: list = []
    mults: list = []
    if m0:
        locs.append(0j)
        mults.append(m0)
    if core.size > 1:
        z = _aberth(core, max_iter)
        for grp in _clusters(core, z, cluster_tol):
            loc = _polish(_derivative(core, len(grp) - 1), np.mean(z[grp]))
            locs.append(complex(loc))
            mults.append(len(grp))
    locs_a = np.array(locs, dtype=complex)
    order = np.lexsort((locs_a.imag, locs_a.real))
    locs_a = locs_a[order]
    mult_a = np.array(mults, dtype=int)[order]
    pv, _, s = _horner(c[::-1], locs_a)
    res = float(np.max(np.abs(pv) / np.maximum(s, 1e-300))) if locs_a.size else 0.0
    return RootSet(locs_a, mult_a, res)


def _derivative(c: np.ndarray, m: int) -> np.ndarray:
    """Ascending coefficients of the m-th derivative."""
    for _ in range(m):
        c = c[1:] * np.arange(1, c.size)
    return c


def _polish(c: np.ndarray, z: complex, steps: int = 3) -> complex:
    if c.size < 2:
        return complex(z)
    c_desc = c[::-1]
    zz = np.array([z])
    p, dp, _ = _horner(c_desc, zz)
    for _ in range(steps):
        if dp[0] == 0:
            break
        cand = zz - p / dp
        pc, dpc, _ = _horner(c_desc, cand)
        if abs(pc[0]) >= abs(p[0]):
            break
        zz, p, dp = cand, pc, dpc
    return complex(zz[0])


def poly_from_roots(rts, lead: complex = 1.0) -> np.ndarray:
    """Ascending coefficients of lead * prod (t - r)."""
    c = np.array([lead], dtype=complex)
    for r in np.asarray(rts, dtype=complex):
        c = np.convolve(c, np.array([-r, 1.0]))
    return c


# ---------------------------------------------------------------------------
# half-plane classification


@dataclass(frozen=True)
class HurwitzVerdict:
    stable: bool
    margin: float  # max Im over roots; -inf for constants
    witness: complex | None  # a root with Im >= band when unstable
    boundary: bool  # some root within the band of the real axis
    roots: RootSet | None = None

    def __bool__(self):
        return self.stable


def is_hurwitz_stable(p, band: float = STABILITY_BAND, **kw) -> HurwitzVerdict:
    """No roots in the open upper half plane, up to ``band * max(1, |root|)``."""
    rs = roots(p, **kw)
    if rs.roots.size == 0:
        return HurwitzVerdict(True, float("-inf"), None, False, rs)
    im = rs.roots.imag
    tol = band * np.maximum(1.0, np.abs(rs.roots))
    bad = im >= tol
    k = int(np.argmax(im))
    return HurwitzVerdict(
        stable=not bool(np.any(bad)),
        margin=float(im[k]),
        witness=complex(rs.roots[k]) if np.any(bad) else None,
        boundary=bool(np.any(np.abs(im) < tol)),
        roots=rs,
    )


# ---------------------------------------------------------------------------
# real-rootedness and interlacing


@dataclass(frozen=True)
class InterlacingVerdict:
    verdict: str  # "strict" | "weak" | "fails"
    witness: tuple | None = None
    reason: str = ""
    r_roots: np.ndarray = field(default_factory=lambda: np.zeros(0))
    q_roots: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def passed(self) -> bool:
        return self.verdict != "fails"


def _real_coeffs(p, name: str) -> np.ndarray:
    c = _coeffs(p)
    scale = np.max(np.abs(c))
    if np.any(np.abs(c.imag) > 1e-12 * scale):
        raise NotRealCoefficient(f"{name} has non-real coefficients")
    return c.real.astype(complex)


def _real_roots(c: np.ndarray, real_band: float):
    """Sorted real parts of all roots, or the first non-real root."""
    if c.size == 1:
        return np.zeros(0), None
    rs = roots(c)
    bad = np.abs(rs.roots.imag) > real_band * np.maximum(1.0, np.abs(rs.roots))
    if np.any(bad):
        return None, complex(rs.roots[np.argmax(bad)])
    return np.sort(rs.expanded().real), None


def _alternate(a: np.ndarray, b: np.ndarray, tie: float):
    """Check a_1 <= b_1 <= a_2 <= ... with len(a) in {len(b), len(b) + 1}.

    Returns (ok, strict, witness).
    """
    seq = np.empty(a.size + b.size)
    seq[0::2] = a
    seq[1::2] = b
    strict = True
    for i in range(seq.size - 1):
        gap = seq[i + 1] - seq[i]
        lim = tie * max(1.0, abs(seq[i]), abs(seq[i + 1]))
        if gap < -lim:
            return False, False, tuple(sorted((float(seq[i]), float(seq[i + 1]))))
        if gap <= lim:
            strict = False
    return True, strict, None


def real_rooted_and_interlace(r, q, real_band: float = REAL_BAND, tie_tol: float = TIE_TOL) -> InterlacingVerdict:
    """Real-rootedness of r and q and alternation of their sorted roots.

    A constant factor is treated as interlacing weakly with anything real
    rooted of degree at most one.
    """
    cr = _real_coeffs(r, "r")
    cq = _real_coeffs(q, "q")
    ra, wr = _real_roots(cr, real_band)
    if ra is None:
        return InterlacingVerdict("fails", (wr, np.conj(wr)), "r has a non-real root")
    qa, wq = _real_roots(cq, real_band)
    if qa is None:
        return InterlacingVerdict("fails", (wq, np.conj(wq)), "q has a non-real root", ra)
    if abs(ra.size - qa.size) > 1:
        return InterlacingVerdict("fails", None, f"degrees {ra.size} and {qa.size} differ by more than one", ra, qa)
    if ra.size == 0 or qa.size == 0:
        return InterlacingVerdict("weak", None, "constant factor", ra, qa)
    if ra.size > qa.size:
        orders = [(ra, qa)]
    elif qa.size > ra.size:
        orders = [(qa, ra)]
    else:
        orders = [(ra, qa), (qa, ra)]
    first_witness = None
    for a, b in orders:
        ok, strict, wit = _alternate(a, b, tie_tol)
        if ok:
            return InterlacingVerdict("strict" if strict else "weak", None, "", ra, qa)
        first_witness = first_witness or wit
    return InterlacingVerdict("fails", first_witness, "roots do not alternate", ra, qa)
