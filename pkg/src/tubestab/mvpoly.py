"""Sparse multivariable polynomials with complex coefficients.

A :class:`MultiPoly` is an immutable map from exponent tuples to complex
coefficients.  Besides ring arithmetic it supports the manipulations the
stability pipeline needs: homogeneous parts, homogenization, real/imaginary
splitting, restriction to complex lines, Moebius substitution with exact
denominator clearing, and tensor-grid interpolation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import DegreeTooSmall, DimMismatch, DuplicateNodes, SchemaError
from . import numkernel as nk

PRUNE_REL = 1e-12
SCHEMA = "tubestab/1"

Exp = tuple


def _prune(terms: dict, rel: float) -> dict:
    if not terms:
        return terms
    cmax = max(abs(c) for c in terms.values())
    cut = rel * cmax
    return {e: c for e, c in terms.items() if abs(c) > cut}


@dataclass(frozen=True, eq=False)
class MultiPoly:
    nvars: int
    terms: Mapping[Exp, complex]

    def __post_init__(self):
        clean = {}
        for e, c in dict(self.terms).items():
            e = tuple(int(k) for k in e)
            if len(e) != self.nvars:
                raise DimMismatch(f"exponent {e} does not have length {self.nvars}")
            if any(k < 0 for k in e):
                raise ValueError(f"negative exponent {e}")
            c = complex(c)
            if not np.isfinite(c):
                raise ValueError("non-finite coefficient")
            if c != 0:
                clean[e] = clean.get(e, 0) + c
        object.__setattr__(self, "terms", {e: clean[e] for e in sorted(clean) if clean[e] != 0})

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c: complex) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, j: int) -> "MultiPoly":
        e = [0] * nvars
        e[j] = 1
        return cls(nvars, {tuple(e): 1.0})

    @classmethod
    def from_univariate(cls, coeffs: Sequence[complex]) -> "MultiPoly":
        """From ascending coefficients c_0, c_1, ..."""
        return cls(1, {(k,): c for k, c in enumerate(coeffs)})

    # -- basic data --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def multidegree(self) -> tuple:
        if not self.terms:
            return (0,) * self.nvars
        return tuple(int(max(e[j] for e in self.terms)) for j in range(self.nvars))

    def coefficient(self, exp: Iterable[int]) -> complex:
        return self.terms.get(tuple(exp), 0j)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def exps_coeffs(self):
        if not self.terms:
            return np.zeros((0, self.nvars), dtype=int), np.zeros(0, dtype=complex)
        exps = np.array(list(self.terms.keys()), dtype=int).reshape(-1, self.nvars)
        coeffs = np.array(list(self.terms.values()), dtype=complex)
        return exps, coeffs

    # -- arithmetic --------------------------------------------------------
    def _check(self, other: "MultiPoly"):
        if other.nvars != self.nvars:
            raise DimMismatch(f"nvars {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(self.nvars, complex(other))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.nvars, _prune(out, PRUNE_REL))

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.nvars, _prune(out, PRUNE_REL))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = MultiPoly.constant(self.nvars, 1.0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c: complex) -> "MultiPoly":
        c = complex(c)
        return MultiPoly(self.nvars, {e: c * v for e, v in self.terms.items()})

    def conj(self) -> "MultiPoly":
        """Conjugate the coefficients (not the variables)."""
        return MultiPoly(self.nvars, {e: np.conj(c) for e, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, MultiPoly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, tuple(self.terms.items())))

    def allclose(self, other: "MultiPoly", tol: float = 1e-9, relative: bool = True) -> bool:
        return self.max_coeff_diff(other, relative) <= tol

    def max_coeff_diff(self, other: "MultiPoly", relative: bool = True) -> float:
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        if not keys:
            return 0.0
        diff = max(abs(self.coefficient(e) - other.coefficient(e)) for e in keys)
        if relative:
            diff /= max(self.max_abs_coeff(), other.max_abs_coeff(), 1e-300)
        return diff

    def __repr__(self):
        body = " + ".join(f"({c:.6g})*{list(e)}" for e, c in self.terms.items()) or "0"
        return f"MultiPoly(nvars={self.nvars}: {body})"

    # -- evaluation --------------------------------------------------------
    def __call__(self, z):
        return evaluate(self, z)

    def derivative(self, j: int) -> "MultiPoly":
        out = {}
        for e, c in self.terms.items():
            if e[j]:
                f = list(e)
                f[j] -= 1
                out[tuple(f)] = c * e[j]
        return MultiPoly(self.nvars, out)

    def univariate_coeffs(self) -> np.ndarray:
        """Ascending dense coefficients of a univariate polynomial."""
        if self.nvars != 1:
            raise DimMismatch("univariate_coeffs needs nvars == 1")
        n = max(self.degree, 0)
        out = np.zeros(n + 1, dtype=complex)
        for (k,), c in self.terms.items():
            out[k] = c
        return out

    # -- JSON --------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "nvars": self.nvars,
            "terms": [{"exp": list(e), "re": float(c.real), "im": float(c.imag)} for e, c in self.terms.items()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MultiPoly":
        try:
            nv = int(obj["nvars"])
            terms: dict = {}
            for t in obj["terms"]:
                e = tuple(int(k) for k in t["exp"])
                terms[e] = terms.get(e, 0) + complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed polynomial JSON: {exc}") from exc
        return cls(nv, terms)


# ---------------------------------------------------------------------------
# evaluation


def evaluate(p: MultiPoly, z) -> np.ndarray | complex:
    """Evaluate at one point (shape (d,)) or a batch (shape (M, d)).

    Powers of each coordinate are tabulated by repeated multiplication and
    each term is multiplied out separately.
    """
    z = np.asarray(z, dtype=complex)
    single = z.ndim == 1
    if single:
        z = z[None, :]
    if z.shape[-1] != p.nvars:
        raise DimMismatch(f"point has {z.shape[-1]} coordinates, polynomial has {p.nvars} variables")
    exps, coeffs = p.exps_coeffs()
    m = z.shape[0]
    if not len(coeffs):
        out = np.zeros(m, dtype=complex)
    else:
        maxdeg = int(exps.max()) if exps.size else 0
        pw = np.ones((m, p.nvars, maxdeg + 1), dtype=complex)
        for k in range(1, maxdeg + 1):
            pw[:, :, k] = pw[:, :, k - 1] * z
        mon = np.ones((m, len(coeffs)), dtype=complex)
        for j in range(p.nvars):
            mon *= pw[:, j, exps[:, j]]
        out = mon @ coeffs
    return complex(out[0]) if single else out


def abs_scale(p: MultiPoly, z) -> np.ndarray | float:
    """sum_k |c_k| |z^{e_k}|, the natural scale for a backward-error test."""
    q = MultiPoly(p.nvars, {e: abs(c) for e, c in p.terms.items()})
    out = evaluate(q, np.abs(np.asarray(z, dtype=complex)))
    return np.real(out) if np.ndim(out) else float(np.real(out))


# ---------------------------------------------------------------------------
# degree structure


def homogeneous_part(p: MultiPoly, i: int) -> MultiPoly:
    return MultiPoly(p.nvars, {e: c for e, c in p.terms.items() if sum(e) == i})


def homogenize(p: MultiPoly, degree: int | None = None) -> MultiPoly:
    """P(mu0, z) = mu0^n p(z / mu0); mu0 is variable 0 of the result."""
    n = p.degree if degree is None else degree
    n = max(n, 0)
    if p.degree > n:
        raise DegreeTooSmall(f"degree {n} below total degree {p.degree}")
    return MultiPoly(p.nvars + 1, {(n - sum(e),) + e: c for e, c in p.terms.items()})


def dehomogenize(P: MultiPoly) -> MultiPoly:
    """Set mu0 = 1 (variable 0)."""
    out: dict = {}
    for e, c in P.terms.items():
        out[e[1:]] = out.get(e[1:], 0) + c
    return MultiPoly(P.nvars - 1, _prune(out, PRUNE_REL))


def real_imag_split(p: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    """p = r + i q with r, q real-coefficient polynomials."""
    r = MultiPoly(p.nvars, {e: c.real for e, c in p.terms.items()})
    q = MultiPoly(p.nvars, {e: c.imag for e, c in p.terms.items()})
    return r, q


def is_real(p: MultiPoly, rel: float = 1e-12) -> bool:
    scale = max(p.max_abs_coeff(), 1e-300)
    return all(abs(c.imag) <= rel * scale for c in p.terms.values())


# ---------------------------------------------------------------------------
# line restriction


def _binom_row(x: complex, y: complex, e: int) -> np.ndarray:
    """Coefficients of (x + t y)^e in ascending powers of t."""
    k = np.arange(e + 1)
    return np.array([comb(e, int(j)) for j in k], dtype=float) * (x ** (e - k)) * (y ** k)


def line_restrict(p: MultiPoly, x, y) -> MultiPoly:
    """The univariate polynomial t -> p(x + t y), expanded term by term."""
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    if x.size != p.nvars or y.size != p.nvars:
        raise DimMismatch("line direction/base length must equal nvars")
    n = max(p.degree, 0)
    out = np.zeros(n + 1, dtype=complex)
    cache: dict = {}
    for e, c in p.terms.items():
        row = np.array([c], dtype=complex)
        for j, ej in enumerate(e):
            if ej == 0:
                continue
            key = (j, ej)
            if key not in cache:
                cache[key] = _binom_row(x[j], y[j], ej)
            row = np.convolve(row, cache[key])
        out[: row.size] += row
    return MultiPoly(1, _prune({(k,): c for k, c in enumerate(out)}, PRUNE_REL))


# ---------------------------------------------------------------------------
# Moebius substitution


def _dense_to_poly(t: np.ndarray) -> MultiPoly:
    idx = np.nonzero(t)
    terms = {tuple(int(a[k]) for a in idx): t[tuple(a[k] for a in idx)] for k in range(len(idx[0]))}
    return MultiPoly(t.ndim, _prune(terms, PRUNE_REL))


def _poly_to_dense(p: MultiPoly, shape) -> np.ndarray:
    t = np.zeros(shape, dtype=complex)
    for e, c in p.terms.items():
        t[e] += c
    return t


@lru_cache(maxsize=None)
def _mobius_factor(direction: str, e: int, n: int) -> np.ndarray:
    """Ascending coefficients of the cleared image of z^e under degree budget n."""
    if direction == "disc_to_halfplane":
        num = np.array([1j, 1j])  # i(1 + z)
        den = np.array([1.0, -1.0])  # 1 - z
    elif direction == "halfplane_to_disc":
        num = np.array([-1j, 1.0])  # z - i
        den = np.array([1j, 1.0])  # z + i
    else:
        raise ValueError(f"unknown direction {direction!r}")
    row = np.array([1.0 + 0j])
    for _ in range(e):
        row = np.convolve(row, num)
    for _ in range(n - e):
        row = np.convolve(row, den)
    row.setflags(write=False)
    return row


def mobius_substitute(p: MultiPoly, degrees: Sequence[int], direction: str) -> MultiPoly:
    """Substitute z_j -> phi(z_j) (or phi^{-1}) and clear denominators.

    ``disc_to_halfplane``: p(i(1+z)/(1-z)) * prod (1 - z_j)^{n_j}.
    ``halfplane_to_disc``: p((z-i)/(z+i)) * prod (z_j + i)^{n_j}.
    """
    degrees = tuple(int(n) for n in degrees)
    if len(degrees) != p.nvars:
        raise DimMismatch("degree vector length must equal nvars")
    md = p.multidegree()
    if any(m > n for m, n in zip(md, degrees)):
        raise DegreeTooSmall(f"degree bounds {degrees} do not dominate multidegree {md}")
    shape = tuple(n + 1 for n in degrees)
    out = np.zeros(shape, dtype=complex)
    for e, c in p.terms.items():
        blk = np.array(c, dtype=complex)
        for j, ej in enumerate(e):
            blk = np.multiply.outer(blk, _mobius_factor(direction, ej, degrees[j]))
        out += blk
    return _dense_to_poly(out)


# ---------------------------------------------------------------------------
# interpolation


def chebyshev_nodes(m: int) -> np.ndarray:
    """m Chebyshev points of the first kind on [-1, 1]."""
    k = np.arange(m)
    return np.cos(np.pi * (2 * k + 1) / (2 * m))


def circle_nodes(m: int) -> np.ndarray:
    """m equispaced points on the unit circle, offset by half a step so 1 is never a node.

    Their Vandermonde matrix is sqrt(m) times a unitary, so monomial
    coefficients come out with condition number 1 at any degree.
    """
    return np.exp(2j * np.pi * (np.arange(m) + 0.5) / m)


NODE_KINDS = {"circle": circle_nodes, "chebyshev": chebyshev_nodes}


def grid_nodes(degrees: Sequence[int], kind: str = "circle") -> list[np.ndarray]:
    return [NODE_KINDS[kind](int(n) + 1) for n in degrees]


def grid_points(degrees: Sequence[int], nodes: Sequence[np.ndarray] | None = None) -> np.ndarray:
    """All tensor-grid points, shape (prod(n_j+1), d), in C order."""
    nodes = grid_nodes(degrees) if nodes is None else nodes
    if not nodes:
        return np.zeros((1, 0), dtype=complex)
    mesh = np.meshgrid(*nodes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1).astype(complex)


def sample_on_grid(f: Callable[[np.ndarray], np.ndarray], degrees: Sequence[int], nodes=None) -> np.ndarray:
    pts = grid_points(degrees, nodes)
    vals = np.asarray(f(pts), dtype=complex)
    return vals.reshape(tuple(int(n) + 1 for n in degrees))


def interpolate_from_grid(values, degrees: Sequence[int], nodes: Sequence[np.ndarray] | None = None) -> MultiPoly:
    """Unique polynomial of multidegree <= degrees matching values on the grid.

    The tensor-product Vandermonde system is solved one axis at a time.
    """
    degrees = tuple(int(n) for n in degrees)
    vals = np.asarray(values, dtype=complex)
    shape = tuple(n + 1 for n in degrees)
    if vals.shape != shape:
        raise DimMismatch(f"value tensor shape {vals.shape} does not match grid {shape}")
    nodes = grid_nodes(degrees) if nodes is None else [np.asarray(x, dtype=complex) for x in nodes]
    coef = vals
    for axis, x in enumerate(nodes):
        if x.size != shape[axis]:
            raise DimMismatch(f"axis {axis}: {x.size} nodes for degree {degrees[axis]}")
        gaps = np.abs(x[:, None] - x[None, :]) + np.eye(x.size)
        if x.size > 1 and gaps.min() <= 1e-14 * max(1.0, np.abs(x).max()):
            raise DuplicateNodes(f"axis {axis} has coincident nodes")
        vand = x[:, None] ** np.arange(x.size)[None, :]
        vinv = nk.inv(vand, cond_cap=1e16)
        coef = np.moveaxis(np.tensordot(vinv, np.moveaxis(coef, axis, 0), axes=(1, 0)), 0, axis)
    return _dense_to_poly(coef)


# ---------------------------------------------------------------------------
# symbolic determinant of a linear matrix pencil (oracle for interpolation)


def det_of_linear_pencil(mats: Sequence[np.ndarray], nvars: int) -> MultiPoly:
    """det(M_0 + sum_j z_j M_j) by Laplace expansion along rows.

    ``mats[0]`` is the constant part and ``mats[j]`` the coefficient of
    z_j.  Minors are memoized by their column subset so the cost is
    O(n 2^n) polynomial products rather than n!.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    n = mats[0].shape[0]
    entries = [[MultiPoly(nvars, {(0,) * nvars: mats[0][i, j], **{
        tuple(1 if k == v else 0 for k in range(nvars)): mats[v + 1][i, j] for v in range(nvars)}})
        for j in range(n)] for i in range(n)]
    memo: dict = {(): MultiPoly.constant(nvars, 1.0)}

    def minor(cols: tuple) -> MultiPoly:
        # determinant of rows n-len(cols).. n-1 restricted to ``cols``
        if cols in memo:
            return memo[cols]
        row = n - len(cols)
        acc = MultiPoly.zero(nvars)
        for pos, c in enumerate(cols):
            entry = entries[row][c]
            if entry.is_zero():
                continue
            rest = cols[:pos] + cols[pos + 1:]
            term = entry * minor(rest)
            acc = acc + term if pos % 2 == 0 else acc - term
        memo[cols] = acc
        return acc

    return minor(tuple(range(n)))


def naive_eval(p: MultiPoly, z) -> complex:
    """Reference evaluator: sum of c * prod z_j ** e_j with Python powers."""
    total = 0j
    for e, c in p.terms.items():
        m = c
        for zj, ej in zip(z, e):
            m *= complex(zj) ** ej
        total += m
    return total


def random_poly(rng: np.random.Generator, nvars: int, degree: int, nterms: int) -> MultiPoly:
    """Random complex polynomial with up to ``nterms`` monomials of total degree <= degree."""
    monos = [e for e in itertools.product(range(degree + 1), repeat=nvars) if sum(e) <= degree]
    pick = rng.choice(len(monos), size=min(nterms, len(monos)), replace=False)
    return MultiPoly(nvars, {monos[i]: complex(rng.normal(), rng.normal()) for i in pick})
