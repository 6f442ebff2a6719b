from __future__ import annotations

import numpy as np
import pytest

from tubestab import mvpoly as mv
from tubestab import numkernel as nk
from tubestab.errors import DegreeTooSmall, DimMismatch, DuplicateNodes
from tubestab.mvpoly import MultiPoly

pytest.importorskip("hypothesis")
import hypothesis as h
import hypothesis.strategies as st

from conftest import cgauss

SETTINGS = h.settings(max_examples=50, deadline=None)


@st.composite
def polys(draw, nvars_max=3, degree_max=4):
    nvars = draw(st.integers(1, nvars_max))
    degree = draw(st.integers(0, degree_max))
    nterms = draw(st.integers(1, 8))
    seed = draw(st.integers(0, 2**31 - 1))
    return mv.random_poly(np.random.default_rng(seed), nvars, degree, nterms)


def _pts(p, count=5, seed=0):
    return cgauss(np.random.default_rng(seed), (count, p.nvars), 0.7)


def test_eval_examples():
    one = MultiPoly.constant(2, 1.0)
    assert mv.evaluate(one, [0.3 + 2j, -5]) == 1
    z1z2 = MultiPoly(2, {(1, 1): 1})
    assert mv.evaluate(z1z2, [2, 3j]) == pytest.approx(6j)


def test_eval_dim_mismatch():
    with pytest.raises(DimMismatch):
        mv.evaluate(MultiPoly.variable(2, 0), [1, 2, 3])


def test_eval_matches_naive_oracle(rng):
    p = mv.random_poly(rng, 3, 4, 20)
    z = cgauss(rng, (20, 3))
    fast = mv.evaluate(p, z)
    slow = np.array([mv.naive_eval(p, zz) for zz in z])
    assert np.max(np.abs(fast - slow) / np.maximum(np.abs(slow), 1e-300)) <= 1e-12


def test_homogeneous_part_examples():
    z1, z2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    p = 1 + z1 + z1 * z2
    assert mv.homogeneous_part(p, 2) == z1 * z2
    assert mv.homogeneous_part(p, 0) == MultiPoly.constant(2, 1)
    assert mv.homogeneous_part(p, 5).is_zero()


@SETTINGS
@h.given(polys())
def test_homogeneous_parts_sum_to_p(p):
    total = MultiPoly.zero(p.nvars)
    for i in range(p.degree + 1):
        total = total + mv.homogeneous_part(p, i)
    assert total.allclose(p, 1e-14)


def test_homogenize_linear():
    z = MultiPoly.variable(1, 0)
    P = mv.homogenize(z + 1)
    assert P == MultiPoly(2, {(1, 0): 1, (0, 1): 1})


@SETTINGS
@h.given(polys())
def test_homogenize_round_trip_and_initial_form(p):
    P = mv.homogenize(p)
    assert mv.dehomogenize(P).allclose(p, 1e-14)
    z = _pts(p)
    at_zero = mv.evaluate(P, np.hstack([np.zeros((z.shape[0], 1)), z]))
    pn = mv.homogeneous_part(p, p.degree)
    np.testing.assert_allclose(at_zero, mv.evaluate(pn, z), atol=1e-12)


def test_homogenize_degree_too_small():
    with pytest.raises(DegreeTooSmall):
        mv.homogenize(MultiPoly(1, {(3,): 1}), degree=2)


def test_real_imag_split_examples():
    p = MultiPoly(1, {(1,): 1 + 2j})
    r, q = mv.real_imag_split(p)
    assert r == MultiPoly(1, {(1,): 1}) and q == MultiPoly(1, {(1,): 2})
    r, q = mv.real_imag_split(MultiPoly(2, {(1, 0): 3.0, (0, 0): -1.0}))
    assert q.is_zero() and mv.is_real(r)


@SETTINGS
@h.given(polys())
def test_real_imag_recombination(p):
    r, q = mv.real_imag_split(p)
    assert r + q.scale(1j) == p


def test_line_restrict_examples():
    z1 = MultiPoly.variable(2, 0)
    assert mv.line_restrict(z1, [1, 0], [0, 1]) == MultiPoly(1, {(0,): 1})
    z1z2 = MultiPoly(2, {(1, 1): 1})
    assert mv.line_restrict(z1z2, [0, 0], [1, 1]) == MultiPoly(1, {(2,): 1})


@SETTINGS
@h.given(polys(), st.integers(0, 1000))
def test_line_restrict_matches_evaluation(p, seed):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=p.nvars), rng.normal(size=p.nvars)
    f = mv.line_restrict(p, x, y)
    t = rng.normal(size=20)
    direct = mv.evaluate(p, x[None, :] + t[:, None] * y[None, :])
    via = mv.evaluate(f, t[:, None])
    scale = np.maximum(1.0, mv.abs_scale(p, x[None, :] + t[:, None] * y[None, :]))
    assert np.max(np.abs(direct - via) / scale) <= 1e-11


@SETTINGS
@h.given(polys(), st.integers(0, 1000))
def test_initial_form_scaling_along_lines(p, seed):
    rng = np.random.default_rng(seed)
    pn = mv.homogeneous_part(p, p.degree)
    y = rng.normal(size=p.nvars)
    f = mv.line_restrict(pn, np.zeros(p.nvars), y)
    expect = MultiPoly(1, {(p.degree,): mv.evaluate(pn, y)})
    assert f.max_coeff_diff(expect, relative=False) <= 1e-10 * max(1.0, pn.max_abs_coeff() * (1 + np.abs(y).max()) ** p.degree)


def test_mobius_examples():
    one = MultiPoly.constant(1, 1)
    assert mv.mobius_substitute(one, [0], "disc_to_halfplane") == one
    z = MultiPoly.variable(1, 0)
    assert mv.mobius_substitute(z, [1], "disc_to_halfplane") == MultiPoly(1, {(0,): 1j, (1,): 1j})
    with pytest.raises(DegreeTooSmall):
        mv.mobius_substitute(z * z, [1], "disc_to_halfplane")
    with pytest.raises(ValueError):
        mv.mobius_substitute(z, [1], "sideways")


@SETTINGS
@h.given(polys(nvars_max=3, degree_max=3))
def test_double_mobius_scales_by_power_of_two(p):
    degrees = p.multidegree()
    there = mv.mobius_substitute(p, degrees, "disc_to_halfplane")
    back = mv.mobius_substitute(there, degrees, "halfplane_to_disc")
    c = (2j) ** sum(degrees)
    assert back.allclose(p.scale(c), 1e-11)


def test_mobius_matches_pointwise_substitution(rng):
    p = mv.random_poly(rng, 2, 3, 6)
    degrees = (3, 3)
    pt = mv.mobius_substitute(p, degrees, "disc_to_halfplane")
    u = cgauss(rng, (10, 2), 0.3)
    w = 1j * (1 + u) / (1 - u)
    expect = mv.evaluate(p, w) * np.prod((1 - u) ** np.array(degrees), axis=1)
    np.testing.assert_allclose(mv.evaluate(pt, u), expect, rtol=1e-10)


def test_interpolation_examples():
    const = np.full((3, 2), 2.5 + 0j)
    assert mv.interpolate_from_grid(const, [2, 1]).allclose(MultiPoly.constant(2, 2.5), 1e-14)
    target = MultiPoly(2, {(2, 0): 1, (0, 1): 1})
    vals = mv.sample_on_grid(lambda z: mv.evaluate(target, z), [2, 1])
    assert mv.interpolate_from_grid(vals, [2, 1]).allclose(target, 1e-13)


def test_interpolation_duplicate_nodes():
    nodes = [np.array([0.0, 0.0, 1.0])]
    with pytest.raises(DuplicateNodes):
        mv.interpolate_from_grid(np.ones(3), [2], nodes)


@pytest.mark.parametrize("kind", sorted(mv.NODE_KINDS))
def test_interpolation_identity_within_multidegree(rng, kind):
    p = mv.random_poly(rng, 3, 5, 15)
    degrees = p.multidegree()
    nodes = mv.grid_nodes(degrees, kind)
    vals = mv.sample_on_grid(lambda z: mv.evaluate(p, z), degrees, nodes)
    assert mv.interpolate_from_grid(vals, degrees, nodes).allclose(p, 1e-10)


def test_circle_nodes_give_unitary_vandermonde():
    x = mv.circle_nodes(9)
    V = x[:, None] ** np.arange(9)[None, :]
    np.testing.assert_allclose(V.conj().T @ V, 9 * np.eye(9), atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_pencil_determinant_interpolation_vs_cofactor(seed):
    rng = np.random.default_rng(seed)
    N = [int(v) for v in rng.integers(1, 3, size=3)]
    size = sum(N)
    K = nk.random_contraction(size, 0.8, rng)
    mats = [np.eye(size, dtype=complex)]
    o = 0
    for nj in N:
        D = np.zeros((size, size))
        D[o:o + nj, o:o + nj] = np.eye(nj)
        mats.append(-K @ D)
        o += nj
    symbolic = mv.det_of_linear_pencil(mats, len(N))

    def f(z):
        return nk.det(mats[0] + np.einsum("mj,jab->mab", z, np.array(mats[1:])))

    vals = mv.sample_on_grid(f, N)
    assert mv.interpolate_from_grid(vals, N).max_coeff_diff(symbolic) <= 1e-9


def test_ring_plumbing():
    z1, z2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    p = (z1 + 2j) * (z2 - 1)
    assert p.multidegree() == (1, 1)
    assert p.degree == 2
    assert p.coefficient((0, 0)) == -2j
    assert p.conj().coefficient((0, 0)) == 2j
    assert (p - p).is_zero()
    assert p.scale(2) == p + p
    assert (z1 ** 3).coefficient((3, 0)) == 1
    assert MultiPoly.from_json(p.to_json()) == p
    with pytest.raises(DimMismatch):
        p + MultiPoly.variable(3, 0)


@SETTINGS
@h.given(polys(nvars_max=2, degree_max=3), polys(nvars_max=2, degree_max=3), polys(nvars_max=2, degree_max=3))
def test_mul_commutative_and_associative(a, b, c):
    h.assume(a.nvars == b.nvars == c.nvars)
    assert (a * b).allclose(b * a, 1e-12)
    assert ((a * b) * c).allclose(a * (b * c), 1e-12)
