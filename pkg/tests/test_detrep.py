from __future__ import annotations

import numpy as np
import pytest

from tubestab import cayley as cy
from tubestab import detrep as dr
from tubestab import domains as dm
from tubestab import mvpoly as mv
from tubestab import numkernel as nk
from tubestab import rootfind as rf
from tubestab.detrep import DetRep
from tubestab.domains import DomainSpec
from tubestab.errors import GridTooLarge, NotContraction, SchemaError
from tubestab.mvpoly import MultiPoly

pytest.importorskip("hypothesis")
import hypothesis as h
import hypothesis.strategies as st

from conftest import cgauss

SETTINGS = h.settings(max_examples=20, deadline=None)


@st.composite
def contraction_cases(draw, total_max=6, d_max=3):
    d = draw(st.integers(1, d_max))
    N = draw(st.lists(st.integers(1, 2), min_size=d, max_size=d).filter(lambda v: sum(v) <= total_max))
    seed = draw(st.integers(0, 2**31 - 1))
    norm = draw(st.floats(0.05, 0.9))
    K = nk.random_contraction(sum(N), norm, np.random.default_rng(seed))
    return K, N


def _hadamard_ratio(M):
    rows = np.prod(np.linalg.norm(M, axis=-1), axis=-1)
    return np.abs(nk.det(M)) / rows


# -- polydisk -----------------------------------------------------------------------

def test_polydisk_examples():
    p, _ = dr.polydisk_rep_from_contraction(np.zeros((2, 2)), [1, 1])
    assert p.allclose(MultiPoly.constant(2, 1), 1e-14)
    p, rep = dr.polydisk_rep_from_contraction(np.array([[0.5]]), [1])
    assert p.allclose(MultiPoly.from_univariate([1, -0.5]), 1e-14)
    assert rep.form == "contraction"


@SETTINGS
@h.given(contraction_cases())
def test_polydisk_coefficients_match_cofactor_expansion(case):
    K, N = case
    p, _ = dr.polydisk_rep_from_contraction(K, N)
    size = sum(N)
    mats = [np.eye(size, dtype=complex)]
    o = 0
    for nj in N:
        D = np.zeros((size, size))
        D[o:o + nj, o:o + nj] = np.eye(nj)
        mats.append(-K @ D)
        o += nj
    assert p.max_coeff_diff(mv.det_of_linear_pencil(mats, len(N))) <= 1e-9


def test_polydisk_lower_bound_on_closed_polydisk():
    rng = np.random.default_rng(3)
    N = [2, 1, 2]
    K = nk.random_contraction(5, 0.9, rng)
    p, _ = dr.polydisk_rep_from_contraction(K, N)
    u = dm.sample_closed_polydisk(3, 5000, seed=1)
    assert np.min(np.abs(mv.evaluate(p, u))) >= 0.1 ** 5 * (1 - 1e-9)


def test_contraction_and_shape_errors():
    with pytest.raises(NotContraction):
        dr.polydisk_rep_from_contraction(np.array([[1.0]]), [1])
    with pytest.raises(SchemaError):
        dr.cayley_push_halfplane(np.zeros((3, 3)), [1, 1])
    with pytest.raises(SchemaError):
        dr.lorentz2_rep_from_contraction(np.zeros((3, 3)))
    with pytest.raises(SchemaError):
        DetRep(np.zeros((2, 2)), cy.StructureMap("DiagonalZN", {"N": [3]}))


# -- half-plane push -----------------------------------------------------------------

def test_halfplane_scalar_example():
    rep = dr.cayley_push_halfplane(np.array([[0.5]]), [1])
    np.testing.assert_allclose(rep.A0, [[3j]], atol=1e-14)
    p = dr.extract_polynomial(rep)
    assert p.allclose(MultiPoly.from_univariate([3j, 1]), 1e-13)
    v = rf.is_hurwitz_stable(p)
    assert v.stable and v.margin == pytest.approx(-3.0)


def test_halfplane_zero_contraction():
    N = [2, 1, 3]
    rep = dr.cayley_push_halfplane(np.zeros((6, 6)), N)
    np.testing.assert_allclose(rep.A0, 1j * np.eye(6), atol=0)
    z = cgauss(np.random.default_rng(0), (50, 3))
    expect = np.prod((z + 1j) ** np.array(N), axis=1)
    np.testing.assert_allclose(rep(z), expect, rtol=1e-12)


def test_im_A0_direct_equals_factored():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        K = nk.random_contraction(n, rng.uniform(0.1, 0.95), rng)
        A0 = nk.matrix_cayley(K)
        direct = (A0 - A0.conj().T) / 2j
        assert np.max(np.abs(direct - dr.im_A0_factored(K))) <= 1e-10 * max(1.0, np.abs(direct).max())
        assert nk.min_eig(direct) > 0


@SETTINGS
@h.given(contraction_cases())
def test_halfplane_chain_identity(case):
    K, N = case
    w = dm.sample(DomainSpec("HalfPlaneTube", {"d": len(N)}), 200, seed=1)
    assert dr.chain_halfplane(K, N, w) <= 1e-8


def test_verify_rep_accepts_own_polynomial_and_rejects_corruption():
    rng = np.random.default_rng(11)
    N = [2, 2]
    K = nk.random_contraction(4, 0.8, rng)
    rep = dr.cayley_push_halfplane(K, N)
    p = dr.extract_polynomial(rep)
    good = dr.verify_rep(p, None, rep, coefficients=True)
    assert good.verdict and good.coefficient_max_diff <= 1e-9
    noise = np.zeros((4, 4), dtype=complex)
    noise[0, 1] = 2j
    bad_rep = DetRep(rep.A0 + noise, rep.structure)
    bad = dr.verify_rep(p, None, bad_rep)
    assert not bad.verdict
    assert bad.identity_max_rel_err > 1e-3


def test_verify_scalar_exact():
    rep = dr.cayley_push_halfplane(np.array([[0.5]]), [1])
    p = MultiPoly.from_univariate([3j, 1])
    out = dr.verify_rep(p, MultiPoly.constant(1, 1), rep)
    assert out.verdict and out.identity_max_rel_err <= 1e-15
    assert out.to_json()["verdict"] == "pass"


def test_verify_variable_count_mismatch():
    rep = dr.cayley_push_halfplane(np.array([[0.5]]), [1])
    out = dr.verify_rep(MultiPoly.variable(2, 0), None, rep)
    assert not out.verdict


def test_extract_grid_cap():
    rep = dr.cayley_push_halfplane(np.zeros((6, 6)), [2, 2, 2])
    with pytest.raises(GridTooLarge):
        dr.extract_polynomial(rep, max_points=10)


def test_rep_json_round_trip(rng):
    rep = dr.lorentzn_rep_from_contraction(nk.random_contraction(6, 0.7, rng), 3)
    back = DetRep.from_json(rep.to_json())
    z = dm.sample(DomainSpec("LorentzTube", {"n": 3}), 20, seed=0)
    np.testing.assert_allclose(back(z), rep(z), rtol=1e-14)
    with pytest.raises(SchemaError):
        DetRep.from_json({"A0": "nonsense"})


# -- Cartan blocks ------------------------------------------------------------

def test_cartan_chain(rng):
    K = nk.random_contraction(6, 0.8, rng)
    spec = DomainSpec("CartanProduct", {"factors": [DomainSpec("MatrixUHP", {"l": 2}), DomainSpec("SiegelUHP", {"s": 2})]})
    w = dm.sample(spec, 200, seed=2)
    assert dr.chain_cartan(K, [2], [2], [1], [2], w) <= 1e-8
    rep = dr.cartan_rep_from_contraction(K, [2], [2], [1], [2])
    assert rep.metadata["im_A0_min_eig"] > 0


# -- Lorentz tube ------------------------------------------------------------

def test_lorentz2_zero_contraction():
    rep = dr.lorentz2_rep_from_contraction(np.zeros((2, 2)))
    np.testing.assert_allclose(rep.A0, 1j * np.eye(2))
    w = dm.sample(DomainSpec("LorentzTube", {"n": 2}), 500, seed=0)
    expect = (w[:, 0] + 1j) ** 2 - w[:, 1] ** 2
    np.testing.assert_allclose(rep(w), expect, rtol=1e-12)
    assert np.min(np.abs(expect)) > 0


@pytest.mark.parametrize("k", [1, 2, 3])
def test_lorentz2_nonvanishing_and_chain(k):
    rng = np.random.default_rng(k)
    K = nk.random_contraction(2 * k, 0.9, rng)
    rep = dr.lorentz2_rep_from_contraction(K)
    w = dm.sample(DomainSpec("LorentzTube", {"n": 2}), 10_000, seed=k)
    assert np.min(_hadamard_ratio(rep.matrix(w))) > 1e-12
    assert dr.chain_lorentz2(K, w[:1000]) <= 1e-8


@pytest.mark.parametrize("k", [1, 2])
def test_lorentz2_orientation_coefficientwise(k):
    # the disc-side polynomial pulled back through Phi_2 and cleared by D(w)^k
    # equals det(I - K) times the tube-side polynomial, coefficient by coefficient
    rng = np.random.default_rng(40 + k)
    K = nk.random_contraction(2 * k, 0.8, rng)
    rep = dr.lorentz2_rep_from_contraction(K)
    tube = dr.extract_polynomial(rep).scale(rep.metadata["det_I_minus_K"])

    def disc_side(w):
        z = cy.Phi_n_inv(w)
        return nk.det(np.eye(2 * k) - K @ cy.kron_I(cy.build_P2(z), k)) * cy.lorentz_den(w) ** k

    degrees = [2 * k, 2 * k]
    pulled = mv.interpolate_from_grid(mv.sample_on_grid(disc_side, degrees, [2.0 * x for x in mv.grid_nodes(degrees)]),
                                      degrees, [2.0 * x for x in mv.grid_nodes(degrees)])
    assert pulled.max_coeff_diff(tube) <= 1e-8


def test_eigenvalue_one_split_cases(rng):
    K = nk.random_contraction(6, 0.8, rng)
    U1, V, Kt = dr.split_eigenvalue_one(K)
    assert U1.shape[1] == 0 and V.shape == (6, 6)
    np.testing.assert_allclose(V.conj().T @ V, np.eye(6), atol=1e-12)
    Kp = nk.random_contraction(3, 0.7, rng)
    B = np.zeros((4, 4), dtype=complex)
    B[0, 0] = 1
    B[1:, 1:] = Kp
    U1, V, Kt = dr.split_eigenvalue_one(B)
    assert U1.shape[1] == 1
    np.testing.assert_allclose(np.abs(U1[:, 0]), [1, 0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(np.sort_complex(np.linalg.eigvals(Kt)), np.sort_complex(np.linalg.eigvals(Kp)), atol=1e-12)


def test_lorentzn_strict_has_full_V(rng):
    rep = dr.lorentzn_rep_from_contraction(nk.random_contraction(6, 0.8, rng), 3, 2)
    assert rep.metadata["m"] == 6 and rep.metadata["eig1_dim"] == 0
    assert rep.metadata["V_orth_err"] <= 1e-12
    assert rep.metadata["im_A0_min_eig"] > 0


def test_lorentzn_reduces_to_lorentz2(rng):
    K = nk.random_contraction(4, 0.8, rng)
    k = 2
    rn = dr.lorentzn_rep_from_contraction(K, 2, k)
    r2 = dr.lorentz2_rep_from_contraction(K)
    w = dm.sample(DomainSpec("LorentzTube", {"n": 2}), 300, seed=3)
    lhs = rn.metadata["chain_const"] * rn(w)
    rhs = (2j) ** k * (w[:, 0] + 1j) ** k * r2.metadata["det_I_minus_K"] * r2(w)
    assert np.max(np.abs(lhs - rhs) / np.abs(rhs)) <= 1e-8
    pn = dr.extract_polynomial(rn).scale(rn.metadata["chain_const"])
    p2 = dr.extract_polynomial(r2) * MultiPoly(2, {(1, 0): 1, (0, 0): 1j}) ** k
    assert pn.max_coeff_diff(p2.scale((2j) ** k * r2.metadata["det_I_minus_K"])) <= 1e-8


@pytest.mark.parametrize("n,k,m", [(3, 1, 1), (3, 2, 2), (4, 1, 0), (5, 3, 3)])
def test_lorentzn_with_eigenvalue_one_block(n, k, m):
    from tubestab.suites import lorentz_test_contraction

    rng = np.random.default_rng(n * 10 + k)
    K = lorentz_test_contraction(rng, n * k, m)
    rep = dr.lorentzn_rep_from_contraction(K, n, k)
    assert rep.metadata["eig1_dim"] == m
    assert rep.metadata["V_orth_err"] <= 1e-12
    w = dm.sample(DomainSpec("LorentzTube", {"n": n}), 2000, seed=n)
    assert np.min(_hadamard_ratio(rep.matrix(w))) > 1e-12
    assert dr.chain_lorentzn(K, n, w[:300])["total"] <= 1e-8


# -- skew domain ------------------------------------------------------------

def test_skew_examples():
    rep = dr.skew_rep_from_contraction(np.zeros((4, 4)), 2)
    np.testing.assert_allclose(rep.A0, 1j * np.eye(4), atol=0)
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = int(rng.integers(1, 3))
        N = int(rng.integers(1, 3))
        K = nk.random_contraction(2 * n * N, rng.uniform(0.1, 0.95), rng)
        assert dr.skew_rep_from_contraction(K, n, N).metadata["im_A0_min_eig"] > 0


def test_skew_nonvanishing_and_chain(rng):
    K = nk.random_contraction(8, 0.9, rng)
    rep = dr.skew_rep_from_contraction(K, 2, 2)
    W = dm.sample(DomainSpec("SkewDomain", {"dim": 4}), 10_000, seed=6)
    assert np.min(_hadamard_ratio(rep.matrix(W))) > 1e-12
    assert dr.chain_skew(K, 2, 2, W[:1000]) <= 1e-8


# -- Lie ball ------------------------------------------------------------

def test_lieball_zero_contraction():
    n, k = 3, 2
    rep = dr.lieball_rep_from_contraction(np.zeros((n * k, n * k)), n, k)
    z = dm.sample(DomainSpec("LieBall", {"n": n}), 500, seed=1)
    np.testing.assert_allclose(rep(z), (1 - z[:, 0]) ** ((n - 1) * k), rtol=1e-12)


def test_lieball_modulus_bound():
    rng = np.random.default_rng(8)
    n, k = 3, 1
    K = nk.random_contraction(n * k, 0.6, rng)
    z = dm.sample(DomainSpec("LieBall", {"n": n}), 3000, seed=2)
    Q = cy.build_Q(z)
    qn = nk.op_norm(Q)
    keep = qn <= 0.8
    dq = np.abs(nk.det(np.eye(n) - K @ Q[keep]))
    assert keep.sum() > 100
    assert np.min(dq) >= (1 - 0.6 * float(np.max(qn[keep]))) ** (n * k) * (1 - 1e-12)


def test_lieball_pencil_nonvanishing():
    rng = np.random.default_rng(9)
    out = dr.lieball_pencil_check(nk.random_contraction(6, 0.9, rng), 3, samples=10_000, k=2)
    assert out.nonvanishing and out.samples == 10_000
    assert out.factorization_max_rel_err <= 1e-8


def test_lieball_extraction_closure():
    rng = np.random.default_rng(10)
    rep = dr.lieball_rep_from_contraction(nk.random_contraction(2, 0.7, rng), 2, 1)
    p = dr.extract_polynomial(rep)
    assert dr.verify_rep(p, None, rep).verdict


def test_degree_bounds():
    rep = dr.cayley_push_halfplane(np.zeros((5, 5)), [2, 3])
    assert dr.degree_bounds(rep) == [2, 3]
    rn = dr.lorentzn_rep_from_contraction(np.zeros((3, 3)), 3)
    assert dr.degree_bounds(rn)[0] == 3 + 1
