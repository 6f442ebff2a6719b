from __future__ import annotations

import numpy as np
import pytest

from tubestab import cayley as cy
from tubestab import domains as dm
from tubestab import numkernel as nk
from tubestab.cayley import StructureMap
from tubestab.domains import DomainSpec
from tubestab.errors import DimMismatch, NotInvertible, NotSkew, Pole, PoleAtOne, SchemaError

pytest.importorskip("hypothesis")
import hypothesis as h
import hypothesis.strategies as st

from conftest import cgauss

SETTINGS = h.settings(max_examples=30, deadline=None)


def lie_points(n, count, seed):
    return dm.sample(DomainSpec("LieBall", {"n": n}), count, seed=seed)


# -- scalar maps --------------------------------------------------------------

def test_phi_examples():
    assert cy.phi(0) == pytest.approx(1j)
    assert cy.phi_inv(1j) == pytest.approx(0)
    assert cy.phi(0.5) == pytest.approx(3j)
    with pytest.raises(Pole):
        cy.phi(1.0)
    with pytest.raises(Pole):
        cy.phi_inv(-1j)


@SETTINGS
@h.given(st.floats(0, 0.999), st.floats(0, 2 * np.pi))
def test_phi_maps_disc_to_upper_half_plane(r, t):
    z = r * np.exp(1j * t)
    w = cy.phi(z)
    assert w.imag > 0
    assert abs(cy.phi_inv(w) - z) <= 1e-10 * max(1.0, abs(w))


# -- spin-factor product ------------------------------------------------------------

def test_jordan_unit_and_nonassociativity():
    e = cy.jordan_unit(4)
    u = np.array([0.3, 1 + 1j, -2, 0.5j])
    np.testing.assert_allclose(cy.jordan_mul(u, e), u)
    f2, f3 = np.eye(3)[1], np.eye(3)[2]
    left = cy.jordan_mul(cy.jordan_mul(f3, f2), f2)
    right = cy.jordan_mul(f3, cy.jordan_mul(f2, f2))
    assert np.array_equal(left, np.zeros(3))
    assert np.array_equal(right, f3)


def test_jordan_inverse(rng):
    u = cgauss(rng, (100, 5))
    prod = cy.jordan_mul(u, cy.jordan_inv(u))
    np.testing.assert_allclose(prod, np.broadcast_to(cy.jordan_unit(5), prod.shape), atol=1e-11)
    with pytest.raises(NotInvertible):
        cy.jordan_inv(np.array([1.0, 1.0, 0.0]))


def test_literal_jordan_form_is_plain_cayley(rng):
    z = 0.3 * cgauss(rng, (50, 4))
    e = cy.jordan_unit(4)
    expect = cy.jordan_mul(e + z, cy.jordan_inv(e - z))
    np.testing.assert_allclose(cy.jordan_cayley(z), expect, atol=1e-12)


# -- Lie ball and Lorentz tube ------------------------------------------------------------

def test_Phi_n_examples():
    np.testing.assert_allclose(cy.Phi_n(np.zeros(4)), [1j, 0, 0, 0])
    np.testing.assert_allclose(cy.Phi_n_inv(np.array([1j, 0, 0])), np.zeros(3), atol=1e-15)
    with pytest.raises(Pole):
        cy.Phi_n(np.array([1.0, 0.0]))
    with pytest.raises(Pole):
        cy.Phi_n_inv(np.array([-1j, 0.0]))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_Phi_n_round_trip_jordan_form_and_tube(n):
    z = lie_points(n, 1000, seed=n)
    w = cy.Phi_n(z)
    np.testing.assert_allclose(cy.Phi_n_inv(w), z, atol=1e-10)
    err = np.max(np.abs(cy.Phi_n_jordan(z) - w) / np.maximum(1.0, np.abs(w)))
    assert err <= 1e-10
    assert np.all(dm.contains(DomainSpec("LorentzTube", {"n": n}), w))


def test_Phi_n_inverse_maps_tube_into_lie_ball():
    w = dm.sample(DomainSpec("LorentzTube", {"n": 4}), 500, seed=9)
    assert np.all(dm.contains(DomainSpec("LieBall", {"n": 4}), cy.Phi_n_inv(w)))


def test_Phi_2_pencil_link():
    w1, w2, err = cy.Phi_2_pencil_link(0.0, 0.0)
    assert w1 == pytest.approx(1j) and w2 == pytest.approx(0) and err < 1e-15
    z = lie_points(2, 1000, seed=1)
    _, _, err = cy.Phi_2_pencil_link(z[:, 0], z[:, 1])
    assert np.max(err) <= 1e-10


def test_Phi_2_membership_transfer():
    z = 0.7 * cgauss(np.random.default_rng(4), (3000, 2))
    z = z[np.abs(1 - z[:, 0]) > 1e-3]
    inside = dm.margins(DomainSpec("LieBall", {"n": 2}), z)
    w = cy.Phi_n(z)
    tube = dm.margins(DomainSpec("LorentzTube", {"n": 2}), w)
    keep = (np.abs(inside) > 1e-6) & (np.abs(tube) > 1e-6)
    assert np.array_equal((inside > 0)[keep], (tube > 0)[keep])


def test_build_W_example():
    np.testing.assert_allclose(cy.build_W(np.array([1j, 0, 0])), 1j * np.eye(3))


def test_Ppm_and_Q_identities(rng):
    z = lie_points(4, 300, seed=2)
    pp, pm = cy.build_Ppm(z)
    np.testing.assert_allclose(pm, cy.build_Q(z) @ pp, atol=1e-12)
    pp2, pm2 = cy.build_Ppm_polynomial(z)
    np.testing.assert_allclose(pp2, pp, atol=1e-15)
    np.testing.assert_allclose(pm2, pm, atol=1e-12)
    W = cy.build_W(cy.Phi_n(z))
    np.testing.assert_allclose(nk.matrix_cayley_inv(W), cy.build_Q(z), atol=1e-10)
    with pytest.raises(PoleAtOne):
        cy.build_Q(np.array([1.0, 0.2]))


def test_Sr_Tr_at_r_one_is_polynomial_pair():
    z = np.array([0.2 + 0.1j, -0.3, 0.1j])
    s1, t1 = cy.build_Sr_Tr(z, 1.0)
    pp, pm = cy.build_Ppm(z)
    np.testing.assert_allclose(s1, pp)
    np.testing.assert_allclose(t1, pm, atol=1e-15)


# -- skew domain --------------------------------------------------------------------

def random_skew_contraction(rng, n, norm=0.9):
    A = cgauss(rng, (2 * n, 2 * n))
    Z = A - A.T
    return Z * (norm / nk.op_norm(Z))


def test_psi_at_zero():
    for n in (1, 2, 3):
        np.testing.assert_allclose(cy.psi(np.zeros((2 * n, 2 * n))), -1j * cy.J_matrix(n), atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_psi_round_trip_and_skewness(n):
    rng = np.random.default_rng(n)
    for _ in range(100):
        Z = random_skew_contraction(rng, n, rng.uniform(0.1, 0.95))
        W = cy.psi(Z)
        assert np.max(np.abs(W + W.T)) <= 1e-11 * max(1.0, np.abs(W).max())
        np.testing.assert_allclose(cy.psi_inv(W), Z, atol=1e-10)
        np.testing.assert_allclose(cy.psi(Z).T, -cy.psi(Z), atol=1e-10)


def test_literal_skew_inverse_does_not_invert(rng):
    Z = random_skew_contraction(rng, 2, 0.6)
    assert np.max(np.abs(cy.psi_inv_literal(cy.psi(Z)) - Z)) > 1e-3


def test_psi_rejects_non_skew():
    with pytest.raises(NotSkew):
        cy.psi(np.eye(2))


# -- exceptional building blocks ------------------------------------------------------------

def test_generators_clifford_relations_exact():
    T = cy.generators_T()
    assert np.array_equal(T[0], np.diag([1, -1, -1, -1, -1, -1, -1, -1]))
    assert all(t.dtype.kind == "i" for t in T)
    for j in range(8):
        assert np.array_equal(cy.build_Y(np.eye(8, dtype=int)[j]), T[j])
        for k in range(8):
            lhs = T[k].T @ T[j] + T[j].T @ T[k]
            assert np.array_equal(lhs, 2 * (j == k) * np.eye(8, dtype=int))


@SETTINGS
@h.given(st.integers(0, 2**31 - 1))
def test_Y_norm_identity_and_switch(seed):
    rng = np.random.default_rng(seed)
    w, y, z = cgauss(rng, (3, 8))
    Y = cy.build_Y(w)
    s = np.sum(w ** 2)
    scale = max(1.0, np.sum(np.abs(w) ** 2))
    assert np.max(np.abs(Y.T @ Y - s * np.eye(8))) <= 1e-12 * scale
    assert np.max(np.abs(Y @ Y.T - s * np.eye(8))) <= 1e-12 * scale
    T1 = cy.generators_T()[0]
    lhs = cy.build_Y(z) @ y
    rhs = T1 @ cy.build_Y(y) @ z
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.abs(y).max() * np.abs(z).max())


def test_X_zeta_basics(rng):
    np.testing.assert_allclose(cy.build_X_zeta(np.zeros(27)), np.zeros((17, 17)))
    with pytest.raises(PoleAtOne):
        cy.build_X_zeta(np.eye(27)[0])
    with pytest.raises(DimMismatch):
        cy.build_Y(np.zeros(7))
    zeta = 0.3 * cgauss(rng, (200, 27))
    w1, x, y, w2, z, w3 = cy.zeta_split(zeta)
    lhs = nk.det(np.eye(17) - cy.build_X_zeta(zeta))
    rhs = (1 - w1) * ((1 - w2) * (1 - w3) - np.sum(z * z, axis=-1)) ** 8
    assert np.max(np.abs(lhs - rhs) / np.abs(rhs)) <= 1e-9
    back, res = cy.zeta_from_X(cy.build_X_zeta(zeta))
    np.testing.assert_allclose(back, zeta, atol=1e-12)
    assert np.max(res) <= 1e-12


def test_block_cayley_closed_form(rng):
    zeta = 0.2 * cgauss(rng, (200, 27))
    w, p, Z = cy.zeta_to_block(zeta)
    X = cy.assemble_block_X(w, p, Z)
    np.testing.assert_allclose(X, cy.build_X_zeta(zeta), atol=1e-14)
    closed = cy.block_cayley_2x2(w, p, Z)
    direct = nk.matrix_cayley(X)
    assert np.max(np.abs(closed - direct) / np.maximum(1.0, np.abs(direct))) <= 1e-10
    # psi = 0 makes the result block diagonal
    out = cy.block_cayley_2x2(w[0], np.zeros(16), Z[0])
    assert out[0, 0] == pytest.approx(cy.phi(w[0]))
    np.testing.assert_allclose(out[0, 1:], 0)
    np.testing.assert_allclose(out[1:, 1:], nk.matrix_cayley(Z[0]), atol=1e-12)


def test_exceptional_cayley_round_trip():
    zeta = dm.sample(DomainSpec("BoundedExceptional27"), 300, seed=11)
    w, res = cy.eta_inv(zeta)
    assert np.max(res) <= 1e-9
    back, res2 = cy.eta(w)
    assert np.max(res2) <= 1e-9
    assert np.max(np.abs(back - zeta)) <= 1e-8


def test_Omega_summands_share_positivity():
    rng = np.random.default_rng(5)
    w = np.zeros((500, 27), dtype=complex)
    w.imag = rng.normal(size=(500, 27)) * 0.3
    w.imag[:, [0, 17, 26]] += 1.0
    eigs = [nk.min_eig(nk.im_part(o)) for o in cy.build_Omega(w)]
    keep = np.all([np.abs(e) > 1e-8 for e in eigs], axis=0)
    assert np.array_equal((eigs[0] > 0)[keep], (eigs[1] > 0)[keep])
    assert np.array_equal((eigs[0] > 0)[keep], (eigs[2] > 0)[keep])


def test_rotational_probe_is_a_report():
    out = cy.rotational_invariance_probe(0.1 * cgauss(np.random.default_rng(0), (50, 27)))
    assert out["n_inside"] > 0
    assert len(out["fraction_kept"]) == len(out["thetas"])


# -- structure maps ------------------------------------------------------------

def test_structure_map_examples():
    D = StructureMap("DiagonalZN", {"N": [1, 1]})
    np.testing.assert_allclose(cy.apply_structure(D, [2.0, 3j]), np.diag([2.0, 3j]))
    assert StructureMap("DiagonalZN", {"N": [2, 3]}).dim == 5
    w = np.array([0.2 + 1j, 0.1, -0.3j])
    np.testing.assert_allclose(cy.apply_structure(StructureMap("LorentzW", {"n": 3}), w), cy.build_W(w))
    zeta = 0.1 * cgauss(np.random.default_rng(1), 27)
    om = cy.build_Omega(zeta)
    for sel in (1, 2, 3):
        np.testing.assert_allclose(cy.apply_structure(StructureMap("Exceptional", {"selector": sel}), zeta), om[sel - 1])
    full = cy.apply_structure(StructureMap("Exceptional", {"selector": "all"}), zeta)
    assert full.shape == (51, 51)
    with pytest.raises(DimMismatch):
        cy.apply_structure(D, [1.0, 2.0, 3.0])
    with pytest.raises(SchemaError):
        StructureMap("Spiral", {})


@pytest.mark.parametrize(
    "smap",
    [
        StructureMap("DiagonalZN", {"N": [2, 1, 3]}),
        StructureMap("CartanBlocks", {"uhp": [2], "suhp": [2], "N": [1], "M": [2]}),
        StructureMap("SkewZJ", {"n": 2, "N": 2}),
        StructureMap("LorentzW", {"n": 4, "k": 2}),
    ],
    ids=lambda s: s.kind,
)
def test_linear_structures_are_linear(smap, rng):
    projs = smap.coordinate_projections()
    z = cgauss(rng, smap.nvars)
    direct = cy.apply_structure(smap, z)
    assert direct.shape == (smap.dim, smap.dim)
    np.testing.assert_allclose(direct, sum(zj * A for zj, A in zip(z, projs)), atol=1e-13)
    assert StructureMap.from_json(smap.to_json()) == smap


def test_coordinate_round_trips(rng):
    v = cgauss(rng, 6)
    np.testing.assert_allclose(cy.matrix_to_sym(cy.sym_to_matrix(v, 3)), v)
    np.testing.assert_allclose(cy.matrix_to_skew(cy.skew_to_matrix(v, 4)), v)
    np.testing.assert_allclose(cy.matrix_to_full(cy.full_to_matrix(cgauss(rng, 9), 3)).shape, (9,))
