from __future__ import annotations

import numpy as np
import pytest

from tubestab import domains as dm
from tubestab import mvpoly as mv
from tubestab import numkernel as nk
from tubestab import stability as sb
from tubestab import suites as su
from tubestab import detrep as dr
from tubestab.domains import DomainSpec
from tubestab.errors import NormalizationFailure, WeightPole
from tubestab.mvpoly import MultiPoly

pytest.importorskip("hypothesis")
import hypothesis as h
import hypothesis.strategies as st

SETTINGS = h.settings(max_examples=10, deadline=None)

H1 = DomainSpec("HalfPlaneTube", {"d": 1})
H2 = DomainSpec("HalfPlaneTube", {"d": 2})


def uni(*asc):
    return MultiPoly.from_univariate(asc)


def z(nvars, j):
    return MultiPoly.variable(nvars, j)


# -- sampled stability ------------------------------------------------------------

def test_no_zero_for_root_below_axis():
    rep = sb.sampled_stability(uni(3j, 1), H1, n_samples=2000, seed=1)
    assert rep.verdict == "no_zero_found"
    assert rep.witness is None
    assert rep.min_abs_over_samples > 0


def test_planted_zero_is_found():
    rep = sb.sampled_stability(uni(-1j, 1), H1, n_samples=2000, seed=1)
    assert rep.falsified
    assert abs(rep.witness[0] - 1j) < 1e-6
    assert rep.witness_margin > 0
    again = sb.sampled_stability(uni(-1j, 1), H1, n_samples=10, seed=99, witnesses=[rep.witness])
    assert again.falsified


def test_polydisk_contraction_poly_has_no_zero():
    rng = np.random.default_rng(2)
    N = [1, 2]
    p, _ = dr.polydisk_rep_from_contraction(nk.random_contraction(3, 0.9, rng), N)
    rep = sb.sampled_stability(p, DomainSpec("PolyDisk", {"d": 2}), n_samples=5000, seed=0)
    assert rep.verdict == "no_zero_found"
    assert rep.min_abs_over_samples >= 0.1 ** 3


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        sb.sampled_stability(MultiPoly.zero(1), H1)


@SETTINGS
@h.given(st.integers(0, 10_000))
def test_generated_stable_polys_pass_and_planted_zeros_fail(seed):
    rng = np.random.default_rng(seed)
    p, _, _ = su.generated_halfplane_poly(rng, 2)
    assert sb.sampled_stability(p, H2, n_samples=500, seed=seed).verdict == "no_zero_found"
    z0 = dm.sample(H2, 1, seed=seed)[0]
    bad = su.planted_zero(p, z0)
    assert sb.sampled_stability(bad, H2, n_samples=500, seed=seed).falsified


# -- strictness ------------------------------------------------------------

def test_constant_has_unit_strictness():
    est = sb.strictness_estimate(MultiPoly.constant(1, 1), H1, "none", n_samples=200)
    assert est.epsilon_hat == pytest.approx(1.0)


def test_strictness_far_field_limit():
    est = sb.strictness_estimate(uni(2j, 1), H1, "halfplane", n_samples=2000, seed=0)
    assert 1.0 <= est.epsilon_hat <= 1.0 + 1e-3
    radii = sorted(est.per_radius)
    vals = [est.per_radius[r] for r in radii]
    assert vals[-1] <= vals[0]


def test_weight_pole():
    with pytest.raises(WeightPole):
        sb.strictness_at(uni(2j, 1), H1, "halfplane", np.array([[-1j]]))


def test_cayley_bridge_matches_disc_side():
    rng = np.random.default_rng(4)
    p, _, _ = su.generated_halfplane_poly(rng, 2)
    br = sb.cayley_bridge(p, n_samples=1000, seed=0)
    assert br.rel_err <= 1e-6
    assert br.max_pointwise_rel_err <= 1e-6


def test_equivalences_for_product_and_missing_monomial():
    p = (z(2, 0) + 2j) * (z(2, 1) + 2j)
    eq = sb.halfplane_equivalences(p, n_samples=1000)
    assert eq.weighted_bound and eq.disc_min_holds and eq.extreme_monomial and eq.agree
    q = z(2, 0) + z(2, 1)
    eq = sb.halfplane_equivalences(q, degrees=(1, 1), n_samples=1000)
    assert not eq.extreme_monomial


def test_equivalences_on_pulled_back_polys():
    rng = np.random.default_rng(6)
    for _ in range(5):
        p, _, _ = su.generated_halfplane_poly(rng, 2)
        eq = sb.halfplane_equivalences(p, n_samples=500)
        assert eq.weighted_bound and eq.disc_min_holds and eq.extreme_monomial


# -- line checks ------------------------------------------------------------

def test_line_check_single_variable():
    rep = sb.line_checks(uni(3j, 1), [[1.0]], [[0.0]])
    assert rep.passed and rep.lines == 1


def test_line_through_zero_fails():
    p = (z(2, 0) - 1j) * (z(2, 1) + 1j)  # zero at z1 = i
    rep = sb.line_checks(p, [[1.0, 1.0]], [[0.0, 0.0]])
    assert rep.hurwitz_fail == 1 and not rep.passed


def test_generated_polys_pass_line_checks():
    rng = np.random.default_rng(12)
    for d in (2, 3):
        p, _, _ = su.generated_halfplane_poly(rng, d)
        X, Y = sb.random_lines(d, DomainSpec("HalfPlaneTube", {"d": d}), 50, seed=d)
        rep = sb.line_checks(p, Y, X)
        assert rep.passed and rep.consistent
        assert sb.initial_form_hyperbolicity(p, Y, X).passed
        assert sb.pn_qn1_interlacing(p, Y, X).passed


def test_hyperbolicity_examples():
    p = z(2, 0) * z(2, 1) + 1
    Y = [[1.0, 1.0], [0.5, 2.0]]
    X = [[0.0, 0.0], [0.3, -1.0]]
    assert sb.initial_form_hyperbolicity(p, Y, X).passed
    line = mv.line_restrict(mv.homogeneous_part(p, 2), [0, 0], [1, 1])
    assert line == uni(0, 0, 1)
    p = (z(2, 0) + 1j) * (z(2, 1) + 2j)
    assert sb.initial_form_hyperbolicity(p, Y, X).passed
    bad = z(2, 0) ** 2 + z(2, 1) ** 2
    rep = sb.initial_form_hyperbolicity(bad, [[0.0, 1.0]], [[1.0, 0.0]])
    assert rep.failures == 1
    assert abs(abs(rep.first_failure["nonreal_root"]) - 1) < 1e-12


def test_normalization_constant():
    pn = z(2, 0).scale(1j) * z(2, 1)
    nrm = sb.normalization_constant(pn)
    assert nrm.residual <= 1e-12
    assert mv.is_real(pn.scale(nrm.c))
    with pytest.raises(NormalizationFailure):
        sb.normalization_constant(z(2, 0) + z(2, 1).scale(1j))


def test_pn_qn1_examples():
    rep = sb.pn_qn1_interlacing(uni(1j, 1), [[1.0]], [[0.0]])
    assert rep.passed and rep.verdicts["weak"] == 1
    p = (z(2, 0) + 1j) * (z(2, 1) + 1j)
    rep = sb.pn_qn1_interlacing(p, [[1.0, 1.0]], [[1.0, -1.0]])
    assert rep.passed and rep.verdicts["strict"] == 1


def test_random_lines_are_in_cone():
    X, Y = sb.random_lines(3, DomainSpec("HalfPlaneTube", {"d": 3}), 40, seed=1)
    assert X.shape == Y.shape == (40, 3)
    assert np.all(Y > 0)
    cone = DomainSpec("LorentzCone", {"n": 3})
    X, Y = sb.random_lines(3, cone, 40, seed=1)
    assert np.all(dm.contains(cone, Y))


def test_report_json():
    rep = sb.sampled_stability(uni(-1j, 1), H1, n_samples=200, seed=0)
    out = rep.to_json()
    assert out["verdict"] == "falsified" and out["seed"] == 0
