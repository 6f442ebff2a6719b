from __future__ import annotations

import json

import numpy as np
import pytest

from tubestab import suites as su
from tubestab.errors import UnknownSuite


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        su.run_suite("bogus")


def test_proofchains_suite_passes():
    (rep,) = su.run_suite("proofchains", seed=1)
    assert rep.passed, [c for c in rep.checks if not c.passed]
    assert rep.wall_time > 0


def test_small_suites_are_seed_deterministic():
    a = su.suite_interpolation(seed=4, cases=5).to_json()
    b = su.suite_interpolation(seed=4, cases=5).to_json()
    assert a == b
    json.dumps(a)


def test_report_bookkeeping():
    rep = su.SuiteReport("demo", 0)
    rep.add_le("small", 1e-14, 1e-12)
    assert rep.passed
    rep.add_flag("broken", False)
    assert not rep.passed
    out = rep.to_json()
    assert out["schema"] == "tubestab/1" and len(out["checks"]) == 2


def test_planted_zero_vanishes_at_its_point():
    rng = np.random.default_rng(0)
    p, _, _ = su.generated_halfplane_poly(rng, 2)
    z0 = np.array([0.3 + 1j, -0.2 + 0.5j])
    q = su.planted_zero(p, z0)
    from tubestab import mvpoly as mv

    assert abs(mv.evaluate(q, z0)) <= 1e-12 * mv.abs_scale(q, z0)
    assert mv.homogeneous_part(q, q.degree) == mv.homogeneous_part(p, p.degree)
