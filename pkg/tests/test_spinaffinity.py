import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bundled
from torspin import jet
from torspin import spinaffinity as sa
from torspin.counts import random_scenario
from torspin.errors import ConstraintViolated, InconsistentTrace, ValidationError
from torspin.scenario import parse_scenario
from torspin.soldering import Formalism
from torspin.state import GeometryState

V = jet.value
POINT = (0.2, 0.1, -0.3, 0.25)

EPSILON_FLAT = """
[formalism]
kind = epsilon
upsilon0 = {u0}
upsilon1 = {u1}
[points]
point = 0.1, 0.2, 0.3, 0.4
"""


def test_gradient_upsilon_is_admissible_without_torsion():
    s = parse_scenario(EPSILON_FLAT.format(u0="x1", u1="x0"))
    u = s.formalism.upsilon_jet(s.points[0])
    assert sa.upsilon_constraint_residual(u, np.zeros((4, 4, 4, jet.NCOEF))) == 0.0


def test_curl_upsilon_is_rejected():
    u = Formalism.epsilon(("x1", "0", "0", "0")).upsilon_jet(POINT)
    assert sa.upsilon_constraint_residual(u, np.zeros((4, 4, 4, jet.NCOEF))) == pytest.approx(0.5)
    with pytest.raises(ConstraintViolated):
        sa.upsilon_constraint_check(u, np.zeros((4, 4, 4, jet.NCOEF)))
    with pytest.raises(ConstraintViolated):
        parse_scenario(EPSILON_FLAT.format(u0="x1", u1="0"))


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["gamma", "epsilon"]))
def test_transvection_solve_matches_linear_solve(seed, kind):
    s = random_scenario(np.random.default_rng(seed), kind)
    st_ = GeometryState(s, POINT)
    aff = st_.aff
    im_trace = V(-2 * (aff.phi + aff.potential_a)).real
    oracle = sa.solve_spin_affinity_linear(st_.conn, st_.soldering, im_trace, aff.upsilon)
    assert np.max(np.abs(oracle - V(aff.theta))) <= 1e-11


@pytest.mark.parametrize("name", ["flat-constant-torsion", "conformal-polynomial-torsion", "flrw-torsion",
                                  "epsilon-torsion"])
def test_covariant_constancy(name):
    s = bundled(name)
    st_ = GeometryState(s, s.points[0])
    aff, sf, c = st_.aff, st_.soldering, st_.conn
    assert sa.soldering_residual(aff, sf, c) <= 1e-10
    assert sa.metric_product_residual(aff, sf, c) <= 1e-10
    assert sa.trace_correlation_residual(c, sf, aff, s.formalism, st_.point) <= 1e-10
    probe = np.array([jet.variable(k, st_.point) for k in range(4)])
    assert sa.world_spin_transfer(probe, sf, aff, c) <= 1e-10


def test_torsional_trace_is_potential():
    st_ = GeometryState(bundled("conformal-polynomial-torsion"), POINT)
    aff = st_.aff
    assert np.allclose(V(aff.trace_torsion), -2j * V(aff.potential_a), atol=1e-14)
    assert np.max(np.abs(V(aff.potential_a))) > 0


@pytest.mark.parametrize("iota", [(0.3, -0.2, 0.5, 0.1), (1.0, 0.0, 0.0, -2.0)])
def test_imaginary_trace_shift_is_invisible_to_metric_transport(iota):
    st_ = GeometryState(bundled("flrw-torsion"), POINT)
    shift = jet.const(1.0)[None, :] * np.array(iota)[:, None]
    res = sa.trace_shift_invariance(st_.aff, st_.soldering, st_.conn, shift)
    assert res["split"] <= 1e-14
    # the shift drops out of nabla S but not of nabla of the metric spinor product
    assert res["soldering"] <= 1e-12


def test_inconsistent_real_trace_is_detected():
    st_ = GeometryState(bundled("conformal-polynomial-torsion"), POINT)
    wrong = Formalism.gamma("2 + x1", "0")
    with pytest.raises(InconsistentTrace):
        sa.solve_spin_affinity(st_.conn, st_.soldering, st_.torsional, st_.potential_jets(), wrong, POINT)


@pytest.mark.parametrize("field, a, b, beta, c", [
    ("spin_torsion.b0", "0", "i", "0", "0"),
    ("spin_torsion.beta0", "0", "0", "1 + i*x1", "0"),
    ("spin_torsion.a0+c0", "1", "0", "0", "0"),
])
def test_reality_conditions(field, a, b, beta, c):
    z = ("0",) * 3
    t = sa.TorsionalSpinAffinity.from_strings((a,) + z, (b,) + z, (beta,) + z, (c,) + z)
    with pytest.raises(ValidationError) as info:
        t.validate((0.1, 0.2, 0.3, 0.4))
    assert info.value.field == field
