import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import bundled, without_torsion
from torspin import jet
from torspin import spincurvature as sc
from torspin.spintensor import EPS
from torspin.state import GeometryState

V = jet.value
_r = st.floats(-3, 3, allow_nan=False)


def _cplx(shape):
    return st.tuples(arrays(float, shape, elements=_r), arrays(float, shape, elements=_r)).map(
        lambda p: p[0] + 1j * p[1])


def _metric(modulus, phase):
    g = modulus * np.exp(1j * phase)
    return g * EPS, EPS / g


@settings(max_examples=60, deadline=None)
@given(_cplx((2, 2, 2, 2)), _cplx((2, 2)), _cplx(()), st.floats(0.2, 3), st.floats(-3, 3))
def test_decomposition_recovers_injected_pieces(raw, xi_raw, kappa, modulus, phase):
    psi = sc._sym4(raw)
    xi = 0.5 * (xi_raw + xi_raw.T)
    kappa = complex(kappa)
    m_lo, m_hi = _metric(modulus, phase)
    x = sc.reassemble(psi, xi, kappa, m_lo)
    psi2, xi2, kappa2 = sc.irreducible_decomposition(x, m_lo, m_hi)
    assert np.max(np.abs(psi2 - psi)) <= 1e-12 * max(1.0, np.max(np.abs(psi)))
    assert np.max(np.abs(xi2 - xi)) <= 1e-12 * max(1.0, np.max(np.abs(xi)))
    assert abs(kappa2 - kappa) <= 1e-12 * max(1.0, abs(kappa))


def test_kappa_coefficient_is_a_third():
    m_lo, m_hi = _metric(1.0, 0.0)
    x = sc.reassemble(np.zeros((2,) * 4), np.zeros((2, 2)), 1.0, m_lo, kappa_coefficient=2.0 / 3.0)
    assert sc.irreducible_decomposition(x, m_lo, m_hi)[2] == pytest.approx(2.0)


@pytest.mark.parametrize("name", ["flat-constant-torsion", "conformal-polynomial-torsion", "flrw-torsion",
                                  "epsilon-torsion"])
def test_curvature_spinor_identities(name):
    s = bundled(name)
    st_ = GeometryState(s, s.points[0])
    assert max(sc.curvature_spinor_checks(st_.mixed, st_.spinors, st_.soldering).values()) <= 1e-10
    f = st_.frame
    assert max(sc.decomposition_check(V(st_.spinors.x), f.m_lo, f.m_hi).values()) <= 1e-12
    assert max(sc.riemann_reconstruction(st_.spinors, st_.soldering, st_.conn, st_.curv).values()) <= 1e-9


@pytest.mark.parametrize("name", ["conformal-polynomial-torsion", "flrw-torsion"])
def test_torsionless_limit_of_irreducible_pieces(name):
    s = without_torsion(bundled(name))
    st_ = GeometryState(s, s.points[0])
    psi, xi, kappa = st_.decomposition
    assert np.max(np.abs(xi)) <= 1e-10
    assert abs(kappa.imag) <= 1e-10
    assert abs(kappa) > 1e-4


def test_torsion_produces_xi():
    s = bundled("conformal-polynomial-torsion")
    _, xi, _ = GeometryState(s, s.points[0]).decomposition
    assert np.max(np.abs(xi)) > 1e-4


def test_torsion_square_shuffles_hold_for_random_torsion():
    rng = np.random.default_rng(1)
    t = rng.normal(size=(4, 4, 4))
    t = t - np.swapaxes(t, 0, 1)
    assert max(sc.torsion_square_shuffles(t).values()) <= 1e-13


def test_mixed_curvature_trace_is_imaginary():
    s = bundled("flrw-torsion")
    st_ = GeometryState(s, s.points[1])
    tr = V(st_.mixed.trace)
    assert np.max(np.abs(tr.real)) <= 1e-12
    assert np.allclose(tr, -2j * V(st_.mixed.f))


def test_cc_swaps_primed_and_unprimed_axes():
    x = np.arange(16).reshape(2, 2, 2, 2) * (1 + 1j)
    y = sc.cc(x)
    assert y[0, 1, 1, 0] == np.conj(x[1, 0, 0, 1])
    assert np.array_equal(sc.cc(y), x)


@pytest.mark.parametrize("coefficient, passes", [(sc.ALPHA_PRINTED, True), (sc.ALPHA_DIAGNOSTIC, False)])
def test_alpha_coupling_in_spinor_bianchi_form(coefficient, passes):
    s = bundled("flrw-torsion")
    st_ = GeometryState(s, s.points[0])
    assert np.max(np.abs(st_.alpha_world())) > 1e-2
    args = (st_.spinors, st_.torsion_spinors, st_.aff, st_.conn, st_.curv, st_.soldering, st_.alpha)
    res = sc.dual_bianchi_spinor_check(*args, alpha_coefficient=coefficient)
    assert (res["assembled"] <= 1e-8) is passes
