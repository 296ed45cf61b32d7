import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bundled
from torspin import gauge as gg
from torspin.errors import UnregisteredObject, ValidationError
from torspin.state import GeometryState

GAMMA_ELEMENTS = [
    gg.GaugeElement.from_strings("1.5", "0.4"),
    gg.GaugeElement.from_strings("1 + 0.2*x0^2 + 0.1*x1*x3", "0.3*x0 - 0.2*x1*x2 + 0.1*x3^2"),
    gg.GaugeElement.from_strings("exp(0.1*x2)", "sin(x0) + 0.2*x3"),
]
EPSILON_ELEMENTS = [
    gg.GaugeElement.from_strings("2", "-0.3"),
    gg.GaugeElement.from_strings("0.7", "0.3*x0*x1 - 0.1*x2^2"),
]


@pytest.fixture(scope="module")
def gamma_state():
    s = bundled("conformal-polynomial-torsion")
    return GeometryState(s, s.points[0])


@pytest.fixture(scope="module")
def epsilon_state():
    s = bundled("epsilon-torsion")
    return GeometryState(s, s.points[0])


@pytest.mark.parametrize("k", range(len(GAMMA_ELEMENTS)))
@pytest.mark.parametrize("name", sorted(gg.REGISTRY))
def test_commuting_square_gamma(gamma_state, name, k):
    res = gg.commuting_squares(gamma_state, GAMMA_ELEMENTS[k], (name,))[name]
    assert res <= 1e-9


@pytest.mark.parametrize("k", range(len(EPSILON_ELEMENTS)))
@pytest.mark.parametrize("name", sorted(gg.REGISTRY))
def test_commuting_square_epsilon(epsilon_state, name, k):
    res = gg.commuting_squares(epsilon_state, EPSILON_ELEMENTS[k], (name,))[name]
    assert res <= 1e-9


@pytest.mark.parametrize("name", ["alpha", "kappa", "torsional_affinity", "potential_a", "f_bivector"])
def test_invariants_are_untouched(gamma_state, name):
    for g in GAMMA_ELEMENTS:
        moved = gg.gauged_state(gamma_state, g)
        getter = gg.REGISTRY[name].getter
        assert np.max(np.abs(getter(moved) - getter(gamma_state))) <= 1e-11


def test_identity_element(gamma_state):
    res = gg.commuting_squares(gamma_state, gg.GaugeElement.identity())
    assert max(res.values()) <= 1e-13
    for name in ("spin_affinity", "psi", "soldering_down_up"):
        x = gg.REGISTRY[name].getter(gamma_state)
        assert np.allclose(gg.transform(name, gg.GaugeElement.identity(), gamma_state), x, atol=0)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.3, 3), st.floats(-2, 2), st.floats(-1, 1), st.floats(-1, 1))
def test_group_law(gamma_state, r, t, a, b):
    g1 = gg.GaugeElement.from_strings(f"{r!r}", f"{a!r}*x0*x1")
    g2 = gg.GaugeElement.from_strings("1 + 0.1*x2^2", f"{t!r} + {b!r}*x3")
    res = gg.group_law_residuals(gamma_state, g1, g2, sorted(gg.REGISTRY))
    assert max(res.values()) <= 1e-9


def test_unregistered_object(gamma_state):
    with pytest.raises(UnregisteredObject):
        gg.transform("weyl_tensor", GAMMA_ELEMENTS[0], gamma_state)
    with pytest.raises(UnregisteredObject):
        gg.commuting_squares(gamma_state, GAMMA_ELEMENTS[0], ("weyl_tensor",))


def test_wrong_law_is_caught(gamma_state, monkeypatch):
    # the spin affinity without its inhomogeneous shift must fail the square
    wrong = dataclasses.replace(gg.REGISTRY["spin_affinity"], shift=None)
    monkeypatch.setitem(gg.REGISTRY, "spin_affinity", wrong)
    res = gg.commuting_squares(gamma_state, GAMMA_ELEMENTS[1], ("spin_affinity",))
    assert res["spin_affinity"] > 1e-3


def test_wrong_valence_is_caught(gamma_state, monkeypatch):
    wrong = dataclasses.replace(gg.REGISTRY["psi"], valence=(2, 0, 0, 0))
    monkeypatch.setitem(gg.REGISTRY, "psi", wrong)
    assert gg.commuting_squares(gamma_state, GAMMA_ELEMENTS[0], ("psi",))["psi"] > 1e-3


def test_epsilon_requires_constant_modulus(epsilon_state):
    g = gg.GaugeElement.from_strings("1 + 0.1*x0", "0")
    with pytest.raises(ValidationError):
        gg.commuting_squares(epsilon_state, g)


@pytest.mark.parametrize("rho", ["-1", "0", "i"])
def test_rho_must_be_positive(gamma_state, rho):
    with pytest.raises(ValidationError):
        gg.GaugeElement.from_strings(rho, "0").rho_jet(gamma_state.point)


def test_gauge_matrix_and_composition():
    p = (0.1, 0.2, 0.3, 0.4)
    g1, g2 = GAMMA_ELEMENTS[1], GAMMA_ELEMENTS[2]
    prod = g1.compose(g2)
    assert np.allclose(prod.matrix(p), g1.matrix(p) @ g2.matrix(p))
    d = gg.GaugeData.of(prod, p)
    assert np.linalg.det(prod.matrix(p)) == pytest.approx(d.delta)
