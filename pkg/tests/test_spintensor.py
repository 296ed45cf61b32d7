import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from torspin import spintensor as stn
from torspin.errors import IncompatibleSlots, InsufficientSamples, NotAntisymmetric
from torspin.soldering import ETA

MINK = stn.WorldMetric(ETA, np.linalg.inv(ETA))

_reals = st.floats(-5, 5, allow_nan=False)


def _tensor(sig, data):
    return stn.SpinTensor(stn.IndexSignature.parse(sig), data)


def _complex(shape):
    return st.tuples(arrays(float, shape, elements=_reals), arrays(float, shape, elements=_reals)).map(
        lambda p: p[0] + 1j * p[1])


def test_signature_parse_and_shape():
    sig = stn.IndexSignature.parse("_w ^A _A' ^w")
    assert sig.shape == (4, 2, 2, 4)
    assert str(sig) == "_w ^A _A' ^w"


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        _tensor("_A _A", np.zeros((2, 3)))


def test_add_requires_same_signature():
    a = _tensor("_A _A", np.eye(2))
    b = _tensor("^A _A", np.eye(2))
    with pytest.raises(IncompatibleSlots):
        a + b
    assert np.allclose((a - a).data, 0)


def test_eps_raises_and_lowers_consistently():
    # eps^{AC} eps_{BC} = delta_B^A
    assert np.allclose(np.einsum("ac,bc->ba", stn.EPS, stn.EPS), np.eye(2))
    xi = _tensor("_A", np.array([1.0 + 2j, -0.5j]))
    up = stn.raise_lower(xi, 0, "eps")
    assert up.signature.slots[0].up
    back = stn.raise_lower(up, 0, "eps")
    assert np.allclose(back.data, xi.data)
    # spinor inner product is antisymmetric: xi_A eta^A = -xi^A eta_A
    eta = _tensor("_A", np.array([0.3, 1.1 - 1j]))
    eta_up = stn.raise_lower(eta, 0, "eps")
    assert np.dot(xi.data, eta_up.data) == pytest.approx(-np.dot(up.data, eta.data))


@pytest.mark.parametrize("modulus, phase", [(1.0, 0.0), (2.5, 0.7), (0.3, -1.2)])
def test_gamma_metric_round_trip(modulus, phase):
    g = stn.GammaSpinor.polar(modulus, phase)
    assert np.allclose(np.einsum("ac,bc->ba", g.upper, g.lower), np.eye(2))
    t = _tensor("_A _A'", np.array([[1, 2j], [0.5, -1]]))
    for slot in (0, 1):
        once = stn.raise_lower(t, slot, g)
        assert np.allclose(stn.raise_lower(once, slot, g).data, t.data)


def test_eps_raising_shifts_density_weight():
    t = _tensor("^A ^A'", np.ones((2, 2)))
    lowered = stn.raise_lower(stn.raise_lower(t, 0, "eps"), 1, "eps")
    # weight is half of (upper minus lower) slots per kind
    assert lowered.signature.weight == (-1.0, -1.0)


def test_world_raise_lower():
    v = _tensor("^w", np.array([1.0, 2.0, 3.0, 4.0]))
    low = stn.raise_lower(v, 0, MINK)
    assert np.allclose(low.data, [1, -2, -3, -4])
    with pytest.raises(IncompatibleSlots):
        stn.raise_lower(v, 0, "eps")
    with pytest.raises(IncompatibleSlots):
        stn.raise_lower(_tensor("_A", np.ones(2)), 0, MINK)


@settings(max_examples=30, deadline=None)
@given(_complex((2, 2, 2)))
def test_sym_antisym_projections(x):
    t = _tensor("_A _A _A", x)
    s = stn.sym(t, 0, 1, 2)
    a = stn.antisym(t, 0, 1)
    assert np.allclose(stn.sym(s, 0, 1, 2).data, s.data)
    assert np.allclose(s.data, np.transpose(s.data, (1, 0, 2)))
    assert np.allclose(a.data, -np.swapaxes(a.data, 0, 1))
    pair = stn.sym(t, 0, 1).data + a.data
    assert np.allclose(pair, x)
    # no totally antisymmetric part on a two-dimensional space
    assert np.allclose(stn.antisym(t, 0, 1, 2).data, 0, atol=1e-12)


def test_sym_requires_matching_slots():
    with pytest.raises(IncompatibleSlots):
        stn.sym(_tensor("_A ^A", np.ones((2, 2))), 0, 1)


@settings(max_examples=30, deadline=None)
@given(_complex((4, 4)))
def test_contract_is_trace(x):
    t = _tensor("_w ^w", x)
    assert stn.contract(t, 0, 1).data == pytest.approx(np.trace(x))


def test_contract_rejects_same_variance():
    with pytest.raises(IncompatibleSlots):
        stn.contract(_tensor("_w _w", np.eye(4)), 0, 1)
    with pytest.raises(IncompatibleSlots):
        stn.contract(_tensor("_w ^A", np.ones((4, 2))), 0, 1)


def test_delta_contracts_to_dimension():
    assert stn.contract(stn.delta(stn.WORLD), 0, 1).data == pytest.approx(4)
    assert stn.contract(stn.delta(stn.UNPRIMED), 0, 1).data == pytest.approx(2)


def test_world_dual_twice_is_minus_identity():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(4, 4))
    x = x - x.T
    t = _tensor("_w _w", x)
    dd = stn.world_dual(stn.world_dual(t, 0, 1, MINK), 0, 1, MINK)
    assert np.allclose(dd.data, -x)


def test_world_dual_requires_antisymmetry():
    with pytest.raises(NotAntisymmetric):
        stn.world_dual(_tensor("_w _w", np.eye(4)), 0, 1, MINK)


def test_hermiticity():
    h = np.array([[1.0, 2 + 1j], [2 - 1j, 3.0]])
    assert stn.is_hermitian(_tensor("_A _A'", h), 0, 1)
    assert not stn.is_hermitian(_tensor("_A _A'", 1j * h), 0, 1)
    with pytest.raises(IncompatibleSlots):
        stn.is_hermitian(_tensor("_A _A", h), 0, 1)


@pytest.mark.parametrize("dim", [1, 3, 6, 10])
def test_rank_count_of_known_subspace(dim):
    basis = np.random.default_rng(dim).normal(size=(dim, 12))
    res = stn.rank_count(lambda rng: rng.normal(size=dim) @ basis, samples=40, bound=dim + 2)
    assert res.rank == dim
    assert res.clean


def test_rank_count_needs_enough_samples():
    with pytest.raises(InsufficientSamples):
        stn.rank_count(lambda rng: rng.normal(size=5), samples=7, bound=5)
