import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torspin import expr as ex
from torspin import jet
from torspin.errors import DomainError, ExprSyntaxError, UnknownIdentifier

POINT = (0.3, -0.2, 0.5, 0.1)


# ---------------------------------------------------------------------------
# jets
# ---------------------------------------------------------------------------

def test_variable_partials():
    x = jet.variable(2, POINT)
    assert jet.value(x) == pytest.approx(0.5)
    assert jet.partial(x, 2) == pytest.approx(1.0)
    assert jet.partial(x, 0) == 0
    assert jet.partial(x, 2, 2) == 0


def test_product_rule_third_order():
    x, y = jet.variable(0, POINT), jet.variable(1, POINT)
    f = jet.mul(jet.power(x, 3), y)  # x^3 y
    assert jet.partial(f, 0, 0, 1) == pytest.approx(6 * POINT[0])
    assert jet.partial(f, 0, 0, 0) == pytest.approx(6 * POINT[1])
    assert jet.partial(f, 0, 1) == pytest.approx(3 * POINT[0] ** 2)


@pytest.mark.parametrize("fn, d1, d2, d3", [
    (jet.exp, math.exp, math.exp, math.exp),
    (jet.sin, math.cos, lambda t: -math.sin(t), lambda t: -math.cos(t)),
    (jet.cos, lambda t: -math.sin(t), lambda t: -math.cos(t), math.sin),
    (jet.log, lambda t: 1 / t, lambda t: -1 / t ** 2, lambda t: 2 / t ** 3),
    (jet.sqrt, lambda t: 0.5 / math.sqrt(t), lambda t: -0.25 * t ** -1.5, lambda t: 0.375 * t ** -2.5),
    (jet.sinh, math.cosh, math.sinh, math.cosh),
    (jet.cosh, math.sinh, math.cosh, math.sinh),
    (jet.recip, lambda t: -1 / t ** 2, lambda t: 2 / t ** 3, lambda t: -6 / t ** 4),
])
def test_elementary_function_derivatives(fn, d1, d2, d3):
    t = POINT[2]
    f = fn(jet.variable(2, POINT))
    assert jet.partial(f, 2) == pytest.approx(d1(t), rel=1e-13)
    assert jet.partial(f, 2, 2) == pytest.approx(d2(t), rel=1e-13)
    assert jet.partial(f, 2, 2, 2) == pytest.approx(d3(t), rel=1e-13)


def test_tan_derivative():
    t = POINT[0]
    f = jet.tan(jet.variable(0, POINT))
    assert jet.partial(f, 0) == pytest.approx(1 / math.cos(t) ** 2, rel=1e-13)


def test_matinv_and_det():
    x = [jet.variable(k, POINT) for k in range(4)]
    m = np.array([[jet.const(2.0) + x[0], x[1], jet.const(0.0), jet.const(0.0)],
                  [x[1], jet.const(3.0) + x[2], jet.const(0.0), jet.const(0.0)],
                  [jet.const(0.0), jet.const(0.0), jet.const(1.0), x[3]],
                  [jet.const(0.0), jet.const(0.0), jet.const(0.0), jet.const(1.0)]])
    inv = jet.matinv(m)
    ident = jet.einsum("ab,bc->ac", m, inv)
    assert np.allclose(ident, jet.const(np.eye(4)), atol=1e-13)
    d = jet.det4(m)
    # det = (2+x0)(3+x2) - x1^2
    assert jet.partial(d, 0) == pytest.approx(3 + POINT[2])
    assert jet.partial(d, 1, 1) == pytest.approx(-2.0)


def test_grad_puts_derivative_first():
    v = np.array([jet.variable(k, POINT) for k in range(4)])
    assert np.allclose(jet.value(jet.grad(v)), np.eye(4))


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 3))
def test_field_identities(a, b, c):
    p = (a, b, c, 0.0)
    x, y, z = (jet.variable(k, p) for k in range(3))
    one = jet.mul(jet.exp(x), jet.exp(-x))
    assert np.allclose(one, jet.const(1.0), atol=1e-10)
    pyth = jet.mul(jet.sin(y), jet.sin(y)) + jet.mul(jet.cos(y), jet.cos(y))
    assert np.allclose(pyth, jet.const(1.0), atol=1e-12)
    assert np.allclose(jet.log(jet.exp(z)), z, atol=1e-10)
    assert np.allclose(jet.mul(jet.div(x, z), z), x, atol=1e-9 * (1 + abs(a)))


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("text, value", [
    ("1 + 2*3", 7),
    ("2^3^2", 512),
    ("-2^2", -4),
    ("(1 - 2) - 3", -4),
    ("8/4/2", 1),
    ("x0 + 2*x1", 0.3 - 0.4),
    ("exp(0)", 1),
    ("pi", math.pi),
    ("e", math.e),
    ("i*i", -1),
    ("1.5e-1*x2", 0.075),
    ("sqrt(4) + log(e) + cos(0) + sinh(0) + cosh(0) + tan(0) + sin(0)", 5),
])
def test_parse_and_evaluate(text, value):
    assert ex.evaluate(ex.parse(text), POINT) == pytest.approx(value)


@pytest.mark.parametrize("text", ["1 +", "(x0", "x0 x1", "2^x0", "sin x0", "", "1..2", "x0)", "3 $ 4"])
def test_syntax_errors(text):
    with pytest.raises(ExprSyntaxError) as info:
        ex.parse(text)
    assert info.value.line >= 1 and info.value.col >= 1


@pytest.mark.parametrize("text", ["x4", "y", "foo(1)", "gamma"])
def test_unknown_identifiers(text):
    with pytest.raises(UnknownIdentifier):
        ex.parse(text)


@pytest.mark.parametrize("text", ["log(x0 - 1)", "sqrt(-1 - x1^2)", "1/(x0 - x0)", "log(0*x1)"])
def test_domain_errors(text):
    with pytest.raises(DomainError):
        ex.eval_jet_array(ex.parse(text), POINT)


_leaf = st.one_of(
    st.sampled_from(["x0", "x1", "x2", "x3", "pi", "i"]),
    st.floats(0.01, 9, allow_nan=False).map(lambda v: f"{v:.4g}"),
)


def _expressions():
    return st.recursive(
        _leaf,
        lambda sub: st.one_of(
            st.tuples(sub, st.sampled_from("+-*/"), sub).map(lambda t: f"({t[0]}) {t[1]} ({t[2]})"),
            st.tuples(sub, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
            sub.map(lambda s: f"-({s})"),
            st.tuples(st.sampled_from(["sin", "cos", "exp", "sinh"]), sub).map(lambda t: f"{t[0]}({t[1]})"),
        ),
        max_leaves=8,
    )


@settings(max_examples=150, deadline=None)
@given(_expressions())
def test_round_trip(text):
    e = ex.parse(text)
    printed = ex.to_string(e)
    assert ex.parse(printed) == e
    assert ex.to_string(ex.parse(printed)) == printed


@settings(max_examples=60, deadline=None)
@given(_expressions())
def test_jet_value_matches_evaluate(text):
    e = ex.parse(text)
    try:
        v = ex.evaluate(e, POINT)
    except (DomainError, OverflowError, ZeroDivisionError):
        return
    j = ex.eval_jet_array(e, POINT)
    assert complex(jet.value(j)) == pytest.approx(complex(v), rel=1e-12, abs=1e-12)


def test_shift_and_permute():
    e = ex.parse("x0*x1^2 + exp(x3)")
    moved = ex.shift(e, (1.0, 0.5, 0.0, -0.2))
    assert ex.evaluate(moved, (0, 0, 0, 0)) == pytest.approx(ex.evaluate(e, (1.0, 0.5, 0.0, -0.2)))
    swapped = ex.permute(e, (1, 0, 2, 3))
    assert ex.evaluate(swapped, (2.0, 3.0, 0, 0)) == pytest.approx(ex.evaluate(e, (3.0, 2.0, 0, 0)))
    assert ex.coords_used(e) == {0, 1, 3}
    assert ex.is_constant_zero(ex.parse("0"))
    assert not ex.is_constant_zero(ex.parse("x0"))


# ---------------------------------------------------------------------------
# jet against finite differences
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("text", ["exp(0.3*x0)*sin(x1)", "log(2 + x0*x2)/(1 + x3^2)", "sqrt(3 + x1)*cosh(x2)"])
@pytest.mark.parametrize("order", [1, 2, 3])
def test_fd_fourth_order(text, order):
    rep = ex.fd_check(ex.parse(text), POINT, order, 1e-3)
    assert rep.residual_h <= 1e-6
    assert rep.observed_order == pytest.approx(4.0, abs=0.5)


def test_fd_exact_on_low_degree_polynomial():
    rep = ex.fd_check(ex.parse("1 + x0*x1 - 0.5*x2^3"), POINT, 2, 1e-3)
    assert rep.exact
    assert rep.residual_h <= 1e-12


def test_fd_rejects_bad_arguments():
    with pytest.raises(ValueError):
        ex.fd_check(ex.parse("x0"), POINT, 4, 1e-3)
    with pytest.raises(ValueError):
        ex.fd_check(ex.parse("x0"), POINT, 1, 0.0)
