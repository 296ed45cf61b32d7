"""Order-3 Taylor jets in four real variables.

A jet field is a complex numpy array whose *last* axis has length ``NCOEF``
(35) and holds the Taylor coefficients ``c_a`` of a function about the
evaluation point, ``f(p + h) = sum_a c_a h^a`` over multi-indices ``|a| <= 3``.
Leading axes are ordinary tensor slots, so a metric jet has shape
``(4, 4, 35)``.

Products are truncated at total degree 3.  Differentiating a jet drops one
order of validity: the top-degree coefficients of ``grad(f)`` are zero, not
exact.  Callers must never differentiate more than three times along any
path before reading values.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

NVAR = 4
ORDER = 3


def _monomials():
    out = []
    for deg in range(ORDER + 1):
        for combo in itertools.combinations_with_replacement(range(NVAR), deg):
            alpha = [0] * NVAR
            for k in combo:
                alpha[k] += 1
            out.append(tuple(alpha))
    return out


MONOMIALS: list[tuple[int, ...]] = _monomials()
NCOEF = len(MONOMIALS)
INDEX = {m: i for i, m in enumerate(MONOMIALS)}
DEGREE = np.array([sum(m) for m in MONOMIALS])
FACTORIAL = np.array([math.prod(math.factorial(k) for k in m) for m in MONOMIALS], dtype=float)


def _product_table():
    ii, jj, kk = [], [], []
    for i, a in enumerate(MONOMIALS):
        for j, b in enumerate(MONOMIALS):
            c = tuple(x + y for x, y in zip(a, b))
            if sum(c) <= ORDER:
                ii.append(i)
                jj.append(j)
                kk.append(INDEX[c])
    scatter = np.zeros((len(kk), NCOEF))
    scatter[np.arange(len(kk)), kk] = 1.0
    return np.array(ii), np.array(jj), scatter


_PI, _PJ, _SCATTER = _product_table()


def _derivative_table():
    d = np.zeros((NVAR, NCOEF, NCOEF))
    for mu in range(NVAR):
        for i, beta in enumerate(MONOMIALS):
            if sum(beta) == ORDER:
                continue
            up = list(beta)
            up[mu] += 1
            d[mu, INDEX[tuple(up)], i] = beta[mu] + 1
    return d


_DERIV = _derivative_table()


# ---------------------------------------------------------------------------
# construction / inspection
# ---------------------------------------------------------------------------

def const(x) -> np.ndarray:
    """Lift an array of values to a jet field with vanishing derivatives."""
    x = np.asarray(x, dtype=complex)
    out = np.zeros(x.shape + (NCOEF,), dtype=complex)
    out[..., 0] = x
    return out


def variable(k: int, point) -> np.ndarray:
    """Jet of the coordinate function ``x_k`` at ``point``."""
    out = np.zeros(NCOEF, dtype=complex)
    out[0] = point[k]
    out[1 + k] = 1.0
    return out


def value(a: np.ndarray) -> np.ndarray:
    return a[..., 0]


def partial(a: np.ndarray, *indices: int) -> np.ndarray:
    """Partial derivative d^n a / dx_{i1}...dx_{in} at the expansion point."""
    alpha = [0] * NVAR
    for k in indices:
        alpha[k] += 1
    i = INDEX[tuple(alpha)]
    return a[..., i] * FACTORIAL[i]


def truncate(a: np.ndarray, order: int) -> np.ndarray:
    """Zero all coefficients above ``order``."""
    out = a.copy()
    out[..., DEGREE > order] = 0
    return out


def conj(a: np.ndarray) -> np.ndarray:
    # expansion variables are real, so conjugation acts coefficientwise
    return np.conj(a)


# ---------------------------------------------------------------------------
# arithmetic
# ---------------------------------------------------------------------------

def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise truncated product (broadcasting over leading axes)."""
    return (a[..., _PI] * b[..., _PJ]) @ _SCATTER


def _pair(spec_a, spec_b, spec_out, a, b):
    letter = "Z"
    prod = np.einsum(f"{spec_a}{letter},{spec_b}{letter}->{spec_out}{letter}",
                     a[..., _PI], b[..., _PJ])
    return prod @ _SCATTER


def einsum(spec: str, *ops: np.ndarray) -> np.ndarray:
    """``np.einsum`` over the slot axes with truncated jet multiplication.

    The subscripts describe only the slot axes; the trailing jet axis is
    implicit.  Single-letter lowercase/uppercase subscripts except ``Z``.
    """
    lhs, out = spec.replace(" ", "").split("->")
    ins = lhs.split(",")
    if len(ins) != len(ops):
        raise ValueError(f"einsum spec {spec!r} expects {len(ins)} operands")
    if len(ops) == 1:
        return np.einsum(f"{ins[0]}Z->{out}Z", ops[0])
    cur, cur_spec = ops[0], ins[0]
    for k in range(1, len(ops)):
        rest = set(out).union(*ins[k + 1:])
        keep = [c for c in dict.fromkeys(cur_spec + ins[k]) if c in rest]
        inter = "".join(keep) if k < len(ops) - 1 else out
        cur = _pair(cur_spec, ins[k], inter, cur, ops[k])
        cur_spec = inter
    return cur


def _compose(a: np.ndarray, derivs) -> np.ndarray:
    """Apply a univariate function given its derivatives at ``value(a)``."""
    h = a.copy()
    h[..., 0] = 0
    h2 = mul(h, h)
    h3 = mul(h2, h)
    f0, f1, f2, f3 = derivs
    out = f1[..., None] * h + (f2 / 2.0)[..., None] * h2 + (f3 / 6.0)[..., None] * h3
    out[..., 0] += f0
    return out


def recip(a: np.ndarray) -> np.ndarray:
    x = value(a)
    if np.any(x == 0):
        raise ZeroDivisionError("reciprocal of a jet with zero value")
    r = 1.0 / x
    return _compose(a, (r, -r ** 2, 2 * r ** 3, -6 * r ** 4))


def div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return mul(a, recip(b))


def power(a: np.ndarray, n: int) -> np.ndarray:
    if n < 0:
        return power(recip(a), -n)
    out = const(np.ones(a.shape[:-1]))
    base = a
    while n:
        if n & 1:
            out = mul(out, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return out


def exp(a):
    e = np.exp(value(a))
    return _compose(a, (e, e, e, e))


def log(a):
    x = value(a)
    return _compose(a, (np.log(x), 1 / x, -1 / x ** 2, 2 / x ** 3))


def sqrt(a):
    x = value(a)
    s = np.sqrt(x)
    return _compose(a, (s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x)))


def sin(a):
    x = value(a)
    s, c = np.sin(x), np.cos(x)
    return _compose(a, (s, c, -s, -c))


def cos(a):
    x = value(a)
    s, c = np.sin(x), np.cos(x)
    return _compose(a, (c, -s, -c, s))


def tan(a):
    x = value(a)
    t = np.tan(x)
    s2 = 1 + t * t
    return _compose(a, (t, s2, 2 * t * s2, 2 * s2 * (1 + 3 * t * t)))


def sinh(a):
    x = value(a)
    s, c = np.sinh(x), np.cosh(x)
    return _compose(a, (s, c, s, c))


def cosh(a):
    x = value(a)
    s, c = np.sinh(x), np.cosh(x)
    return _compose(a, (c, s, c, s))


# ---------------------------------------------------------------------------
# calculus and linear algebra on jet fields
# ---------------------------------------------------------------------------

def grad(a: np.ndarray) -> np.ndarray:
    """Partial gradient; the new derivative axis is placed first.

    The result is valid to one order less than ``a``.
    """
    return np.einsum("...j,mjk->m...k", a, _DERIV)


def matinv(m: np.ndarray) -> np.ndarray:
    """Inverse of an ``(n, n, NCOEF)`` matrix jet by Neumann series."""
    m0inv = np.linalg.inv(value(m))
    h = m.copy()
    h[..., 0] = 0
    x = -einsum("ij,jk->ik", const(m0inv), h)
    term = const(np.eye(m.shape[0]))
    total = term.copy()
    for _ in range(ORDER):
        term = einsum("ij,jk->ik", x, term)
        total = total + term
    return einsum("ij,jk->ik", total, const(m0inv))


def det4(m: np.ndarray) -> np.ndarray:
    """Determinant of a ``(4, 4, NCOEF)`` matrix jet (Leibniz expansion)."""
    total = np.zeros(NCOEF, dtype=complex)
    for perm in itertools.permutations(range(4)):
        sign = _perm_sign(perm)
        t = mul(mul(m[0, perm[0]], m[1, perm[1]]), mul(m[2, perm[2]], m[3, perm[3]]))
        total = total + sign * t
    return total


def _perm_sign(perm) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# scalar wrapper
# ---------------------------------------------------------------------------

_PAIRS = [(m, n) for m in range(NVAR) for n in range(m, NVAR)]
_TRIPLES = [(a, b, c) for a in range(NVAR) for b in range(a, NVAR) for c in range(b, NVAR)]


class Jet3:
    """Scalar order-3 jet with operator overloading.

    ``d1[mu]`` are first partials, ``d2`` the 10 second partials in canonical
    order ``mu <= nu`` and ``d3`` the 20 third partials ``a <= b <= c``.
    """

    __slots__ = ("coef",)

    def __init__(self, coef):
        coef = np.asarray(coef, dtype=complex)
        if coef.shape != (NCOEF,):
            raise ValueError(f"Jet3 needs {NCOEF} coefficients, got {coef.shape}")
        self.coef = coef

    @classmethod
    def constant(cls, x) -> "Jet3":
        return cls(const(x))

    @classmethod
    def coordinate(cls, k: int, point) -> "Jet3":
        return cls(variable(k, point))

    @property
    def value(self) -> complex:
        return complex(self.coef[0])

    @property
    def d1(self) -> np.ndarray:
        return np.array([partial(self.coef, m) for m in range(NVAR)])

    @property
    def d2(self) -> np.ndarray:
        return np.array([partial(self.coef, *p) for p in _PAIRS])

    @property
    def d3(self) -> np.ndarray:
        return np.array([partial(self.coef, *t) for t in _TRIPLES])

    def deriv(self, *indices: int) -> complex:
        if not indices:
            return self.value
        return complex(partial(self.coef, *indices))

    def _lift(self, other):
        if isinstance(other, Jet3):
            return other.coef
        return const(other)

    def __add__(self, other):
        return Jet3(self.coef + self._lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Jet3(self.coef - self._lift(other))

    def __rsub__(self, other):
        return Jet3(self._lift(other) - self.coef)

    def __mul__(self, other):
        return Jet3(mul(self.coef, self._lift(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Jet3(div(self.coef, self._lift(other)))

    def __rtruediv__(self, other):
        return Jet3(div(self._lift(other), self.coef))

    def __neg__(self):
        return Jet3(-self.coef)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("jets support integer powers only")
        return Jet3(power(self.coef, n))

    def __repr__(self):
        return f"Jet3(value={self.value:.6g}, d1={np.round(self.d1, 6)})"

