"""Scenario expression language: parser, printer and evaluators.

Grammar (``^`` binds tighter than unary minus, ``^`` takes integer
exponents only and is right-associative)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | factor
    factor := base ('^' exponent)?
    exponent := '-'? INTEGER ('^' exponent)?
    base   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

Identifiers are the coordinates ``x0..x3``, the constants ``pi``, ``e`` and
the imaginary unit ``i``, and the functions listed in ``FUNCTIONS``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Optional, Union

import mpmath
import numpy as np

from . import jet
from .errors import DomainError, ExprSyntaxError, UnknownIdentifier

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh")
CONSTANTS = {"pi": math.pi, "e": math.e, "i": 1j}
COORDS = ("x0", "x1", "x2", "x3")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Coord:
    index: int


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Coord, Const, Neg, BinOp, Pow, Call]


# ---------------------------------------------------------------------------
# tokenizer
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(source: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}",
                                  line, pos - line_start + 1, "a token")
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            toks.append(_Tok(kind, text, line, pos - line_start + 1))
        for k, ch in enumerate(text):
            if ch == "\n":
                line += 1
                line_start = pos + k + 1
        pos = m.end()
    toks.append(_Tok("end", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, source: str):
        self.toks = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _fail(self, expected: str):
        t = self.tok
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(f"unexpected {what}", t.line, t.col, expected)

    def _accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def _expect(self, text: str):
        if not self._accept(text):
            self._fail(repr(text))

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            self._fail("operator or end of input")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self._accept("-"):
            return Neg(self.unary())
        return self.factor()

    def factor(self) -> Expr:
        base = self.base()
        if self._accept("^"):
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        sign = -1 if self._accept("-") else 1
        t = self.tok
        if t.kind != "num" or not t.text.isdigit():
            self._fail("integer exponent")
        self.i += 1
        n = sign * int(t.text)
        if self._accept("^"):
            n = n ** self.exponent()
            if not isinstance(n, int):
                raise ExprSyntaxError("non-integer exponent", t.line, t.col, "integer exponent")
        return n

    def base(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Num(float(t.text))
        if t.kind == "ident":
            self.i += 1
            if t.text in FUNCTIONS:
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return Call(t.text, arg)
            if t.text in COORDS:
                return Coord(int(t.text[1]))
            if t.text in CONSTANTS:
                return Const(t.text)
            raise UnknownIdentifier(t.text, t.line, t.col)
        if self._accept("("):
            node = self.expr()
            self._expect(")")
            return node
        self._fail("number, identifier or '('")


def parse(source: str) -> Expr:
    """Parse an expression string into an AST."""
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 1, 1, "expression")
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_string(e: Expr) -> str:
    """Render ``e`` so that ``parse(to_string(e)) == e``."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Coord):
        return f"x{e.index}"
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_string(e.arg)})"
    if isinstance(e, Pow):
        return f"{_atom(e.base)}^{e.exponent}"
    if isinstance(e, Neg):
        inner = to_string(e.arg)
        if isinstance(e.arg, BinOp):
            inner = f"({inner})"
        return f"-{inner}"
    left = to_string(e.left)
    right = to_string(e.right)
    if isinstance(e.left, BinOp) and _PREC[e.left.op] < _PREC[e.op]:
        left = f"({left})"
    if isinstance(e.right, BinOp) and _PREC[e.right.op] <= _PREC[e.op]:
        right = f"({right})"
    if isinstance(e.right, Neg):
        right = f"({right})"
    return f"{left} {e.op} {right}"


def _atom(e: Expr) -> str:
    s = to_string(e)
    if isinstance(e, (Num, Coord, Const, Call)) and not s.startswith("-"):
        return s
    return f"({s})"


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _real_positive(x, what: str, strict: bool = True):
    x = np.asarray(x)
    if np.any(np.abs(np.imag(x)) > 1e-14 * (1 + np.abs(x))):
        raise DomainError(f"{what} of a complex value")
    bad = np.real(x) <= 0 if strict else np.real(x) < 0
    if np.any(bad):
        raise DomainError(f"{what} of non-positive value {np.real(x)}")


def eval_jet_array(e: Expr, point) -> np.ndarray:
    """Evaluate ``e`` as a raw jet coefficient vector at ``point``."""
    if isinstance(e, Num):
        return jet.const(e.value)
    if isinstance(e, Coord):
        return jet.variable(e.index, point)
    if isinstance(e, Const):
        return jet.const(CONSTANTS[e.name])
    if isinstance(e, Neg):
        return -eval_jet_array(e.arg, point)
    if isinstance(e, Pow):
        b = eval_jet_array(e.base, point)
        if e.exponent < 0 and jet.value(b) == 0:
            raise DomainError("negative power of zero")
        return jet.power(b, e.exponent)
    if isinstance(e, BinOp):
        a = eval_jet_array(e.left, point)
        b = eval_jet_array(e.right, point)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return jet.mul(a, b)
        if jet.value(b) == 0:
            raise DomainError("division by zero")
        return jet.div(a, b)
    a = eval_jet_array(e.arg, point)
    if e.func == "log":
        _real_positive(jet.value(a), "log")
    elif e.func == "sqrt":
        _real_positive(jet.value(a), "sqrt")
    return getattr(jet, e.func)(a)


def eval_jet(e: Expr, point) -> jet.Jet3:
    """Value and all partial derivatives up to third order at ``point``."""
    return jet.Jet3(eval_jet_array(e, point))


def evaluate(e: Expr, point) -> complex:
    """Plain complex evaluation (no derivatives)."""
    return complex(jet.value(eval_jet_array(e, point)))


def eval_mp(e: Expr, point, mp):
    """Evaluate with an mpmath context ``mp`` (independent of the jet path)."""
    if isinstance(e, Num):
        return mp.mpf(e.value)
    if isinstance(e, Coord):
        return mp.mpf(point[e.index])
    if isinstance(e, Const):
        return {"pi": mp.pi, "e": mp.e, "i": mp.mpc(0, 1)}[e.name]
    if isinstance(e, Neg):
        return -eval_mp(e.arg, point, mp)
    if isinstance(e, Pow):
        return eval_mp(e.base, point, mp) ** e.exponent
    if isinstance(e, BinOp):
        a = eval_mp(e.left, point, mp)
        b = eval_mp(e.right, point, mp)
        return {"+": a + b, "-": a - b, "*": a * b}[e.op] if e.op != "/" else a / b
    return getattr(mp, e.func)(eval_mp(e.arg, point, mp))


def coords_used(e: Expr) -> set[int]:
    if isinstance(e, Coord):
        return {e.index}
    if isinstance(e, (Neg, Call)):
        return coords_used(e.arg)
    if isinstance(e, Pow):
        return coords_used(e.base)
    if isinstance(e, BinOp):
        return coords_used(e.left) | coords_used(e.right)
    return set()


def is_constant_zero(e: Expr) -> bool:
    return isinstance(e, Num) and e.value == 0.0


def shift(e: Expr, offset) -> Expr:
    """Substitute ``x_k -> x_k + offset[k]``."""
    if isinstance(e, Coord):
        if offset[e.index] == 0:
            return e
        return BinOp("+", e, Num(float(offset[e.index]))) if offset[e.index] > 0 else \
            BinOp("-", e, Num(float(-offset[e.index])))
    if isinstance(e, Neg):
        return Neg(shift(e.arg, offset))
    if isinstance(e, Call):
        return Call(e.func, shift(e.arg, offset))
    if isinstance(e, Pow):
        return Pow(shift(e.base, offset), e.exponent)
    if isinstance(e, BinOp):
        return BinOp(e.op, shift(e.left, offset), shift(e.right, offset))
    return e


def permute(e: Expr, perm) -> Expr:
    """Relabel coordinates ``x_k -> x_{perm[k]}``."""
    if isinstance(e, Coord):
        return Coord(perm[e.index])
    if isinstance(e, Neg):
        return Neg(permute(e.arg, perm))
    if isinstance(e, Call):
        return Call(e.func, permute(e.arg, perm))
    if isinstance(e, Pow):
        return Pow(permute(e.base, perm), e.exponent)
    if isinstance(e, BinOp):
        return BinOp(e.op, permute(e.left, perm), permute(e.right, perm))
    return e



# ---------------------------------------------------------------------------
# finite-difference cross-check
# ---------------------------------------------------------------------------

# fourth-order central stencils: offsets (in units of h) and weights
_STENCILS = {
    1: (12, ((-2, 1), (-1, -8), (1, 8), (2, -1))),
    2: (12, ((-2, -1), (-1, 16), (0, -30), (1, 16), (2, -1))),
    3: (8, ((-3, 1), (-2, -8), (-1, 13), (1, -13), (2, 8), (3, -1))),
}
_DPS = 40


@dataclass(frozen=True)
class FDReport:
    order: int
    h: float
    residual_h: float
    residual_h2: float
    observed_order: Optional[float]

    @property
    def exact(self) -> bool:
        """True when the stencil reproduces the jet to far below round-off."""
        return self.observed_order is None


def _fd_partial(e: Expr, point, alpha, h, mp):
    axes = [(k, n) for k, n in enumerate(alpha) if n]
    total = mp.mpf(0)
    for combo in itertools.product(*(_STENCILS[n][1] for _, n in axes)):
        p = [mp.mpf(x) for x in point]
        w = mp.mpf(1)
        for (k, n), (off, wt) in zip(axes, combo):
            p[k] += off * h
            w *= mp.mpf(wt) / (_STENCILS[n][0] * h ** n)
        total += w * eval_mp(e, p, mp)
    return total


def fd_check(e: Expr, point, order: int, h: float) -> FDReport:
    """Compare jet partials of one order with fourth-order central differences.

    Stencils run in 40-digit arithmetic, so differences between steps are pure
    truncation error.  The observed order is ``log2`` of the ratio of successive
    step differences over ``h, h/2, h/4``; it is ``None`` when the stencil is
    exact (polynomials of low degree).
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    if h <= 0:
        raise ValueError("h must be positive")
    j = eval_jet_array(e, point)
    alphas = [m for m in jet.MONOMIALS if sum(m) == order]
    res = [0.0, 0.0]
    d1 = d2 = mpmath.mpf(0)
    with mpmath.workdps(_DPS):
        steps = [mpmath.mpf(h) / 2 ** k for k in range(3)]
        for alpha in alphas:
            idx = [k for k in range(4) for _ in range(alpha[k])]
            exact = complex(jet.partial(j, *idx))
            fd = [_fd_partial(e, point, alpha, s, mpmath.mp) for s in steps]
            for k in range(2):
                res[k] = max(res[k], abs(exact - complex(fd[k])))
            d1 = max(d1, abs(fd[0] - fd[1]))
            d2 = max(d2, abs(fd[1] - fd[2]))
        # rounding floor of a 40-digit stencil divided by h^order
        floor = mpmath.mpf(10) ** (8 - _DPS) / steps[2] ** order
        observed = None
        if d1 > floor and d2 > floor:
            observed = float(mpmath.log(d1 / d2, 2))
    return FDReport(order, h, res[0], res[1], observed)
