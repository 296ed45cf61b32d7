"""Independent-component counts by numerical rank over random scenarios.

Each count samples one object at a fixed point across many scenarios whose
inputs are random polynomials of degree at most two, then takes the rank of
the stacked real coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from . import jet
from .errors import InsufficientSamples
from .soldering import Formalism
from .spincurvature import cc
from .spinaffinity import TorsionalSpinAffinity
from .spintensor import RankResult, numerical_rank, real_rows
from .state import GeometryState, Scenario
from .worldgeom import MetricField, TorsionField

POINT = (0.1, 0.2, -0.1, 0.3)
DEFAULT_SAMPLES = 120


def random_polynomial(rng: np.random.Generator, scale: float = 0.1, offset: float = 0.0) -> ex.Expr:
    """A random polynomial of degree at most two in ``x0..x3``."""
    out = ex.Num(offset + scale * rng.uniform(-1, 1))
    for a in range(4):
        xa = ex.Coord(a)
        out = ex.BinOp("+", out, ex.BinOp("*", ex.Num(scale * rng.uniform(-1, 1)), xa))
        for b in range(a, 4):
            mono = ex.BinOp("*", xa, ex.Coord(b))
            out = ex.BinOp("+", out, ex.BinOp("*", ex.Num(scale * rng.uniform(-1, 1)), mono))
    return out


def random_scenario(rng: np.random.Generator, kind: str = "gamma", torsion: bool = True) -> Scenario:
    """Near-Minkowski metric, random torsion, spin torsion, potentials and formalism fields."""
    base = np.diag([1.0, -1.0, -1.0, -1.0])
    metric = MetricField.from_upper({(m, n): random_polynomial(rng, 0.1, base[m, n])
                                     for m in range(4) for n in range(m, 4)})
    tors = {}
    if torsion:
        tors = {(m, n, l): random_polynomial(rng, 0.3)
                for m in range(4) for n in range(m + 1, 4) for l in range(4)}
    z = (ex.Num(0.0),) * 4
    if torsion:
        a, c = [], []
        for _ in range(4):
            p1, p2, p3 = (random_polynomial(rng, 0.3) for _ in range(3))
            a.append(ex.BinOp("+", p1, ex.BinOp("*", ex.Const("i"), p2)))
            c.append(ex.BinOp("+", ex.Neg(p1), ex.BinOp("*", ex.Const("i"), p3)))
        b = tuple(random_polynomial(rng, 0.3) for _ in range(4))
        beta = tuple(random_polynomial(rng, 0.3) for _ in range(4))
        spin = TorsionalSpinAffinity(tuple(a), b, beta, tuple(c))
    else:
        spin = TorsionalSpinAffinity(z, z, z, z)
    potentials = tuple(random_polynomial(rng, 0.3) for _ in range(4))
    if kind == "gamma":
        formalism = Formalism.gamma(random_polynomial(rng, 0.2, 1.5), random_polynomial(rng, 1.0))
    else:
        formalism = Formalism.epsilon()
    return Scenario("random", formalism, metric, TorsionField(tors), spin, potentials)


def _ricci_pieces(st: GeometryState):
    f = st.frame
    _, xi, kappa = st.decomposition
    xb = jet.value(st.spinors.xi_big)
    scalar = kappa.real * np.einsum("ab,xy->axby", f.m_lo, f.mb_lo)
    a = np.einsum("xy,ab->axby", f.mb_lo, xi)
    b = np.einsum("xyab->axby", xb)
    return scalar, a + cc(a), b + cc(b)


def _c_pieces(st: GeometryState):
    f = st.frame
    cv = jet.value(st.mixed.full)
    c_lo = np.einsum("mnac,cb->mnab", cv, f.m_lo)
    fv = jet.value(st.mixed.f)
    f_part = -1j * fv[:, :, None, None] * f.m_lo[None, None]
    return c_lo - f_part, f_part


V = jet.value

# name -> (expected count, sampler)
SAMPLERS = {
    "torsionless affinity": (40, lambda st: V(st.conn.gamma_sym)),
    "torsion": (24, lambda st: V(st.conn.torsion)),
    "riemann": (36, lambda st: V(st.curv.riemann_low)),
    "ricci": (16, lambda st: V(st.curv.ricci)),
    "torsionless spin affinity": (32, lambda st: V(st.aff.theta_sym)),
    "torsionless spin affinity trace": (8, lambda st: V(st.aff.trace_sym)),
    "torsional spin affinity": (20, lambda st: V(st.aff.theta_torsion)),
    "torsional spin affinity trace": (4, lambda st: V(st.aff.trace_torsion)),
    "mixed curvature": (48, lambda st: sum(_c_pieces(st))),
    "mixed curvature riemann part": (36, lambda st: _c_pieces(st)[0]),
    "mixed curvature trace part": (12, lambda st: _c_pieces(st)[1]),
    "curvature spinor unprimed": (24, lambda st: V(st.spinors.unprimed)),
    "curvature spinor primed": (24, lambda st: V(st.spinors.primed)),
    "pair unprimed": (18, lambda st: V(st.spinors.x)),
    "pair primed": (18, lambda st: V(st.spinors.xi_big)),
    "pair total": (36, lambda st: np.concatenate([V(st.spinors.x).ravel(),
                                                          V(st.spinors.xi_big).ravel()])),
    "psi": (10, lambda st: st.decomposition[0]),
    "xi": (6, lambda st: st.decomposition[1]),
    "kappa": (2, lambda st: np.atleast_1d(st.decomposition[2])),
    "ricci scalar part": (1, lambda st: _ricci_pieces(st)[0]),
    "ricci xi part": (6, lambda st: _ricci_pieces(st)[1]),
    "ricci big xi part": (9, lambda st: _ricci_pieces(st)[2]),
    "tau": (24, lambda st: V(st.torsion_spinors.tau)),
}


@dataclass(frozen=True)
class CountRow:
    name: str
    expected: int
    result: RankResult

    @property
    def passed(self) -> bool:
        return self.result.rank == self.expected and self.result.clean


def component_counts(seed: int = 0, samples: int = DEFAULT_SAMPLES, names=None) -> list[CountRow]:
    """Rank every registered object over ``samples`` random scenarios."""
    names = list(SAMPLERS) if names is None else list(names)
    bound = max(SAMPLERS[n][0] for n in names)
    if samples < 2 * bound:
        raise InsufficientSamples(f"{samples} samples for a bound of {bound}")
    rng = np.random.default_rng(seed)
    rows = {n: [] for n in names}
    for _ in range(samples):
        st = GeometryState(random_scenario(rng, "gamma"), POINT)
        for n in names:
            rows[n].append(SAMPLERS[n][1](st))
    out = []
    for n in names:
        res = numerical_rank(real_rows(rows[n]))
        out.append(CountRow(n, SAMPLERS[n][0], res))
    return out
