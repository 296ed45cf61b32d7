"""Diagonal spin gauge transformations and their action on derived objects.

A gauge element is ``Lambda_A^B = sqrt(rho) exp(i theta) delta_A^B`` with
determinant ``Delta = rho exp(2 i theta)``.  A spinor object with ``n_lo``
(``n_up``) lower (upper) unprimed and ``p_lo`` (``p_up``) primed indices picks
up

    (sqrt(rho) e^{i theta})^(n_lo - n_up) (sqrt(rho) e^{-i theta})^(p_lo - p_up)

and, in the epsilon formalism, an extra ``Delta^w conj(Delta)^wbar`` for a
density of weights ``(w, wbar)``.  Connection-like objects add an
inhomogeneous shift.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import expr as ex
from . import jet
from .errors import UnregisteredObject, ValidationError
from .state import GeometryState, Scenario

V = jet.value


@dataclass(frozen=True)
class GaugeElement:
    rho: ex.Expr
    theta: ex.Expr

    @classmethod
    def from_strings(cls, rho: str, theta: str) -> "GaugeElement":
        return cls(ex.parse(rho), ex.parse(theta))

    @classmethod
    def identity(cls) -> "GaugeElement":
        return cls(ex.Num(1.0), ex.Num(0.0))

    def rho_jet(self, point) -> np.ndarray:
        r = ex.eval_jet_array(self.rho, point)
        if abs(V(r).imag) > 1e-14 or V(r).real <= 0:
            raise ValidationError("gauge.rho", f"must be real and positive, got {V(r)}")
        return r

    def theta_jet(self, point) -> np.ndarray:
        t = ex.eval_jet_array(self.theta, point)
        if abs(V(t).imag) > 1e-14:
            raise ValidationError("gauge.theta", "must be real-valued")
        return t

    def delta_jet(self, point) -> np.ndarray:
        """``Delta = rho exp(2 i theta)``."""
        return jet.mul(self.rho_jet(point), jet.exp(2j * self.theta_jet(point)))

    def matrix(self, point) -> np.ndarray:
        """``Lambda_A^B`` at ``point``."""
        lam = np.sqrt(V(self.rho_jet(point)).real) * np.exp(1j * V(self.theta_jet(point)).real)
        return lam * np.eye(2)

    def compose(self, other: "GaugeElement") -> "GaugeElement":
        """Product element: ``rho = rho1 rho2``, ``theta = theta1 + theta2``."""
        return GaugeElement(ex.BinOp("*", self.rho, other.rho), ex.BinOp("+", self.theta, other.theta))

    def is_constant_modulus(self, point, tol: float = 1e-14) -> bool:
        return bool(np.max(np.abs(V(jet.grad(self.rho_jet(point))))) <= tol)


class GaugedFormalism:
    """Formalism fields after a gauge transformation (jet level)."""

    def __init__(self, base, gauge: GaugeElement):
        self.base = base
        self.gauge = gauge
        self.kind = base.kind

    @property
    def is_gamma(self) -> bool:
        return self.base.is_gamma

    def modulus_jet(self, point) -> np.ndarray:
        m = self.base.modulus_jet(point)
        return jet.mul(m, self.gauge.rho_jet(point)) if self.is_gamma else m

    def phase_jet(self, point) -> np.ndarray:
        p = self.base.phase_jet(point)
        return p + 2 * self.gauge.theta_jet(point) if self.is_gamma else p

    def gamma_jet(self, point) -> np.ndarray:
        return jet.mul(self.modulus_jet(point), jet.exp(1j * self.phase_jet(point)))

    def upsilon_jet(self, point) -> np.ndarray:
        u = self.base.upsilon_jet(point)
        if self.is_gamma:
            return u
        return u + jet.grad(jet.log(self.gauge.rho_jet(point)))


class _GaugedMixin:
    """Overrides the formalism fields and potentials of a state class."""

    def __init__(self, scenario: Scenario, point, gauge: GaugeElement):
        super().__init__(scenario, point)
        self.gauge = gauge

    @property
    def formalism(self):
        return GaugedFormalism(self.scenario.formalism, self.gauge)

    def potential_jets(self) -> np.ndarray:
        return self.scenario.potential_jets(self.point) - jet.grad(self.gauge.theta_jet(self.point))


@functools.lru_cache(maxsize=None)
def _gauged_class(cls: type) -> type:
    return type(f"Gauged{cls.__name__}", (_GaugedMixin, cls), {})


def gauged_state(st: GeometryState, gauge: GaugeElement) -> GeometryState:
    """The state of the same pipeline class computed from gauge-transformed inputs."""
    return _gauged_class(type(st))(st.scenario, st.point, gauge)


GaugedState = _gauged_class(GeometryState)


# ---------------------------------------------------------------------------
# object registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaugeData:
    """Point values of the gauge element needed by the laws."""

    rho: float
    theta: float
    dlog_delta: np.ndarray
    dlog_rho: np.ndarray
    dtheta: np.ndarray

    @property
    def delta(self) -> complex:
        return self.rho * np.exp(2j * self.theta)

    @classmethod
    def of(cls, g: GaugeElement, point) -> "GaugeData":
        r, t = g.rho_jet(point), g.theta_jet(point)
        dlr = V(jet.grad(jet.log(r))).real
        dt = V(jet.grad(t)).real
        return cls(float(V(r).real), float(V(t).real), dlr + 2j * dt, dlr, dt)


@dataclass(frozen=True)
class GaugeLaw:
    """Spinor valence ``(n_lo, n_up, p_lo, p_up)`` plus an optional shift."""

    valence: tuple
    getter: Callable[[GeometryState], np.ndarray]
    shift: Optional[Callable[[GeometryState, GaugeData], np.ndarray]] = None
    scalar: Optional[Callable[[np.ndarray, GaugeData, bool], np.ndarray]] = None
    law: str = ""

    def factor(self, d: GaugeData, epsilon: bool) -> complex:
        n_lo, n_up, p_lo, p_up = self.valence
        lam = np.sqrt(d.rho) * np.exp(1j * d.theta)
        f = lam ** (n_lo - n_up) * np.conj(lam) ** (p_lo - p_up)
        if epsilon:
            w, wb = 0.5 * (n_up - n_lo), 0.5 * (p_up - p_lo)
            f = f * d.delta ** w * np.conj(d.delta) ** wb
        return f


def _delta2(x):
    return np.eye(2)[None] * x[:, None, None]


def _metric_lo(st: GeometryState) -> np.ndarray:
    return V(st.soldering.metric_lo)


def _lowered(theta: np.ndarray, m_lo: np.ndarray) -> np.ndarray:
    return np.einsum("mac,cb->mab", theta, m_lo)


def _transformed_metric(st: GeometryState, d: GaugeData) -> np.ndarray:
    eps = st.scenario.formalism.kind == "epsilon"
    return REGISTRY["metric_spinor_lower"].factor(d, eps) * _metric_lo(st)


def _phase_factor(st: GeometryState) -> np.ndarray:
    return np.atleast_1d(np.exp(1j * V(st.scenario.formalism.phase_jet(st.point))))


REGISTRY: dict[str, GaugeLaw] = {
    "metric_spinor_lower": GaugeLaw((2, 0, 0, 0), _metric_lo, law="Lambda Lambda M, weight -1"),
    "metric_spinor_upper": GaugeLaw((0, 2, 0, 0), lambda st: V(st.soldering.metric_hi),
                                    law="Lambda^-1 Lambda^-1 M, weight +1"),
    "gamma_modulus": GaugeLaw((0, 0, 0, 0), lambda st: np.atleast_1d(V(st.formalism.modulus_jet(st.point))),
                              scalar=lambda x, d, eps: x if eps else d.rho * x, law="|gamma|' = rho |gamma|"),
    "gamma_phase_factor": GaugeLaw((0, 0, 0, 0), lambda st: np.atleast_1d(np.exp(1j * V(st.formalism.phase_jet(st.point)))),
                                   scalar=lambda x, d, eps: x if eps else d.delta / d.rho * x,
                                   law="exp(i Phi') = Delta / rho exp(i Phi)"),
    "gamma_phase_gradient": GaugeLaw((0, 0, 0, 0), lambda st: V(jet.grad(st.formalism.phase_jet(st.point))),
                                     scalar=lambda x, d, eps: x if eps else x + 2 * d.dtheta,
                                     law="d Phi' = d Phi + 2 d theta"),
    "soldering_down_up": GaugeLaw((0, 1, 0, 1), lambda st: V(st.soldering.down_up), law="S_mu^{AA'}"),
    "soldering_up_down": GaugeLaw((1, 0, 1, 0), lambda st: V(st.soldering.up_down), law="S^mu_{AA'}"),
    "soldering_mixed": GaugeLaw((0, 1, 1, 0), lambda st: np.einsum(
        "mbc,ca->mab", V(st.soldering.down_up), np.conj(_metric_lo(st))), law="S_{mu A'}^B"),
    "spin_affinity": GaugeLaw((1, 1, 0, 0), lambda st: V(st.aff.theta),
                              shift=lambda st, d: 0.5 * _delta2(d.dlog_delta), law="+ 1/2 dlog Delta delta"),
    "spin_affinity_trace": GaugeLaw((0, 0, 0, 0), lambda st: V(st.aff.trace),
                                    shift=lambda st, d: d.dlog_delta, law="+ dlog Delta"),
    "torsional_affinity": GaugeLaw((1, 1, 0, 0), lambda st: V(st.aff.theta_torsion), law="invariant"),
    "torsional_affinity_lowered": GaugeLaw((2, 0, 0, 0), lambda st: _lowered(V(st.aff.theta_torsion), _metric_lo(st)),
                                           law="Lambda Lambda, weight -1"),
    "torsionless_affinity": GaugeLaw((1, 1, 0, 0), lambda st: V(st.aff.theta_sym),
                                     shift=lambda st, d: 0.5 * _delta2(d.dlog_delta), law="+ 1/2 dlog Delta delta"),
    "torsionless_affinity_lowered": GaugeLaw(
        (2, 0, 0, 0), lambda st: _lowered(V(st.aff.theta_sym), _metric_lo(st)),
        shift=lambda st, d: 0.5 * d.dlog_delta[:, None, None] * _transformed_metric(st, d)[None],
        law="Lambda Lambda + 1/2 dlog Delta M'"),
    "torsionless_real_trace": GaugeLaw((0, 0, 0, 0), lambda st: V(st.aff.trace_sym).real,
                                       shift=lambda st, d: d.dlog_rho, law="+ dlog rho"),
    "potential_a": GaugeLaw((0, 0, 0, 0), lambda st: V(st.aff.potential_a), law="invariant"),
    "potential_phi": GaugeLaw((0, 0, 0, 0), lambda st: V(st.aff.phi),
                              shift=lambda st, d: -d.dtheta, law="- d theta"),
    "alpha": GaugeLaw((0, 0, 0, 0), lambda st: st.alpha_world(), law="invariant"),
    "mixed_curvature_lowered": GaugeLaw((2, 0, 0, 0), lambda st: np.einsum(
        "mnac,cb->mnab", V(st.mixed.full), _metric_lo(st)), law="Lambda Lambda C, weight -1"),
    "mixed_curvature": GaugeLaw((1, 1, 0, 0), lambda st: V(st.mixed.full), law="invariant"),
    "f_bivector": GaugeLaw((0, 0, 0, 0), lambda st: V(st.mixed.f), law="invariant"),
    "curvature_spinor_unprimed": GaugeLaw((4, 0, 0, 0), lambda st: V(st.spinors.unprimed),
                                          law="Lambda^4, weight -2"),
    "curvature_spinor_primed": GaugeLaw((2, 0, 2, 0), lambda st: V(st.spinors.primed),
                                        law="Lambda'^2 Lambda^2, weights (-1, -1)"),
    "psi": GaugeLaw((4, 0, 0, 0), lambda st: st.decomposition[0], law="Lambda^4, weight -2"),
    "xi": GaugeLaw((2, 0, 0, 0), lambda st: st.decomposition[1], law="Lambda^2, weight -1"),
    "kappa": GaugeLaw((0, 0, 0, 0), lambda st: np.atleast_1d(st.decomposition[2]), law="invariant"),
    "tau": GaugeLaw((2, 1, 0, 1), lambda st: V(st.torsion_spinors.tau), law="tau_AB^{CC'}"),
}

# objects whose law does not depend on the Upsilon constraint under a varying rho
GAMMA_ONLY = {"gamma_modulus", "gamma_phase_factor", "gamma_phase_gradient"}


def transform(name: str, g: GaugeElement, st: GeometryState) -> np.ndarray:
    """Apply the registered law of ``name`` to its value in ``st``."""
    if name not in REGISTRY:
        raise UnregisteredObject(name)
    law = REGISTRY[name]
    d = GaugeData.of(g, st.point)
    eps = st.scenario.formalism.kind == "epsilon"
    x = law.getter(st)
    if law.scalar is not None:
        return law.scalar(x, d, eps)
    out = law.factor(d, eps) * x
    if law.shift is not None:
        out = out + law.shift(st, d)
    return out


def transform_value(name: str, g: GaugeElement, st: GeometryState, x: np.ndarray) -> np.ndarray:
    """Apply the law of ``name`` to an explicit value ``x`` (used for composition)."""
    law = REGISTRY[name]
    d = GaugeData.of(g, st.point)
    eps = st.scenario.formalism.kind == "epsilon"
    if law.scalar is not None:
        return law.scalar(x, d, eps)
    out = law.factor(d, eps) * x
    if law.shift is not None:
        out = out + law.shift(st, d)
    return out


def check_gauge_admissible(scenario: Scenario, g: GaugeElement, point):
    """Epsilon-formalism gauge elements must have constant ``rho``."""
    if scenario.formalism.kind == "epsilon" and not g.is_constant_modulus(point):
        raise ValidationError("gauge.rho", "must be constant in the epsilon formalism")


def commuting_square(scenario: Scenario, g: GaugeElement, name: str, point) -> float:
    """``|compute(transform(inputs)) - transform(compute(inputs))|`` for one object."""
    return commuting_squares(GeometryState(scenario, point), g, (name,))[name]


def commuting_squares(st: GeometryState, g: GaugeElement, names=None) -> dict[str, float]:
    """Commuting-square residuals for several objects, sharing both pipelines."""
    names = tuple(REGISTRY) if names is None else tuple(names)
    for n in names:
        if n not in REGISTRY:
            raise UnregisteredObject(n)
    check_gauge_admissible(st.scenario, g, st.point)
    moved = gauged_state(st, g)
    return {n: float(np.max(np.abs(REGISTRY[n].getter(moved) - transform(n, g, st)))) for n in names}


def group_law_residual(scenario: Scenario, g1: GaugeElement, g2: GaugeElement, name: str, point) -> float:
    """``transform(g2, transform(g1, X))`` against ``transform(g1 g2, X)``."""
    return group_law_residuals(GeometryState(scenario, point), g1, g2, (name,))[name]


def group_law_residuals(st: GeometryState, g1: GaugeElement, g2: GaugeElement, names) -> dict[str, float]:
    """Group law for several objects.

    The second step is applied in the state already moved by ``g1`` so that
    shifts depending on transformed fields see the right values.
    """
    moved = gauged_state(st, g1)
    both = g1.compose(g2)
    out = {}
    for n in names:
        twice = transform_value(n, g2, moved, transform(n, g1, st))
        out[n] = float(np.max(np.abs(twice - transform(n, both, st))))
    return out
