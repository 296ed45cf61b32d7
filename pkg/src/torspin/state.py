"""Scenario description and the per-point geometry pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import expr as ex
from . import jet
from . import spincurvature as sc
from .soldering import Formalism, SolderingForm, build_soldering
from .spinaffinity import SpinAffinity, TorsionalSpinAffinity, solve_spin_affinity, upsilon_constraint_check
from .worldgeom import MetricField, TorsionField, WorldConnection, WorldCurvature, riemann, validate_metric, world_connection

DEFAULT_TOLERANCES = {"algebraic": 1e-10, "first": 1e-9, "third": 1e-8}


@dataclass(frozen=True)
class GaugeSpec:
    rho: ex.Expr
    theta: ex.Expr


@dataclass(frozen=True)
class Scenario:
    name: str
    formalism: Formalism
    metric: MetricField
    torsion: TorsionField
    spin_torsion: TorsionalSpinAffinity
    potentials: tuple
    gauges: tuple = ()
    points: tuple = ()
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0

    def potential_jets(self, point) -> np.ndarray:
        return np.array([ex.eval_jet_array(p, point) for p in self.potentials])

    def expressions(self):
        """Every input expression with a dotted field name."""
        out = []
        for m in range(4):
            for n in range(m, 4):
                out.append((f"metric.g{m}{n}", self.metric.entries[m][n]))
        for (m, n, l), e in sorted(self.torsion.entries.items()):
            out.append((f"torsion.T_{m}_{n}_{l}", e))
        st = self.spin_torsion
        for name in ("a", "b", "beta", "c"):
            for m, e in enumerate(getattr(st, name)):
                out.append((f"spin_torsion.{name}{m}", e))
        for m, e in enumerate(self.potentials):
            out.append((f"potentials.phi{m}", e))
        f = self.formalism
        if f.is_gamma:
            out += [("formalism.modulus", f.modulus), ("formalism.phase", f.phase)]
        else:
            out += [(f"formalism.upsilon{m}", e) for m, e in enumerate(f.upsilon)]
        for k, g in enumerate(self.gauges):
            out += [(f"gauge[{k}].rho", g.rho), (f"gauge[{k}].theta", g.theta)]
        return out


class GeometryState:
    """All derived objects of a scenario at one point, computed lazily."""

    def __init__(self, scenario: Scenario, point):
        self.scenario = scenario
        self.point = tuple(float(x) for x in point)

    @property
    def formalism(self):
        return self.scenario.formalism

    def potential_jets(self) -> np.ndarray:
        return self.scenario.potential_jets(self.point)

    @cached_property
    def metric(self) -> np.ndarray:
        g = self.scenario.metric.jets(self.point)
        validate_metric(jet.value(g), self.point)
        return g

    @cached_property
    def conn(self) -> WorldConnection:
        return world_connection(self.metric, self.scenario.torsion.jets(self.point))

    @cached_property
    def curv(self) -> WorldCurvature:
        return riemann(self.conn)

    @cached_property
    def soldering(self) -> SolderingForm:
        return build_soldering(self.conn.g, self.conn.ginv, self.formalism, self.point)

    @cached_property
    def torsional(self) -> np.ndarray:
        self.scenario.spin_torsion.validate(self.point)
        return self.scenario.spin_torsion.jets(self.point)

    @cached_property
    def aff(self) -> SpinAffinity:
        f = self.formalism
        if not f.is_gamma:
            upsilon_constraint_check(f.upsilon_jet(self.point), self.conn.torsion)
        return solve_spin_affinity(self.conn, self.soldering, self.torsional,
                                   self.potential_jets(), f, self.point)

    @cached_property
    def aff_unchecked(self) -> SpinAffinity:
        """The spin affinity without the trace-consistency guard (for diagnostics)."""
        return solve_spin_affinity(self.conn, self.soldering, self.torsional, self.potential_jets(),
                                   self.formalism, self.point, tol=np.inf)

    @cached_property
    def mixed(self) -> sc.MixedCurvature:
        return sc.mixed_curvature(self.aff)

    @cached_property
    def spinors(self) -> sc.CurvatureSpinors:
        return sc.curvature_spinors(self.mixed, self.soldering)

    @cached_property
    def torsion_spinors(self) -> sc.TorsionSpinors:
        return sc.torsion_spinors(self.conn, self.soldering)

    @cached_property
    def alpha(self) -> np.ndarray:
        return sc.alpha_spinor(self.aff, self.soldering, self.formalism, self.point)

    def alpha_world(self) -> np.ndarray:
        """``alpha_mu = d Phi + 2 (Phi_mu + A_mu)`` (zero in the epsilon formalism)."""
        if not self.formalism.is_gamma:
            return np.zeros(4, dtype=complex)
        a = jet.grad(self.formalism.phase_jet(self.point)) + 2 * (self.aff.phi + self.aff.potential_a)
        return jet.value(a)

    @cached_property
    def frame(self) -> sc.SpinFrame:
        return sc.SpinFrame.of(self.soldering)

    @cached_property
    def decomposition(self):
        """``(Psi, xi, kappa)`` at the point."""
        f = self.frame
        return sc.irreducible_decomposition(jet.value(self.spinors.x), f.m_lo, f.m_hi)
