"""The identity suite: every registered residual at every point of a scenario.

Each check group computes a dictionary of residuals from one
:class:`GeometryState`.  A residual passes when it is at most the scenario's
tolerance for the group tier:

* ``algebraic``: pointwise algebra, no derivatives of derived objects;
* ``first``: identities involving first or second derivatives;
* ``third``: Bianchi-class identities using third derivatives of the metric.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import __version__
from . import expr as ex
from . import gauge as gg
from . import jet
from . import spinaffinity as sa
from . import spincurvature as sc
from .counts import CountRow, component_counts
from .errors import TorspinError
from .soldering import verify_soldering_identities
from .state import GeometryState, Scenario
from .worldgeom import (bianchi_residual, contortion_by_solve, cyclic_residual, d_operator_residuals,
                        decomposition_residual, dual_bianchi_residual, dual_cyclic_residual,
                        metricity_residual, sym_metricity_residual, torsion_split_residual,
                        trace_residual)

V = jet.value

# fixed probe fields for the commutator and transfer checks
PROBE_SCALAR = "0.3*x0*x1 - 0.2*x2^2 + 0.1*x3"
PROBE_VECTOR = ("1 + 0.2*x1*x2", "0.3*x0 - 0.1*x3^2", "0.5*x0*x3", "-0.2 + 0.4*x1")
PROBE_COVECTOR = ("0.1*x2", "1 - 0.3*x0^2", "0.2*x1*x3", "0.4*x0*x2")
PROBE_SPINOR = ("1 + 0.3*x0 - 0.2*i*x1*x2", "0.5*x3 + 0.1*i*x0 - 0.4*x1^2")
PROBE_IOTA = np.array([0.3, -0.2, 0.5, 0.1])
GROUP_LAW_OBJECTS = ("spin_affinity", "torsionless_affinity_lowered", "potential_phi", "psi")


def _probe(exprs, point) -> np.ndarray:
    return np.array([ex.eval_jet_array(ex.parse(e), point) for e in exprs])


def _max(a) -> float:
    return float(np.max(np.abs(a), initial=0.0))


# ---------------------------------------------------------------------------
# check groups
# ---------------------------------------------------------------------------

def connection_checks(st: GeometryState) -> dict[str, float]:
    c = st.conn
    oracle = contortion_by_solve(V(c.g), V(jet.grad(c.g)), V(c.torsion_low))
    return {
        "torsion_split": torsion_split_residual(c),
        "metricity": metricity_residual(c),
        "symmetric_metricity": sym_metricity_residual(c),
        "trace": trace_residual(c),
        "contortion_oracle": _max(oracle - V(c.contortion)),
    }


def curvature_checks(st: GeometryState) -> dict[str, float]:
    c, r, p = st.conn, st.curv, st.point
    out = {"decomposition": decomposition_residual(r)}
    d = d_operator_residuals(c, r, _probe(PROBE_VECTOR, p), _probe(PROBE_COVECTOR, p),
                             ex.eval_jet_array(ex.parse(PROBE_SCALAR), p))
    out.update({f"commutator_{k}": v for k, v in d.items()})
    out["cyclic"] = cyclic_residual(c, r)
    out["dual_cyclic"] = dual_cyclic_residual(c, r)
    return out


def bianchi_checks(st: GeometryState) -> dict[str, float]:
    return {"bianchi": bianchi_residual(st.conn, st.curv),
            "dual_bianchi": dual_bianchi_residual(st.conn, st.curv)}


def soldering_checks(st: GeometryState) -> dict[str, float]:
    return verify_soldering_identities(st.soldering, st.conn.g, st.conn.det)


def spin_affinity_checks(st: GeometryState) -> dict[str, float]:
    # unchecked solve so that an inconsistent connection shows up as residuals
    aff, s, c, f = st.aff_unchecked, st.soldering, st.conn, st.formalism
    out = {
        "soldering_constancy": sa.soldering_residual(aff, s, c),
        "metric_product_constancy": sa.metric_product_residual(aff, s, c),
        "trace_correlation": sa.trace_correlation_residual(c, s, aff, f, st.point),
        "world_spin_transfer": sa.world_spin_transfer(_probe(PROBE_VECTOR, st.point), s, aff, c),
    }
    if f.is_gamma:
        eig, _ = sa.metric_eigenvalue_check(aff, s, c, f, st.point)
        out.update({f"eigenvalue_{k}": v for k, v in eig.items()})
    else:
        out["upsilon_constraint"] = sa.upsilon_constraint_residual(f.upsilon_jet(st.point), c.torsion)
    return out


def spin_affinity_algebra(st: GeometryState) -> dict[str, float]:
    aff, s, c = st.aff, st.soldering, st.conn
    im_trace = V(-2 * (aff.phi + aff.potential_a)).real
    oracle = sa.solve_spin_affinity_linear(c, s, im_trace, aff.upsilon)
    out = {"linear_oracle": _max(oracle - V(aff.theta)),
           "torsional_trace": _max(V(aff.trace_torsion) + 2j * V(aff.potential_a))}
    shift = sa.trace_shift_invariance(aff, s, c, jet.const(1.0)[None, :] * PROBE_IOTA[:, None])
    out.update({f"trace_shift_{k}": v for k, v in shift.items()})
    return out


def mixed_curvature_algebra(st: GeometryState) -> dict[str, float]:
    m = sc.mixed_curvature_checks(st.mixed, st.aff, st.conn, _probe(PROBE_SPINOR, st.point))
    out = {k: m[k] for k in ("split", "entangled_trace", "additivity", "real_trace", "trace_potential")}
    out.update({f"torsion_square_{k}": v for k, v in sc.torsion_square_shuffles(st.conn.torsion).items()})
    out.update(sc.splitting_by_riemann(st.mixed, st.soldering, st.curv))
    return out


def mixed_curvature_derivative(st: GeometryState) -> dict[str, float]:
    m = sc.mixed_curvature_checks(st.mixed, st.aff, st.conn, _probe(PROBE_SPINOR, st.point))
    out = {k: m[k] for k in ("commutator", "f_torsion_covariant", "f_sym_covariant")}
    out.update(sc.curvature_splitting_check(st.mixed, st.aff, st.soldering, st.conn, st.curv))
    return out


def curvature_spinor_checks(st: GeometryState) -> dict[str, float]:
    f = st.frame
    out = sc.curvature_spinor_checks(st.mixed, st.spinors, st.soldering)
    out.update({f"decomposition_{k}": v for k, v in
                sc.decomposition_check(V(st.spinors.x), f.m_lo, f.m_hi).items()})
    return out


def reconstruction_checks(st: GeometryState) -> dict[str, float]:
    out = sc.riemann_reconstruction(st.spinors, st.soldering, st.conn, st.curv)
    out.update({f"ricci_{k}": v for k, v in
                sc.ricci_spinors(st.spinors, st.soldering, st.conn, st.curv).items()})
    return out


def torsion_spinor_checks(st: GeometryState) -> dict[str, float]:
    return sc.torsion_spinor_checks(st.torsion_spinors, st.soldering, st.conn, st.aff.potential_a)


def contracted_checks(st: GeometryState) -> dict[str, float]:
    return sc.contracted_curvature_relations(st.mixed, st.aff, st.soldering, st.conn, st.torsion_spinors)


def _drop_magnitudes(d: dict) -> dict:
    return {k: v for k, v in d.items() if not k.endswith("_absolute")}


def spinor_bianchi_checks(st: GeometryState) -> dict[str, float]:
    args = (st.spinors, st.torsion_spinors, st.aff, st.conn, st.curv, st.soldering, st.alpha)
    out = {f"cyclic_{k}": v for k, v in _drop_magnitudes(sc.dual_cyclic_spinor_check(*args)).items()}
    out.update({f"bianchi_{k}": v for k, v in _drop_magnitudes(sc.dual_bianchi_spinor_check(*args)).items()})
    return out


def gauge_checks(st: GeometryState) -> dict[str, float]:
    out = {}
    gauges = [gg.GaugeElement(g.rho, g.theta) for g in st.scenario.gauges]
    for k, g in enumerate(gauges):
        out.update({f"{n}[{k}]": v for n, v in gg.commuting_squares(st, g).items()})
    for k in range(1, len(gauges)):
        res = gg.group_law_residuals(st, gauges[0], gauges[k], GROUP_LAW_OBJECTS)
        out.update({f"group_law_{n}[0,{k}]": v for n, v in res.items()})
    return out


@dataclass(frozen=True)
class CheckGroup:
    name: str
    tag: str
    tier: str
    run: Callable[[GeometryState], dict]


GROUPS = (
    CheckGroup("world.connection", "connection", "first", connection_checks),
    CheckGroup("world.curvature", "curvature", "first", curvature_checks),
    CheckGroup("world.bianchi", "bianchi", "third", bianchi_checks),
    CheckGroup("soldering", "soldering", "algebraic", soldering_checks),
    CheckGroup("spin_affinity.algebra", "spin-affinity", "algebraic", spin_affinity_algebra),
    CheckGroup("spin_affinity.constancy", "spin-affinity", "first", spin_affinity_checks),
    CheckGroup("mixed_curvature.algebra", "mixed-curvature", "algebraic", mixed_curvature_algebra),
    CheckGroup("mixed_curvature.splitting", "mixed-curvature", "first", mixed_curvature_derivative),
    CheckGroup("curvature_spinors", "curvature-spinors", "algebraic", curvature_spinor_checks),
    CheckGroup("reconstruction", "reconstruction", "first", reconstruction_checks),
    CheckGroup("torsion_spinors", "torsion-spinors", "algebraic", torsion_spinor_checks),
    CheckGroup("contracted", "contracted", "first", contracted_checks),
    CheckGroup("spinor_bianchi", "spinor-bianchi", "third", spinor_bianchi_checks),
    CheckGroup("gauge", "gauge", "first", gauge_checks),
)

TAGS = tuple(dict.fromkeys(g.tag for g in GROUPS))


def select_groups(only: Optional[list[str]] = None) -> tuple[CheckGroup, ...]:
    """Groups whose tag or name matches any filter entry (all when ``only`` is empty)."""
    if not only:
        return GROUPS
    unknown = [o for o in only if not any(o in (g.tag, g.name) or g.name.startswith(o + ".")
                                          for g in GROUPS)]
    if unknown:
        raise ValueError(f"unknown check filter(s): {', '.join(unknown)}; known tags: {', '.join(TAGS)}")
    return tuple(g for g in GROUPS if any(o in (g.tag, g.name) or g.name.startswith(o + ".") for o in only))


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Entry:
    check: str
    eq: str
    point: tuple
    residual: Optional[float]
    tol: float
    passed: bool
    error: Optional[str] = None

    def as_dict(self) -> dict:
        d = {"check": self.check, "eq": self.eq, "point": list(self.point),
             "residual": self.residual, "tol": self.tol, "pass": self.passed}
        if self.error is not None:
            d["error"] = self.error
        return d


@dataclass
class Report:
    scenario: str
    seed: int
    entries: list = field(default_factory=list)
    counts: list = field(default_factory=list)
    seconds: float = 0.0
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries) and all(r.passed for r in self.counts)

    @property
    def failures(self) -> list:
        return [e for e in self.entries if not e.passed]

    def as_json(self) -> list:
        return [e.as_dict() for e in self.entries]

    def summary(self) -> str:
        n_fail = len(self.failures)
        lines = [f"scenario {self.scenario}: {len(self.entries)} residuals, {n_fail} failed, "
                 f"seed {self.seed}, {self.seconds:.2f} s, torspin {self.version}"]
        for e in self.failures:
            what = e.error if e.error else f"residual {e.residual:.3e} > tol {e.tol:.0e}"
            lines.append(f"  FAIL {e.check} [{e.eq}] at {e.point}: {what}")
        for r in self.counts:
            lines.append(f"  count {r.name}: {r.result.rank} (expected {r.expected}) "
                         f"{'ok' if r.passed else 'FAIL'}")
        return "\n".join(lines)


def _run_point(scenario: Scenario, point, groups, factory) -> list[Entry]:
    st = factory(scenario, point)
    out = []
    pt = tuple(float(x) for x in point)
    for g in groups:
        tol = scenario.tolerances[g.tier]
        try:
            res = g.run(st)
        except (TorspinError, ArithmeticError, ValueError, np.linalg.LinAlgError) as err:
            out.append(Entry(g.name, g.tag, pt, None, tol, False, f"{type(err).__name__}: {err}"))
            continue
        for k, v in res.items():
            v = float(v)
            out.append(Entry(f"{g.name}.{k}", g.tag, pt, v, tol, bool(np.isfinite(v) and v <= tol)))
    return out


def run_suite(scenario: Scenario, only: Optional[list[str]] = None, workers: int = 1,
              factory: Callable = GeometryState, counts: bool = False,
              count_samples: Optional[int] = None) -> Report:
    """Evaluate every selected check at every scenario point.

    Module errors become failed entries; the suite never aborts.  ``counts``
    appends the component-count table (seeded by the scenario seed).
    """
    groups = select_groups(only)
    start = time.perf_counter()
    report = Report(scenario.name, scenario.seed)
    if workers > 1 and len(scenario.points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_point, scenario, p, groups, factory) for p in scenario.points]
            for fut in futures:
                report.entries.extend(fut.result())
    else:
        for p in scenario.points:
            report.entries.extend(_run_point(scenario, p, groups, factory))
    if counts:
        kwargs = {} if count_samples is None else {"samples": count_samples}
        report.counts = component_counts(seed=scenario.seed, **kwargs)
    report.seconds = time.perf_counter() - start
    return report


def count_table(rows: list[CountRow]) -> str:
    lines = [f"{'object':<36}{'rank':>6}{'expected':>10}{'gap':>12}  verdict"]
    for r in rows:
        lines.append(f"{r.name:<36}{r.result.rank:>6}{r.expected:>10}{r.result.gap:>12.2e}  "
                     f"{'ok' if r.passed else 'FAIL'}")
    return "\n".join(lines)
