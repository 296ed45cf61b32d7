"""Acceptance criteria 1 to 8, one test each, each printing a PASS/FAIL line."""

import dataclasses
import time

import numpy as np
import pytest

from conftest import REQUIRED_SCENARIOS, bundled, without_torsion
from torspin import expr as ex
from torspin import gauge as gg
from torspin import jet
from torspin import spinaffinity as sa
from torspin import spincurvature as sc
from torspin import worldgeom as wg
from torspin.counts import component_counts, random_scenario
from torspin.scenario import bundled_scenarios
from torspin.soldering import Formalism
from torspin.spintensor import EPS, MIN_GAP
from torspin.state import GeometryState
from torspin.suite import run_suite

V = jet.value


@pytest.fixture
def verdict(capsys):
    def emit(number: int, title: str, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\ncriterion {number} ({title}): {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail
    return emit


def _worst(pairs):
    """``(label, value)`` of the largest value."""
    return max(pairs, key=lambda p: p[1]) if pairs else ("none", 0.0)


def test_identity_suite(verdict):
    start = time.perf_counter()
    failures, residuals, points = [], 0, {}
    for name in REQUIRED_SCENARIOS:
        s = bundled(name)
        points[name] = len(s.points)
        report = run_suite(s)
        residuals += len(report.entries)
        failures += [f"{name}:{e.check}@{e.point}" for e in report.failures]
    seconds = time.perf_counter() - start
    ok = not failures and min(points.values()) >= 5 and seconds <= 60.0
    verdict(1, "identity suite", ok,
            f"{residuals} residuals over {len(points)} scenarios, min {min(points.values())} points, "
            f"{len(failures)} failures {failures[:3]}, {seconds:.1f} s")


def test_component_counts(verdict):
    rows = component_counts(seed=0)
    bad = [f"{r.name}: {r.result.rank} vs {r.expected} (gap {r.result.gap:.1e})"
           for r in rows if r.result.rank != r.expected or r.result.gap < MIN_GAP]
    min_gap = min(r.result.gap for r in rows)
    verdict(2, "component counts", not bad,
            f"{len(rows)} ranks, smallest gap {min_gap:.2e}, mismatches {bad}")


def test_torsionless_limit(verdict):
    worst = []
    for name in REQUIRED_SCENARIOS:
        s = without_torsion(bundled(name))
        for p in s.points:
            st_ = GeometryState(s, p)
            low = V(st_.curv.riemann_low)
            _, xi, kappa = st_.decomposition
            worst += [
                (f"{name} pair symmetry", float(np.max(np.abs(low - np.transpose(low, (2, 3, 0, 1)))))),
                (f"{name} cyclic", float(np.max(np.abs(V(wg.antisym3(st_.curv.riemann)))))),
                (f"{name} xi", float(np.max(np.abs(xi)))),
                (f"{name} contracted dual",
                 float(np.max(np.abs(V(wg.contracted_dual_riemann(st_.conn, st_.curv)))))),
                (f"{name} Im kappa", abs(kappa.imag)),
            ]
    label, value = _worst(worst)
    verdict(3, "torsionless limit", value <= 1e-9, f"worst {label} = {value:.2e} (tol 1e-9)")


INVARIANTS = ("alpha", "kappa", "torsional_affinity", "potential_a")


def test_gauge_covariance(verdict):
    squares, invariants, notes = [], [], []
    for name in REQUIRED_SCENARIOS + ("epsilon-torsion",):
        s = bundled(name)
        gauges = [gg.GaugeElement(g.rho, g.theta) for g in s.gauges]
        varying = [g for g in gauges if ex.coords_used(g.theta)]
        notes.append(f"{name}: {len(gauges)} elements, {len(varying)} with varying theta")
        if len(gauges) < 3 or not varying:
            squares.append((f"{name} gauge set too small", np.inf))
        for p in s.points:
            st_ = GeometryState(s, p)
            for k, g in enumerate(gauges):
                res = gg.commuting_squares(st_, g)
                squares += [(f"{name}:{n}[{k}]", v) for n, v in res.items()]
                invariants += [(f"{name}:{n}[{k}]", res[n]) for n in INVARIANTS]
    sq_label, sq = _worst(squares)
    inv_label, inv = _worst(invariants)
    ok = sq <= 1e-9 and inv <= 1e-11
    verdict(4, "gauge covariance", ok,
            f"{len(squares)} squares over {len(gg.REGISTRY)} laws, worst {sq_label} = {sq:.2e} (tol 1e-9); "
            f"worst invariant {inv_label} = {inv:.2e} (tol 1e-11); {'; '.join(notes)}")


# two-route residual name -> tolerance
TWO_ROUTE = {
    "reconstruction.riemann": 1e-9,
    "reconstruction.dual": 1e-9,
    "reconstruction.ricci_scalar": 1e-9,
    "reconstruction.ricci_dual_scalar": 1e-9,
    "reconstruction.ricci_ricci": 1e-9,
    "reconstruction.ricci_contracted_dual": 1e-9,
    "contracted.additivity_unprimed": 1e-9,
    "contracted.additivity_primed": 1e-9,
    "contracted.torsional_unprimed": 1e-9,
    "contracted.torsional_primed": 1e-9,
    "contracted.torsionless_unprimed": 1e-9,
}
SPINOR_BIANCHI_TOL = 1e-8


def test_two_route_agreement(verdict):
    worst, seen = [], set()
    for name in REQUIRED_SCENARIOS + ("epsilon-torsion",):
        report = run_suite(bundled(name), only=["reconstruction", "contracted", "spinor-bianchi"])
        for e in report.entries:
            tol = TWO_ROUTE.get(e.check, SPINOR_BIANCHI_TOL if e.check.startswith("spinor_bianchi") else None)
            if tol is None:
                continue
            seen.add(e.check)
            value = np.inf if e.residual is None else e.residual
            worst.append((f"{name}:{e.check}", value / tol))
    missing = [k for k in TWO_ROUTE if k not in seen]
    label, ratio = _worst(worst)
    ok = ratio <= 1.0 and not missing and any(k.startswith("spinor_bianchi") for k in seen)
    verdict(5, "two-route agreement", ok,
            f"{len(worst)} residuals, worst {label} at {ratio:.2e} of its tolerance, missing {missing}")


def test_jet_against_finite_differences(verdict):
    unique = {}
    for name, path in bundled_scenarios().items():
        s = bundled(name)
        for field, e in s.expressions():
            unique.setdefault(ex.to_string(e), (e, s.points[0], f"{name}:{field}"))
    orders, worst, exact = [], [], 0
    for e, p, label in unique.values():
        for k in (1, 2, 3):
            rep = ex.fd_check(e, p, k, 1e-3)
            worst.append((f"{label} order {k}", rep.residual_h))
            if rep.exact:
                exact += 1
            else:
                orders.append((f"{label} order {k}", rep.observed_order))
    bad_orders = [(lab, o) for lab, o in orders if abs(o - 4.0) > 0.5]
    label, res = _worst(worst)
    observed = [o for _, o in orders]
    ok = not bad_orders and res <= 1e-6 and len(orders) > 0
    verdict(6, "jet vs finite differences", ok,
            f"{len(unique)} expressions; {len(orders)} non-polynomial cases with observed order "
            f"{min(observed):.2f}..{max(observed):.2f}, {exact} exact polynomial cases, "
            f"worst disagreement {label} = {res:.2e} (tol 1e-6); bad orders {bad_orders[:3]}")


def _formalism_outputs(st_):
    psi, xi, kappa = st_.decomposition
    return {"w_unprimed": V(st_.spinors.unprimed), "w_primed": V(st_.spinors.primed),
            "psi": psi, "xi": xi, "kappa": np.atleast_1d(kappa), "F": V(st_.mixed.f)}


def test_formalism_equivalence(verdict):
    worst = []
    for name in REQUIRED_SCENARIOS:
        base = bundled(name)
        g = dataclasses.replace(base, formalism=Formalism.gamma("1", "0"))
        e = dataclasses.replace(base, formalism=Formalism.epsilon())
        for p in base.points:
            a, b = _formalism_outputs(GeometryState(g, p)), _formalism_outputs(GeometryState(e, p))
            worst += [(f"{name}:{k}", float(np.max(np.abs(a[k] - b[k])))) for k in a]
    label, value = _worst(worst)
    verdict(7, "formalism equivalence", value <= 1e-10, f"worst {label} = {value:.2e} (tol 1e-10)")


def _random_spinor_pieces(rng, modulus, phase):
    raw = rng.normal(size=(2,) * 4) + 1j * rng.normal(size=(2,) * 4)
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    gamma = modulus * np.exp(1j * phase)
    return sc._sym4(raw), 0.5 * (x + x.T), complex(rng.normal(), rng.normal()), gamma * EPS, EPS / gamma


def test_oracles(verdict):
    rng = np.random.default_rng(2024)
    contortion, affinity, decomposition = [], [], []
    states = [GeometryState(bundled(n), bundled(n).points[0]) for n in REQUIRED_SCENARIOS + ("epsilon-torsion",)]
    for k in range(20):
        kind = "gamma" if k % 2 == 0 else "epsilon"
        states.append(GeometryState(random_scenario(np.random.default_rng(k), kind), (0.1, -0.2, 0.3, 0.05)))
    for st_ in states:
        c = st_.conn
        oracle = wg.contortion_by_solve(V(c.g), V(jet.grad(c.g)), V(c.torsion_low))
        contortion.append(float(np.max(np.abs(oracle - V(c.contortion)))))
        aff = st_.aff
        im_trace = V(-2 * (aff.phi + aff.potential_a)).real
        lin = sa.solve_spin_affinity_linear(c, st_.soldering, im_trace, aff.upsilon)
        affinity.append(float(np.max(np.abs(lin - V(aff.theta)))))
    for _ in range(200):
        psi, xi, kappa, m_lo, m_hi = _random_spinor_pieces(rng, rng.uniform(0.3, 3), rng.uniform(-3, 3))
        back = sc.irreducible_decomposition(sc.reassemble(psi, xi, kappa, m_lo), m_lo, m_hi)
        decomposition.append(max(float(np.max(np.abs(back[0] - psi))), float(np.max(np.abs(back[1] - xi))),
                                 abs(back[2] - kappa)))
    ok = max(contortion) <= 1e-11 and max(affinity) <= 1e-11 and max(decomposition) <= 1e-12
    verdict(8, "oracles", ok,
            f"contortion {max(contortion):.2e} (tol 1e-11), spin affinity {max(affinity):.2e} (tol 1e-11) "
            f"over {len(states)} geometries; decomposition round trip {max(decomposition):.2e} (tol 1e-12) "
            f"over {len(decomposition)} injections")
