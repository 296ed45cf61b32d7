"""Spin-affine connection from covariant constancy of the soldering form.

``theta[m, A, B]`` is ``theta_{mu A}^B``.  Transvecting
``nabla_l S^mu_{AA'} = 0`` with ``S_mu^{CA'}`` gives

    P_{l A}^C = Q_l^mu_{AA'} S_mu^{CA'} = 2 theta_{l A}^C + delta_A^C conj(theta_l)

where ``Q`` holds the partial and world-connection terms (plus the
``Upsilon`` density term in the epsilon formalism).  The real part of the
trace ``theta_l`` follows from ``tr P = 4 Re theta_l``; the imaginary part is
free and is fixed to ``-2(Phi_l + A_l)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from . import jet
from .covariant import nabla
from .errors import ConstraintViolated, InconsistentTrace, ValidationError
from .soldering import SolderingForm
from .spintensor import PRIMED, UNPRIMED, WORLD, Slot
from .worldgeom import WorldConnection

W_UP, W_DOWN = Slot(WORLD, True), Slot(WORLD, False)
U_UP, U_DOWN = Slot(UNPRIMED, True), Slot(UNPRIMED, False)
P_UP, P_DOWN = Slot(PRIMED, True), Slot(PRIMED, False)

TRACE_TOL = 1e-9


@dataclass(frozen=True)
class TorsionalSpinAffinity:
    """Entries ``a, b, beta, c`` of ``theta^(T)_{mu A}^B = [[a, b], [beta, c]]``.

    ``b`` and ``beta`` must be real and ``a + c`` purely imaginary.
    """

    a: tuple
    b: tuple
    beta: tuple
    c: tuple

    @classmethod
    def zero(cls) -> "TorsionalSpinAffinity":
        z = (ex.Num(0.0),) * 4
        return cls(z, z, z, z)

    @classmethod
    def from_strings(cls, a, b, beta, c) -> "TorsionalSpinAffinity":
        return cls(*(tuple(ex.parse(s) for s in group) for group in (a, b, beta, c)))

    def jets(self, point) -> np.ndarray:
        out = np.empty((4, 2, 2, jet.NCOEF), dtype=complex)
        for m in range(4):
            out[m, 0, 0] = ex.eval_jet_array(self.a[m], point)
            out[m, 0, 1] = ex.eval_jet_array(self.b[m], point)
            out[m, 1, 0] = ex.eval_jet_array(self.beta[m], point)
            out[m, 1, 1] = ex.eval_jet_array(self.c[m], point)
        return out

    def validate(self, point, tol: float = 1e-12):
        """Raise ``ValidationError`` if the reality conditions fail at ``point``."""
        t = self.jets(point)
        for name, (i, j) in (("b", (0, 1)), ("beta", (1, 0))):
            bad = np.abs(t[:, i, j].imag).max(axis=-1)
            for m in np.nonzero(bad > tol)[0]:
                raise ValidationError(f"spin_torsion.{name}{m}", "must be real-valued")
        re_trace = np.abs((t[:, 0, 0] + t[:, 1, 1]).real).max(axis=-1)
        for m in np.nonzero(re_trace > tol)[0]:
            raise ValidationError(f"spin_torsion.a{m}+c{m}", "trace must be purely imaginary")


def potential_a(theta_torsion: np.ndarray) -> np.ndarray:
    """``A_mu`` from ``theta^(T)_{mu A}^A = -2i A_mu``."""
    return 0.5j * np.einsum("maa...->m...", theta_torsion)


@dataclass(frozen=True)
class SpinAffinity:
    theta: np.ndarray
    theta_torsion: np.ndarray
    phi: np.ndarray
    upsilon: np.ndarray

    @property
    def theta_sym(self) -> np.ndarray:
        """Torsionless piece ``theta - theta^(T)``."""
        return self.theta - self.theta_torsion

    @property
    def trace(self) -> np.ndarray:
        return np.einsum("maa...->m...", self.theta)

    @property
    def trace_sym(self) -> np.ndarray:
        return np.einsum("maa...->m...", self.theta_sym)

    @property
    def trace_torsion(self) -> np.ndarray:
        return np.einsum("maa...->m...", self.theta_torsion)

    @property
    def potential_a(self) -> np.ndarray:
        return potential_a(self.theta_torsion)


def transport_terms(conn: WorldConnection, s: SolderingForm, upsilon: np.ndarray) -> np.ndarray:
    """``Q_l^mu_{AA'} = d_l S^mu_{AA'} + Gamma_{l n}^mu S^n_{AA'} (+ Upsilon_l S^mu_{AA'})``."""
    q = jet.grad(s.up_down) + jet.einsum("lnm,nab->lmab", conn.gamma, s.up_down)
    return q + jet.einsum("l,mab->lmab", upsilon, s.up_down)


def expected_real_trace(formalism, point) -> np.ndarray:
    """``d log|gamma|`` (gamma formalism) or ``Upsilon`` (epsilon formalism)."""
    if formalism.is_gamma:
        return jet.grad(jet.log(formalism.modulus_jet(point)))
    return formalism.upsilon_jet(point)


def solve_spin_affinity(conn: WorldConnection, s: SolderingForm, torsional: np.ndarray,
                        phi: np.ndarray, formalism, point, tol: float = TRACE_TOL) -> SpinAffinity:
    """The spin affinity with ``nabla S = 0`` and the prescribed imaginary trace."""
    upsilon = formalism.upsilon_jet(point)
    q = transport_terms(conn, s, upsilon)
    p = jet.einsum("lmab,mcb->lac", q, s.down_up)
    tr = np.einsum("laa...->l...", p)
    if np.max(np.abs(jet.value(tr).imag)) > tol:
        raise InconsistentTrace(f"transvected trace has imaginary part {jet.value(tr).imag}")
    re = 0.25 * tr.real
    expected = expected_real_trace(formalism, point)
    if np.max(np.abs(jet.value(re - expected))) > tol:
        raise InconsistentTrace("real trace does not match the metric-spinor prescription")
    a = potential_a(torsional)
    trace = re - 2j * (phi + a)
    theta = 0.5 * (p - np.eye(2)[None, :, :, None] * jet.conj(trace)[:, None, None, :])
    return SpinAffinity(theta, torsional, phi, upsilon)


def solve_spin_affinity_linear(conn: WorldConnection, s: SolderingForm, im_trace: np.ndarray,
                               upsilon: np.ndarray) -> np.ndarray:
    """Point-value oracle: least squares for ``theta`` from ``nabla S = 0``.

    Per derivative index the unknowns are the 8 real numbers of the complex
    2x2 matrix ``theta_{l A}^B``; the equations are the 32 real components of
    ``nabla_l S^mu_{AA'} = 0`` plus ``Im theta_{l A}^A = -2(Phi_l + A_l)``.
    """
    V = jet.value
    q = V(transport_terms(conn, s, upsilon))
    sud = V(s.up_down)
    out = np.empty((4, 2, 2), dtype=complex)
    basis = []
    for k in range(8):
        e = np.zeros(8)
        e[k] = 1.0
        basis.append((e[:4] + 1j * e[4:]).reshape(2, 2))
    for l in range(4):
        cols = []
        for b in basis:
            # spin terms of nabla S for theta = b
            term = -(np.einsum("ab,mbc->mac", b, sud) + np.einsum("cd,mad->mac", np.conj(b), sud))
            cols.append(np.concatenate([term.real.ravel(), term.imag.ravel(), [np.trace(b).imag]]))
        a = np.array(cols).T
        rhs = np.concatenate([-q[l].real.ravel(), -q[l].imag.ravel(), [im_trace[l]]])
        x = np.linalg.lstsq(a, rhs, rcond=None)[0]
        out[l] = (x[:4] + 1j * x[4:]).reshape(2, 2)
    return out


def covariant_derivative(x: np.ndarray, slots, aff: SpinAffinity, conn: WorldConnection,
                         weight=(0.0, 0.0)) -> np.ndarray:
    """World-spin covariant derivative of a density of weights ``(w, wbar)``."""
    return nabla(x, tuple(slots), conn.gamma, aff.theta, weight)


def _nabla_soldering(aff, s, conn):
    return covariant_derivative(s.up_down, (W_UP, U_DOWN, P_DOWN), aff, conn, s.weight_up_down)


def _nabla_metric_product(aff, s, conn):
    m = s.metric_lo
    mm = jet.einsum("ab,AB->aAbB", m, jet.conj(m))
    w = (-1.0, -1.0) if s.kind == "epsilon" else (0.0, 0.0)
    return covariant_derivative(mm, (U_DOWN, P_DOWN, U_DOWN, P_DOWN), aff, conn, w)


def soldering_residual(aff: SpinAffinity, s: SolderingForm, conn: WorldConnection) -> float:
    """``max |nabla_l S^mu_{AA'}|`` including the density term in the epsilon formalism."""
    return float(np.max(np.abs(jet.value(_nabla_soldering(aff, s, conn)))))


def metric_product_residual(aff: SpinAffinity, s: SolderingForm, conn: WorldConnection) -> float:
    """``max |nabla_mu (M_AB Mb_A'B')|``."""
    return float(np.max(np.abs(jet.value(_nabla_metric_product(aff, s, conn)))))


def trace_correlation_residual(conn: WorldConnection, s: SolderingForm, aff: SpinAffinity,
                               formalism, point) -> float:
    """Residual of the real-trace correlation with the world connection.

    Gamma formalism: ``4 Re theta~_mu = Gamma~_mu + T_mu + S_l^{AA'} d_mu S^l_{AA'}``;
    epsilon formalism: ``Gamma~_mu + T_mu + S_l^{AA'} d_mu S^l_{AA'} = 0``.
    """
    ds = jet.grad(s.up_down)
    contraction = jet.einsum("lab,mlab->m", s.down_up, ds)
    rhs = conn.trace_sym + conn.torsion_trace + contraction
    if formalism.is_gamma:
        res = 4 * aff.trace_sym.real - rhs
    else:
        res = rhs
    return float(np.max(np.abs(jet.value(res))))


def metric_eigenvalue_check(aff: SpinAffinity, s: SolderingForm, conn: WorldConnection,
                            formalism, point) -> tuple[dict[str, float], np.ndarray]:
    """``nabla gamma_AB = i alpha gamma_AB`` and ``nabla gamma^AB = -i alpha gamma^AB``.

    Returns residuals and ``alpha_mu = d_mu Phi + 2(Phi_mu + A_mu)`` (point values).
    """
    alpha = jet.grad(formalism.phase_jet(point)) + 2 * (aff.phi + aff.potential_a)
    lo, hi = s.metric_lo, s.metric_hi
    d_lo = covariant_derivative(lo, (U_DOWN, U_DOWN), aff, conn)
    d_hi = covariant_derivative(hi, (U_UP, U_UP), aff, conn)
    V = jet.value
    a = V(alpha)
    ratio = np.einsum("mab,ab->m", V(d_lo), np.conj(V(lo))) / np.sum(np.abs(V(lo)) ** 2)
    res = {
        "lower": float(np.max(np.abs(V(d_lo) - 1j * a[:, None, None] * V(lo)))),
        "upper": float(np.max(np.abs(V(d_hi) + 1j * a[:, None, None] * V(hi)))),
        "real_part": float(np.max(np.abs(ratio.real))),
    }
    return res, a


def upsilon_constraint_residual(upsilon: np.ndarray, torsion: np.ndarray) -> float:
    """``max |d_[mu Upsilon_nu] - T_{mu nu}^l Upsilon_l|``."""
    d = jet.grad(upsilon)
    curl = 0.5 * (d - np.swapaxes(d, 0, 1))
    res = curl - jet.einsum("mnl,l->mn", torsion, upsilon)
    return float(np.max(np.abs(jet.value(res))))


def upsilon_constraint_check(upsilon: np.ndarray, torsion: np.ndarray, tol: float = 1e-9) -> float:
    r = upsilon_constraint_residual(upsilon, torsion)
    if r > tol:
        raise ConstraintViolated(f"Upsilon constraint residual {r:.3e} exceeds {tol:.0e}")
    return r


def world_spin_transfer(u: np.ndarray, s: SolderingForm, aff: SpinAffinity,
                        conn: WorldConnection) -> float:
    """Compare ``nabla_mu u^l`` with ``S^l_{AA'} nabla_mu u^{AA'}`` and the converse."""
    w = (0.5, 0.5) if s.kind == "epsilon" else (0.0, 0.0)
    u_spin = jet.einsum("lab,l->ab", s.down_up, u)
    du_world = covariant_derivative(u, (W_UP,), aff, conn)
    du_spin = covariant_derivative(u_spin, (U_UP, P_UP), aff, conn, w)
    back = jet.einsum("lab,mab->ml", s.up_down, du_spin)
    forth = jet.einsum("lab,ml->mab", s.down_up, du_world)
    V = jet.value
    return float(max(np.max(np.abs(V(back - du_world))), np.max(np.abs(V(forth - du_spin)))))


def trace_shift_invariance(aff: SpinAffinity, s: SolderingForm, conn: WorldConnection,
                           iota: np.ndarray) -> dict[str, float]:
    """Shift the imaginary trace by ``i iota_mu delta`` and compare ``nabla S``, ``nabla(MM)``.

    Also checks that moving ``i iota`` between the torsionless and torsional
    pieces leaves the full affinity unchanged.
    """
    shift = 1j * np.eye(2)[None, :, :, None] * iota[:, None, None, :]
    shifted = SpinAffinity(aff.theta + shift, aff.theta_torsion, aff.phi, aff.upsilon)
    moved = SpinAffinity(aff.theta, aff.theta_torsion + shift, aff.phi, aff.upsilon)
    V = jet.value
    return {
        "soldering": float(np.max(np.abs(V(_nabla_soldering(shifted, s, conn))
                                         - V(_nabla_soldering(aff, s, conn))))),
        "metric_product": float(np.max(np.abs(V(_nabla_metric_product(shifted, s, conn))
                                              - V(_nabla_metric_product(aff, s, conn))))),
        "split": float(np.max(np.abs(jet.value(moved.theta_sym + moved.theta_torsion - aff.theta)))),
    }
