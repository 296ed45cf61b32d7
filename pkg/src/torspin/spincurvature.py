"""Mixed world-spin curvature, curvature spinors and their identities.

Array layouts (derivative or world indices first, then spinor indices):

* ``C[m, n, A, B]`` is ``C_{mu nu A}^B``; its lowered form ``C_{mu nu AB}``
  uses ``x_B = x^A M_{AB}``.
* ``curv_unprimed[A, B, C, D]`` is ``w_{ABCD}`` and ``curv_primed[A', B', C, D]``
  is ``w_{A'B'CD}``.
* ``tau[A, B, C, C']`` is ``tau_{AB}^{CC'}`` and ``tau_primed[A', B', C, C']``
  its partner.
* Soldered world tensors carry one ``(A, A')`` pair per world index, in order.

"Complex conjugate" of a spinor expression means conjugating the array and
swapping the unprimed and primed member of every index pair.

In the epsilon formalism every spinor built from world tensors, soldering
forms and ``eps`` is a density of weights ``(n_up - n_lo) / 2`` per kind.
"""

from __future__ import annotations

from dataclasses import dataclass

import itertools

import numpy as np

from . import jet
from .covariant import d_operator, nabla
from .soldering import SolderingForm
from .spinaffinity import P_DOWN, P_UP, U_DOWN, U_UP, W_DOWN, SpinAffinity
from .spintensor import Slot
from .worldgeom import (DOWN, WorldConnection, WorldCurvature, dual_bianchi_terms, dual_cyclic_terms,
                        dual_torsion, first_dual, raise_index)

V = jet.value


def _max(a) -> float:
    return float(np.max(np.abs(a), initial=0.0))


def spin_curvature_of(kernel: np.ndarray) -> np.ndarray:
    """``2 d_[mu k_nu]A^B - (k_mu A^C k_nu C^B - k_nu A^C k_mu C^B)``."""
    dk = jet.grad(kernel)
    quad = jet.einsum("mac,ncb->mnab", kernel, kernel)
    return dk - np.swapaxes(dk, 0, 1) - (quad - np.swapaxes(quad, 0, 1))


def curl(v: np.ndarray) -> np.ndarray:
    """``2 d_[mu v_nu]``."""
    d = jet.grad(v)
    return d - np.swapaxes(d, 0, 1)


@dataclass(frozen=True)
class MixedCurvature:
    full: np.ndarray
    sym: np.ndarray
    torsion: np.ndarray
    entangled: np.ndarray
    f_sym: np.ndarray
    f_torsion: np.ndarray

    @property
    def trace(self) -> np.ndarray:
        return np.einsum("mnaa...->mn...", self.full)

    @property
    def f(self) -> np.ndarray:
        return self.f_sym + self.f_torsion


def mixed_curvature(aff: SpinAffinity) -> MixedCurvature:
    """Full curvature of the spin affinity and its torsionless/torsional/entangled split."""
    ts, tt = aff.theta_sym, aff.theta_torsion
    cross = jet.einsum("mac,ncb->mnab", ts, tt) + jet.einsum("mac,ncb->mnab", tt, ts)
    return MixedCurvature(
        full=spin_curvature_of(aff.theta),
        sym=spin_curvature_of(ts),
        torsion=spin_curvature_of(tt),
        entangled=-(cross - np.swapaxes(cross, 0, 1)),
        f_sym=curl(aff.phi),
        f_torsion=curl(aff.potential_a),
    )


# ---------------------------------------------------------------------------
# index gymnastics on point values
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpinFrame:
    """Point values of the soldering family and spinor metrics."""

    m_lo: np.ndarray
    m_hi: np.ndarray
    down_up: np.ndarray
    up_down: np.ndarray
    up_up: np.ndarray
    down_down: np.ndarray

    @classmethod
    def of(cls, s: SolderingForm) -> "SpinFrame":
        return cls(V(s.metric_lo), V(s.metric_hi), V(s.down_up), V(s.up_down),
                   V(s.up_up), V(s.down_down))

    @property
    def mb_lo(self) -> np.ndarray:
        return np.conj(self.m_lo)

    @property
    def mb_hi(self) -> np.ndarray:
        return np.conj(self.m_hi)


def cc(x: np.ndarray) -> np.ndarray:
    """Complex conjugate of a spinor array with axes ``(A, A', B, B', ...)``."""
    n = x.ndim
    perm = []
    for k in range(0, n, 2):
        perm += [k + 1, k]
    return np.conj(np.transpose(x, perm))


def solder_lower(x: np.ndarray, f: SpinFrame) -> np.ndarray:
    """Convert every lower world index of ``x`` into a lower ``(A, A')`` pair."""
    out = x
    for _ in range(x.ndim):
        out = np.tensordot(out, f.up_down, axes=([0], [0]))
    return out


def soldered_riemann(curv: WorldCurvature, f: SpinFrame) -> np.ndarray:
    return solder_lower(V(curv.riemann_low), f)


def lower_c(c: np.ndarray, m_lo: np.ndarray) -> np.ndarray:
    """``C_{mu nu AB} = C_{mu nu A}^C M_{CB}`` (jets or values)."""
    if c.ndim == 5:
        return jet.einsum("mnac,cb->mnab", c, m_lo)
    return np.einsum("mnac,cb->mnab", c, m_lo)


@dataclass(frozen=True)
class CurvatureSpinors:
    unprimed: np.ndarray
    primed: np.ndarray

    @property
    def x(self) -> np.ndarray:
        """``X_{ABCD} = w_{AB(CD)}``."""
        return 0.5 * (self.unprimed + np.swapaxes(self.unprimed, 2, 3))

    @property
    def xi_big(self) -> np.ndarray:
        """``Xi_{A'B'CD} = w_{A'B'(CD)}``."""
        return 0.5 * (self.primed + np.swapaxes(self.primed, 2, 3))


def curvature_spinors_of(c_lo: np.ndarray, s: SolderingForm) -> CurvatureSpinors:
    """``w_{ABCD} = 1/2 S^mu_{AA'} S^nu_B^{A'} C_{mu nu CD}`` and its primed partner (jets)."""
    ud = s.up_down
    mb_hi = jet.conj(s.metric_hi)
    # S^nu_B^{A'} = Mb^{A'E'} S^nu_{BE'};  S^nu_{B'}^A = M^{AE} S^nu_{EB'}
    raised_p = jet.einsum("xe,nbe->nbx", mb_hi, ud)
    raised_u = jet.einsum("xe,neb->nbx", s.metric_hi, ud)
    un = 0.5 * jet.einsum("max,nbx,mncd->abcd", ud, raised_p, c_lo)
    pr = 0.5 * jet.einsum("mxa,nbx,mncd->abcd", ud, raised_u, c_lo)
    return CurvatureSpinors(un, pr)


def curvature_spinors(c: MixedCurvature, s: SolderingForm) -> CurvatureSpinors:
    return curvature_spinors_of(lower_c(c.full, s.metric_lo), s)


def contracted(w: np.ndarray, m_hi: np.ndarray) -> np.ndarray:
    """``w_{..C}^C = M^{CD} w_{..CD}`` on the last two axes (point values)."""
    return np.einsum("cd,...cd->...", m_hi, w)


# ---------------------------------------------------------------------------
# mixed curvature identities
# ---------------------------------------------------------------------------

def mixed_curvature_checks(c: MixedCurvature, aff: SpinAffinity, conn: WorldConnection,
                           zeta: np.ndarray) -> dict[str, float]:
    """Split, commutator and trace identities of ``C``."""
    d = d_operator(zeta, (U_UP,), conn.gamma, conn.torsion, aff.theta)
    cz = jet.einsum("mnab,a->mnb", c.full, zeta)
    tr = V(c.trace)
    a_mu = aff.potential_a
    da = nabla(a_mu, (W_DOWN,), conn.gamma)
    f_torsion_cov = da - np.swapaxes(da, 0, 1) + 2 * jet.einsum("mnl,l->mn", conn.torsion, a_mu)
    dphi = nabla(aff.phi, (W_DOWN,), conn.gamma_sym)
    f_sym_cov = dphi - np.swapaxes(dphi, 0, 1)
    return {
        "split": _max(V(c.full - c.sym - c.torsion - c.entangled)),
        "commutator": _max(V(d - cz)),
        "entangled_trace": _max(V(np.einsum("mnaa...->mn...", c.entangled))),
        "additivity": _max(tr - V(np.einsum("mnaa...->mn...", c.sym + c.torsion))),
        "real_trace": _max(tr.real),
        "trace_potential": _max(tr + 2j * V(c.f)),
        "f_torsion_covariant": _max(V(f_torsion_cov - c.f_torsion)),
        "f_sym_covariant": _max(V(f_sym_cov - c.f_sym)),
    }


def torsion_square_shuffles(torsion: np.ndarray) -> dict[str, float]:
    """``T_[mu|t|^r T_nu]l^t = -T_[mu|l|^t T_nu]t^r = T_l[mu^t T_nu]t^r`` (point values)."""
    t = V(torsion) if torsion.ndim == 4 else torsion

    def skew(x):
        return 0.5 * (x - np.swapaxes(x, 0, 1))

    a = skew(np.einsum("mtr,nlt->mnlr", t, t))
    b = -skew(np.einsum("mlt,ntr->mnlr", t, t))
    c = skew(np.einsum("lmt,ntr->mnlr", t, t))
    return {"first": _max(a - b), "second": _max(b - c)}


def curvature_splitting_check(c: MixedCurvature, aff: SpinAffinity, s: SolderingForm,
                              conn: WorldConnection, curv: WorldCurvature) -> dict[str, float]:
    """Splitting of ``D_{mu nu}`` acting on the soldering form ``S_l^{AA'}``."""
    slots = (W_DOWN, U_UP, P_UP)
    w = (0.5, 0.5) if s.kind == "epsilon" else (0.0, 0.0)
    du = s.down_up
    res = {}
    # torsionless commutator
    first = nabla(du, slots, conn.gamma_sym, aff.theta_sym, w)
    second = nabla(first, (W_DOWN,) + slots, conn.gamma_sym, aff.theta_sym, w)
    comm = second - np.swapaxes(second, 0, 1)
    res["torsionless_commutator"] = _max(V(comm) - V(_ricci_action(
        curv.riemann_sym, c.sym, du, w)))
    # world torsion piece
    dt = nabla(conn.torsion, (W_DOWN, W_DOWN, Slot("world", True)), conn.gamma_sym)
    tt = jet.einsum("lmt,ntr->mnlr", conn.torsion, conn.torsion)
    lhs = dt - np.swapaxes(dt, 0, 1) + tt - np.swapaxes(tt, 0, 1)
    res["torsion_piece"] = _max(V(lhs - curv.riemann_torsion - curv.crossed))
    # full operator on S vanishes and equals the curvature action
    dfull = d_operator(du, slots, conn.gamma, conn.torsion, aff.theta, w)
    res["operator_vanishes"] = _max(V(dfull))
    res["curvature_action"] = _max(V(_ricci_action(curv.riemann, c.full, du, w)))
    res["metricity_trace"] = _max(V(np.einsum("mnll...->mn...", curv.riemann)))
    f = SpinFrame.of(s)
    cv = V(c.full)
    trace = np.einsum("mnaa->mn", cv)
    rr = np.einsum("lax,rbx,mnlr->mnab", f.up_down, f.up_up, V(curv.riemann_low))
    res["transvection"] = _max(2 * cv + np.eye(2)[None, None] * np.conj(trace)[:, :, None, None] - rr)
    res["real_trace"] = _max(trace.real)
    return res


def _ricci_action(riem, cmix, du, w):
    """``-R_{mu nu l}^r S_r^{AA'} + C_{mu nu B}^A S_l^{BA'} + cc - (w tr C + wb cc) S``."""
    out = -jet.einsum("mnlr,rab->mnlab", riem, du)
    out = out + jet.einsum("mnca,lcb->mnlab", cmix, du)
    out = out + jet.einsum("mncb,lac->mnlab", jet.conj(cmix), du)
    tr = np.einsum("mnaa...->mn...", cmix)
    dens = w[0] * tr + w[1] * jet.conj(tr)
    return out - jet.einsum("mn,lab->mnlab", dens, du)


def splitting_by_riemann(c: MixedCurvature, s: SolderingForm, curv: WorldCurvature) -> dict[str, float]:
    """``C_{mu nu AB} = 1/2 S^l_{AA'} S^r_B^{A'} R_{mu nu l r} - i F M_{AB}``."""
    f = SpinFrame.of(s)
    c_lo = lower_c(V(c.full), f.m_lo)
    s_rb = np.einsum("xe,rbe->rbx", f.mb_hi, f.up_down)
    rr = 0.5 * np.einsum("lax,rbx,mnlr->mnab", f.up_down, s_rb, V(curv.riemann_low))
    fv = V(c.f)
    split = rr - 1j * fv[:, :, None, None] * f.m_lo[None, None]
    sym_c = 0.5 * (c_lo + np.swapaxes(c_lo, 2, 3))
    return {"splitting": _max(c_lo - split), "symmetric_part": _max(sym_c - rr),
            "r_part_symmetric": _max(rr - np.swapaxes(rr, 2, 3))}


# ---------------------------------------------------------------------------
# curvature spinors
# ---------------------------------------------------------------------------

def curvature_spinor_checks(c: MixedCurvature, cs: CurvatureSpinors, s: SolderingForm) -> dict[str, float]:
    f = SpinFrame.of(s)
    un, pr = V(cs.unprimed), V(cs.primed)
    c_lo = lower_c(V(c.full), f.m_lo)
    lhs = np.einsum("max,nby,mncd->axbycd", f.up_down, f.up_down, c_lo)
    rhs = (np.einsum("xy,abcd->axbycd", f.mb_lo, un)
           + np.einsum("ab,xycd->axbycd", f.m_lo, pr))
    tr_u, tr_p = contracted(un, f.m_hi), contracted(pr, f.m_hi)
    fv = V(c.f)
    bivector = -2j * np.einsum("max,nby,mn->axby", f.up_down, f.up_down, fv)
    rebuilt = np.einsum("xy,ab->axby", f.mb_lo, tr_u) + np.einsum("ab,xy->axby", f.m_lo, tr_p)
    return {
        "bivector_decomposition": _max(lhs - rhs),
        "unprimed_symmetric": _max(un - np.swapaxes(un, 0, 1)),
        "primed_symmetric": _max(pr - np.swapaxes(pr, 0, 1)),
        "contracted_bivector": _max(bivector - rebuilt),
        "conjugation_unprimed": _max(tr_u + np.conj(tr_p)),
    }


# ---------------------------------------------------------------------------
# irreducible decomposition
# ---------------------------------------------------------------------------

def _sym4(x: np.ndarray) -> np.ndarray:
    return sum(np.transpose(x, p) for p in itertools.permutations(range(4))) / 24.0


def irreducible_decomposition(x: np.ndarray, m_lo: np.ndarray, m_hi: np.ndarray):
    """``(Psi_{ABCD}, xi_{AB}, kappa)`` of ``X_{ABCD}`` (point values)."""
    psi = _sym4(x)
    # X^M_{ABM} = M^{ME} X_{EABM}
    xm = np.einsum("me,eabm->ab", m_hi, x)
    xi = 0.5 * (xm + xm.T)
    # X_{LM}^{LM} = M^{LP} M^{MQ} X_{LMPQ}
    kappa = np.einsum("lp,mq,lmpq->", m_hi, m_hi, x)
    return psi, xi, kappa


def reassemble(psi: np.ndarray, xi: np.ndarray, kappa, m_lo: np.ndarray,
               kappa_coefficient: float = 1.0 / 3.0) -> np.ndarray:
    """``Psi - M_(A|(C xi_D)|B) - c kappa M_A(C M_D)B``."""
    t = np.einsum("ac,db->abcd", m_lo, xi)
    t = 0.5 * (t + np.swapaxes(t, 2, 3))
    t = 0.5 * (t + np.swapaxes(t, 0, 1))
    mm = np.einsum("ac,db->abcd", m_lo, m_lo)
    mm = 0.5 * (mm + np.swapaxes(mm, 2, 3))
    return psi - t - kappa_coefficient * kappa * mm


def decomposition_check(x: np.ndarray, m_lo: np.ndarray, m_hi: np.ndarray) -> dict[str, float]:
    psi, xi, kappa = irreducible_decomposition(x, m_lo, m_hi)
    return {"reassembly": _max(x - reassemble(psi, xi, kappa, m_lo)),
            "psi_symmetric": _max(psi - _sym4(psi))}


# ---------------------------------------------------------------------------
# Riemann and Ricci from the curvature spinors
# ---------------------------------------------------------------------------

def riemann_from_spinors(x: np.ndarray, xi_big: np.ndarray, f: SpinFrame) -> np.ndarray:
    """``(Mb_A'B' Mb_C'D' X_ABCD + M_AB Mb_C'D' Xi_A'B'CD) + cc`` with axes ``A A' B B' C C' D D'``."""
    a = (np.einsum("xy,zw,abcd->axbyczdw", f.mb_lo, f.mb_lo, x)
         + np.einsum("ab,zw,xycd->axbyczdw", f.m_lo, f.mb_lo, xi_big))
    return a + cc(a)


def dual_riemann_from_spinors(x: np.ndarray, xi_big: np.ndarray, f: SpinFrame) -> np.ndarray:
    a = -1j * (np.einsum("xy,zw,abcd->axbyczdw", f.mb_lo, f.mb_lo, x)
               - np.einsum("ab,zw,xycd->axbyczdw", f.m_lo, f.mb_lo, xi_big))
    return a + cc(a)


def riemann_reconstruction(cs: CurvatureSpinors, s: SolderingForm, conn: WorldConnection,
                           curv: WorldCurvature) -> dict[str, float]:
    """Rebuild the soldered Riemann tensor and its first-left dual from ``(X, Xi)``."""
    f = SpinFrame.of(s)
    x, xb = V(cs.x), V(cs.xi_big)
    r_spin = soldered_riemann(curv, f)
    dual_spin = solder_lower(V(first_dual(curv.riemann_low, conn)), f)
    x_back = 0.25 * np.einsum("xy,zw,axbyczdw->abcd", f.mb_hi, f.mb_hi, r_spin)
    xb_back = 0.25 * np.einsum("ab,zw,axbyczdw->xycd", f.m_hi, f.mb_hi, r_spin)
    return {
        "riemann": _max(riemann_from_spinors(x, xb, f) - r_spin),
        "unprimed_inversion": _max(x_back - x),
        "primed_inversion": _max(xb_back - xb),
        "dual": _max(dual_riemann_from_spinors(x, xb, f) - dual_spin),
    }


def ricci_spinors(cs: CurvatureSpinors, s: SolderingForm, conn: WorldConnection,
                  curv: WorldCurvature) -> dict[str, float]:
    """Ricci tensor, scalar and contracted dual from ``(xi, kappa, Xi)``."""
    f = SpinFrame.of(s)
    x, xb = V(cs.x), V(cs.xi_big)
    _, xi, kappa = irreducible_decomposition(x, f.m_lo, f.m_hi)
    ricci_spin = solder_lower(V(curv.ricci), f)
    a = np.einsum("xy,ab->axby", f.mb_lo, xi) + np.einsum("xyab->axby", xb)
    ricci_rebuilt = kappa.real * np.einsum("ab,xy->axby", f.m_lo, f.mb_lo) - (a + cc(a))
    scalar = V(curv.scalar(conn.ginv))
    dual = V(first_dual(curv.riemann_low, conn))
    dual_up = np.einsum("pl,lmns->pmns", V(conn.ginv), dual)
    contracted_dual = np.einsum("lmls->ms", dual_up)
    b = 1j * (np.einsum("xy,ab->axby", f.mb_lo, xi)
              - 0.5 * kappa * np.einsum("ab,xy->axby", f.m_lo, f.mb_lo)
              - np.einsum("xyab->axby", xb))
    double = np.einsum("pm,qn,pqmn->", V(conn.ginv), V(conn.ginv), dual)
    return {
        "ricci": _max(ricci_rebuilt - ricci_spin),
        "scalar": _max(scalar - 4 * kappa.real),
        "contracted_dual": _max(b + cc(b) - solder_lower(contracted_dual, f)),
        "dual_scalar": _max(double - 4 * kappa.imag),
    }


# ---------------------------------------------------------------------------
# torsion spinors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorsionSpinors:
    """Jets of ``T_{AA'BB'}^{CC'}``, ``tau_{AB}^{CC'}`` and ``tau_{A'B'}^{CC'}``."""

    soldered: np.ndarray
    tau: np.ndarray
    tau_primed: np.ndarray


def torsion_spinors(conn: WorldConnection, s: SolderingForm) -> TorsionSpinors:
    ud = s.up_down
    t = jet.einsum("max,nby,mnl,lcz->axbycz", ud, ud, conn.torsion, s.down_up)
    mb_hi = jet.conj(s.metric_hi)
    # tau_AB^{CC'} = 1/2 T_(A|D'|B)^{D'CC'} with T_{AD'B}^{D'} = Mb^{D'E'} T_{AD'BE'}
    tau = 0.5 * jet.einsum("xy,axbycz->abcz", mb_hi, t)
    tau = 0.5 * (tau + np.swapaxes(tau, 0, 1))
    tau_p = 0.5 * jet.einsum("ab,axbycz->xycz", s.metric_hi, t)
    tau_p = 0.5 * (tau_p + np.swapaxes(tau_p, 0, 1))
    return TorsionSpinors(t, tau, tau_p)


def lower_pair(x: np.ndarray, m_lo: np.ndarray) -> np.ndarray:
    """Lower the trailing ``(C, C')`` pair of ``x`` (jets)."""
    return jet.einsum("abcz,cd,zw->abdw", x, m_lo, jet.conj(m_lo))


def torsion_spinor_checks(ts: TorsionSpinors, s: SolderingForm, conn: WorldConnection,
                          a_mu: np.ndarray) -> dict[str, float]:
    """Reassembly of ``T`` from its ``tau`` pieces and the dual torsion spinor."""
    f = SpinFrame.of(s)
    t, tau, tau_p = V(ts.soldered), V(ts.tau), V(ts.tau_primed)
    rebuilt = (np.einsum("xy,abcz->axbycz", f.mb_lo, tau)
               + np.einsum("ab,xycz->axbycz", f.m_lo, tau_p))
    a_spin = np.einsum("lcz,l->cz", f.up_down, V(a_mu))
    contracted_t = np.einsum("axbycz,cz->axby", t, a_spin)
    contracted_tau = (np.einsum("xy,abcz,cz->axby", f.mb_lo, tau, a_spin)
                      + np.einsum("ab,xycz,cz->axby", f.m_lo, tau_p, a_spin))
    tau_lo = np.einsum("abcz,cd,zw->abdw", tau, f.m_lo, f.mb_lo)
    tau_p_lo = np.einsum("abcz,cd,zw->abdw", tau_p, f.m_lo, f.mb_lo)
    dual_spin = 1j * (np.einsum("ab,xycz->axbycz", f.m_lo, tau_p_lo)
                      - np.einsum("xy,abcz->axbycz", f.mb_lo, tau_lo))
    dual_world = solder_lower(V(first_dual(conn.torsion_low, conn)), f)
    return {
        "reassembly": _max(rebuilt - t),
        "potential_contraction": _max(contracted_tau - contracted_t),
        "tau_symmetric": _max(tau - np.swapaxes(tau, 0, 1)),
        "dual": _max(dual_spin - dual_world),
    }


# ---------------------------------------------------------------------------
# contracted curvature spinors
# ---------------------------------------------------------------------------

def density_weight(s: SolderingForm, n_up: int, n_lo: int, n_up_p: int, n_lo_p: int):
    """Epsilon-formalism weights ``((n_up - n_lo)/2, (n'_up - n'_lo)/2)``; zero otherwise."""
    if s.kind != "epsilon":
        return (0.0, 0.0)
    return (0.5 * (n_up - n_lo), 0.5 * (n_up_p - n_lo_p))


def spinor_gradient(x: np.ndarray, slots, aff: SpinAffinity, conn: WorldConnection,
                    s: SolderingForm, weight) -> np.ndarray:
    """``nabla_{AA'} x = S^mu_{AA'} nabla_mu x`` with the new pair placed first."""
    return _solder_first(nabla(x, tuple(slots), conn.gamma, aff.theta, weight), s)


def _solder_first(d: np.ndarray, s: SolderingForm) -> np.ndarray:
    rest = "cdefghij"[: d.ndim - 2]
    return jet.einsum(f"max,m{rest}->ax{rest}", s.up_down, d)


def potential_curl_spinor(v: np.ndarray, aff: SpinAffinity, conn: WorldConnection,
                          s: SolderingForm, tau: np.ndarray) -> np.ndarray:
    """``2i (nabla_(A^C' v_B)C' - 2 tau_AB^{CC'} v_CC')`` for a world covector ``v``."""
    v_spin = jet.einsum("lbz,l->bz", s.up_down, v)
    w = density_weight(s, 0, 1, 0, 1)
    grad = V(spinor_gradient(v_spin, (U_DOWN, P_DOWN), aff, conn, s, w))  # [A, E', B, C']
    mb_hi = np.conj(V(s.metric_hi))
    term = np.einsum("ze,aebz->ab", mb_hi, grad)
    term = 0.5 * (term + term.T)
    tau_v = np.einsum("abcz,cz->ab", V(tau), V(v_spin))
    return 2j * (term - 2 * tau_v)


def potential_curl_spinor_primed(v: np.ndarray, aff: SpinAffinity, conn: WorldConnection,
                                 s: SolderingForm, tau_primed: np.ndarray) -> np.ndarray:
    """``2i (nabla_(A'^C v_B')C - 2 tau_A'B'^{CC'} v_CC')``."""
    v_spin = jet.einsum("lbz,l->bz", s.up_down, v)
    w = density_weight(s, 0, 1, 0, 1)
    grad = V(spinor_gradient(v_spin, (U_DOWN, P_DOWN), aff, conn, s, w))  # [E, A', C, B']
    m_hi = V(s.metric_hi)
    term = np.einsum("ce,excy->xy", m_hi, grad)
    term = 0.5 * (term + term.T)
    tau_v = np.einsum("xycz,cz->xy", V(tau_primed), V(v_spin))
    return 2j * (term - 2 * tau_v)


def contracted_curvature_relations(c: MixedCurvature, aff: SpinAffinity, s: SolderingForm,
                                   conn: WorldConnection, ts: TorsionSpinors) -> dict[str, float]:
    """Traces of the curvature spinors against potential-curl expressions."""
    f = SpinFrame.of(s)
    full = curvature_spinors(c, s)
    sym = curvature_spinors_of(lower_c(c.sym, s.metric_lo), s)
    tors = curvature_spinors_of(lower_c(c.torsion, s.metric_lo), s)

    def tr(w):
        return contracted(V(w), f.m_hi)

    a_mu = aff.potential_a
    return {
        "additivity_unprimed": _max(tr(full.unprimed) - tr(sym.unprimed) - tr(tors.unprimed)),
        "additivity_primed": _max(tr(full.primed) - tr(sym.primed) - tr(tors.primed)),
        "torsional_unprimed": _max(tr(tors.unprimed) - potential_curl_spinor(a_mu, aff, conn, s, ts.tau)),
        "torsional_primed": _max(tr(tors.primed)
                                 - potential_curl_spinor_primed(a_mu, aff, conn, s, ts.tau_primed)),
        "torsionless_unprimed": _max(tr(sym.unprimed) - potential_curl_spinor(aff.phi, aff, conn, s, ts.tau)),
    }


# ---------------------------------------------------------------------------
# spinor forms of the dual cyclic and Bianchi identities
# ---------------------------------------------------------------------------

ALPHA_PRINTED = -2j
ALPHA_DIAGNOSTIC = -1j


def alpha_spinor(aff: SpinAffinity, s: SolderingForm, formalism, point) -> np.ndarray:
    """``alpha_{AA'}`` (point values); zero in the epsilon formalism."""
    if s.kind == "epsilon":
        return np.zeros((2, 2), dtype=complex)
    alpha = jet.grad(formalism.phase_jet(point)) + 2 * (aff.phi + aff.potential_a)
    return np.einsum("max,m->ax", V(s.up_down), V(alpha))


def torsion_divergence_spinor(ts: TorsionSpinors, aff: SpinAffinity, conn: WorldConnection,
                              s: SolderingForm, alpha: np.ndarray) -> np.ndarray:
    """``i[(nabla_B^{A'} tau_{A'B'CC'} + i alpha_B^{A'} tau_{A'B'CC'}) - cc]``."""
    f = SpinFrame.of(s)
    tp_lo = lower_pair(ts.tau_primed, s.metric_lo)
    w = density_weight(s, 0, 1, 0, 3)
    g = V(spinor_gradient(tp_lo, (P_DOWN, P_DOWN, U_DOWN, P_DOWN), aff, conn, s, w))
    term = np.einsum("xe,bexycz->bycz", f.mb_hi, g)
    alpha_raised = np.einsum("xe,be->bx", f.mb_hi, alpha)
    term = term + 1j * np.einsum("bx,xycz->bycz", alpha_raised, V(tp_lo))
    return 1j * (term - cc(term))


def torsion_divergence_world(conn: WorldConnection, s: SolderingForm) -> np.ndarray:
    """Soldered ``nabla^l *T_{l mu nu}``."""
    dst = nabla(dual_torsion(conn), (DOWN, DOWN, DOWN), conn.gamma)
    div = np.einsum("pl,plmn->mn", V(conn.ginv), V(dst))
    return solder_lower(div, SpinFrame.of(s))


def torsion_square_spinor(ts: TorsionSpinors, s: SolderingForm) -> np.ndarray:
    """``i[(tau_B^{DM}_{B'} tau_{DMCC'} - cc) - (tau_{BD}^{DD'} tau_{B'D'CC'} - cc)]``."""
    f = SpinFrame.of(s)
    tau, tau_p = V(ts.tau), V(ts.tau_primed)
    tau_lo = np.einsum("abcz,cd,zw->abdw", tau, f.m_lo, f.mb_lo)
    tau_p_lo = np.einsum("abcz,cd,zw->abdw", tau_p, f.m_lo, f.mb_lo)
    u1 = np.einsum("dy,bymz,zx->bdmx", f.m_hi, tau, f.mb_lo)
    e1 = np.einsum("bdmx,dmcz->bxcz", u1, tau_lo)
    t2 = np.einsum("bddy->by", tau)
    e2 = np.einsum("by,xycz->bxcz", t2, tau_p_lo)
    return 1j * ((e1 - cc(e1)) - (e2 - cc(e2)))


def torsion_square_world(conn: WorldConnection, s: SolderingForm) -> np.ndarray:
    """Soldered ``*T_mu^{l t} T_{l t nu}``."""
    st_up = raise_index(raise_index(dual_torsion(conn), 1, conn.ginv), 2, conn.ginv)
    return solder_lower(np.einsum("mlt,ltn->mn", V(st_up), V(conn.torsion_low)), SpinFrame.of(s))


def contracted_dual_spinor(cs: CurvatureSpinors, s: SolderingForm) -> np.ndarray:
    """``*R^{CC'}_{AA'CC'BB'}`` from ``(xi, kappa, Xi)``."""
    f = SpinFrame.of(s)
    _, xi, kappa = irreducible_decomposition(V(cs.x), f.m_lo, f.m_hi)
    b = 1j * (np.einsum("xy,ab->axby", f.mb_lo, xi)
              - 0.5 * kappa * np.einsum("ab,xy->axby", f.m_lo, f.mb_lo)
              - np.einsum("xyab->axby", V(cs.xi_big)))
    return b + cc(b)


def dual_cyclic_spinor_check(cs: CurvatureSpinors, ts: TorsionSpinors, aff: SpinAffinity,
                             conn: WorldConnection, curv: WorldCurvature, s: SolderingForm,
                             alpha: np.ndarray) -> dict[str, float]:
    """Spinor divergence, torsion square and the assembled dual cyclic identity."""
    f = SpinFrame.of(s)
    div_s = torsion_divergence_spinor(ts, aff, conn, s, alpha)
    sq_s = torsion_square_spinor(ts, s)
    assembled = -contracted_dual_spinor(cs, s) + 2 * div_s + 4 * sq_s
    world = solder_lower(V(dual_cyclic_terms(conn, curv)), f)
    return {
        "divergence": _max(div_s - torsion_divergence_world(conn, s)),
        "torsion_square": _max(sq_s - torsion_square_world(conn, s)),
        "assembled": _max(assembled - world),
        "assembled_absolute": _max(assembled),
    }


def riemann_divergence_spinor(cs: CurvatureSpinors, aff: SpinAffinity, conn: WorldConnection,
                              s: SolderingForm, alpha: np.ndarray,
                              alpha_coefficient: complex = ALPHA_PRINTED) -> np.ndarray:
    """``-2i(nabla_B'^A X_ABCD + c alpha_B'^A X_ABCD - nabla_B^A' Xi_A'B'CD)`` with axes ``B B' C D``."""
    f = SpinFrame.of(s)
    x, xb = cs.x, cs.xi_big
    gx = V(spinor_gradient(x, (U_DOWN,) * 4, aff, conn, s, density_weight(s, 0, 4, 0, 0)))
    gxb = V(spinor_gradient(xb, (P_DOWN, P_DOWN, U_DOWN, U_DOWN), aff, conn, s,
                            density_weight(s, 0, 2, 0, 2)))
    t1 = np.einsum("ae,eyabcd->bycd", f.m_hi, gx)
    alpha_up = np.einsum("ae,ey->ay", f.m_hi, alpha)
    t2 = alpha_coefficient * np.einsum("ay,abcd->bycd", alpha_up, V(x))
    t3 = np.einsum("xe,bexycd->bycd", f.mb_hi, gxb)
    return -2j * (t1 + t2 - t3)


def torsion_riemann_spinor(cs: CurvatureSpinors, ts: TorsionSpinors, s: SolderingForm) -> np.ndarray:
    """Spinor form of ``Mb^{C'D'} *T_{BB'}^{LL'MM'} R_{LL'MM'CC'DD'}`` with axes ``B B' C D``."""
    f = SpinFrame.of(s)
    x, xb = V(cs.x), V(cs.xi_big)
    tau, tau_p = V(ts.tau), V(ts.tau_primed)
    t3 = np.einsum("yxlx->yl", tau_p)
    e1 = np.einsum("yl,lbcd->bycd", t3, x)
    u = np.einsum("xv,yvzw,zb->yxbw", f.mb_hi, tau_p, f.m_lo)
    u = 0.5 * (u + np.swapaxes(u, 1, 3))
    e2 = np.einsum("yxbw,xwcd->bycd", u, xb)
    v = np.einsum("lv,bvmz,zy->blmy", f.m_hi, tau, f.mb_lo)
    v = 0.5 * (v + np.swapaxes(v, 1, 2))
    e3 = np.einsum("blmy,lmcd->bycd", v, x)
    t4 = np.einsum("bllx->bx", tau)
    e4 = np.einsum("bx,xycd->bycd", t4, xb)
    return 2j * ((e1 - e2) + (e3 - e4))


def _contract_primed_last(x_world: np.ndarray, f: SpinFrame) -> np.ndarray:
    """Solder a 3-index world tensor and apply ``Mb^{C'D'}`` to the last two pairs."""
    sp = solder_lower(x_world, f)  # [B, B', C, C', D, D']
    return np.einsum("zw,byczdw->bycd", f.mb_hi, sp)


def dual_bianchi_spinor_check(cs: CurvatureSpinors, ts: TorsionSpinors, aff: SpinAffinity,
                              conn: WorldConnection, curv: WorldCurvature, s: SolderingForm,
                              alpha: np.ndarray,
                              alpha_coefficient: complex = ALPHA_PRINTED) -> dict[str, float]:
    """Spinor Riemann divergence and torsion coupling against the world dual Bianchi terms."""
    f = SpinFrame.of(s)
    sr = first_dual(curv.riemann_low, conn)
    dsr = nabla(sr, (DOWN,) * 4, conn.gamma)
    div_world = np.einsum("pr,prmls->mls", V(conn.ginv), V(dsr))
    st_up = raise_index(raise_index(dual_torsion(conn), 1, conn.ginv), 2, conn.ginv)
    coupling_world = np.einsum("mrt,rtls->mls", V(st_up), V(curv.riemann_low))
    div_s = riemann_divergence_spinor(cs, aff, conn, s, alpha, alpha_coefficient)
    coup_s = torsion_riemann_spinor(cs, ts, s)
    assembled = div_s + 2 * coup_s
    world = _contract_primed_last(V(dual_bianchi_terms(conn, curv)), f)
    return {
        "divergence": _max(div_s - _contract_primed_last(div_world, f)),
        "coupling": _max(coup_s - _contract_primed_last(coupling_world, f)),
        "assembled": _max(assembled - world),
        "assembled_absolute": _max(assembled),
    }
