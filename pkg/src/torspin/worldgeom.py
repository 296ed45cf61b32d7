"""World geometry with torsion: connection split, curvature and identities.

All objects are jet arrays (trailing Taylor axis).  Index placement:

* ``gamma[m, s, l]`` is ``Gamma_{mu sigma}^lambda``; covariant derivatives put
  the derivative index first, ``nabla_mu v^l = d_mu v^l + Gamma_{mu s}^l v^s``.
* ``torsion_low[m, n, l]`` is ``T_{mu nu lambda} = Gamma_{[mu nu] lambda}``.
* ``riemann[m, n, l, r]`` is ``R_{mu nu lambda}^rho`` with
  ``R = d_mu Gamma_{nu l}^r - d_nu Gamma_{mu l}^r + Gamma_{mu t}^r Gamma_{nu l}^t
  - Gamma_{nu t}^r Gamma_{mu l}^t``.
* duals act on the first index pair with ``sqrt(-g) eps_{mu nu al be}``,
  ``eps_{0123} = +1``.

Validity of jets: the metric enters at order 3, the connection is exact to
order 2, curvature to order 1 and its covariant derivative at the point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from . import jet
from .covariant import d_operator, nabla
from .errors import NonLorentzianSignature, SingularMetric
from .spintensor import LEVI_CIVITA, WORLD, Slot

DOWN = Slot(WORLD, False)
UP = Slot(WORLD, True)

COORD_NAMES = ("x0", "x1", "x2", "x3")


# ---------------------------------------------------------------------------
# input fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricField:
    """Symmetric 4x4 matrix of expressions (upper triangle is authoritative)."""

    entries: tuple[tuple[ex.Expr, ...], ...]

    @classmethod
    def from_upper(cls, upper: dict[tuple[int, int], ex.Expr]) -> "MetricField":
        rows = [[upper[(min(m, n), max(m, n))] for n in range(4)] for m in range(4)]
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def from_strings(cls, upper: dict[tuple[int, int], str]) -> "MetricField":
        return cls.from_upper({k: ex.parse(v) for k, v in upper.items()})

    def jets(self, point) -> np.ndarray:
        g = np.empty((4, 4, jet.NCOEF), dtype=complex)
        for m in range(4):
            for n in range(m, 4):
                g[m, n] = g[n, m] = ex.eval_jet_array(self.entries[m][n], point)
        return g


def validate_metric(g_value: np.ndarray, point=None):
    """Raise unless the metric is real, invertible and of signature (+,-,-,-)."""
    where = "" if point is None else f" at {tuple(point)}"
    if np.max(np.abs(g_value.imag)) > 1e-12:
        raise NonLorentzianSignature("metric is not real" + where)
    gr = g_value.real
    det = np.linalg.det(gr)
    scale = max(1.0, np.max(np.abs(gr))) ** 4
    if abs(det) < 1e-12 * scale:
        raise SingularMetric("metric is singular" + where)
    eig = np.linalg.eigvalsh(gr)
    if not (np.sum(eig > 0) == 1 and np.sum(eig < 0) == 3):
        raise NonLorentzianSignature(f"eigenvalues {eig} are not (+,-,-,-)" + where)


@dataclass(frozen=True)
class TorsionField:
    """Expressions for ``T_{mu nu lambda}`` with ``mu < nu``; the rest is implied."""

    entries: dict

    @classmethod
    def zero(cls) -> "TorsionField":
        return cls({})

    def jets(self, point) -> np.ndarray:
        t = np.zeros((4, 4, 4, jet.NCOEF), dtype=complex)
        for (m, n, l), e in self.entries.items():
            if m >= n:
                raise ValueError("torsion entries are keyed by mu < nu")
            t[m, n, l] = ex.eval_jet_array(e, point)
            t[n, m, l] = -t[m, n, l]
        return t


# ---------------------------------------------------------------------------
# connection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WorldConnection:
    g: np.ndarray
    ginv: np.ndarray
    det: np.ndarray
    christoffel: np.ndarray
    contortion: np.ndarray
    gamma: np.ndarray
    gamma_sym: np.ndarray
    torsion_low: np.ndarray
    torsion: np.ndarray

    @property
    def trace(self) -> np.ndarray:
        """``Gamma_mu = Gamma_{mu l}^l``."""
        return np.einsum("mll...->m...", self.gamma)

    @property
    def trace_sym(self) -> np.ndarray:
        return np.einsum("mll...->m...", self.gamma_sym)

    @property
    def torsion_trace(self) -> np.ndarray:
        """``T_mu = T_{mu l}^l``."""
        return np.einsum("mll...->m...", self.torsion)

    @property
    def sqrt_minus_det(self) -> np.ndarray:
        return jet.sqrt(-self.det)


def christoffel_lowered(g: np.ndarray) -> np.ndarray:
    """``C_{mu lambda sigma} = C_{mu lambda}^rho g_{rho sigma}``."""
    dg = jet.grad(g)  # dg[a, b, c] = d_a g_bc
    return 0.5 * (dg + np.transpose(dg, (1, 0, 2, 3)) - np.transpose(dg, (1, 2, 0, 3)))


def christoffel(g: np.ndarray, ginv: np.ndarray | None = None) -> np.ndarray:
    """Levi-Civita coefficients ``C_{mu nu}^lambda``."""
    if ginv is None:
        ginv = jet.matinv(g)
    return jet.einsum("mns,sl->mnl", christoffel_lowered(g), ginv)


def contortion_lowered(torsion_low: np.ndarray) -> np.ndarray:
    """``K_{mu nu lambda} = T_{mu nu lambda} - T_{nu lambda mu} + T_{lambda mu nu}``."""
    t = torsion_low
    return t - np.transpose(t, (2, 0, 1, 3)) + np.transpose(t, (1, 2, 0, 3))


def contortion(torsion_low: np.ndarray, ginv: np.ndarray) -> np.ndarray:
    return jet.einsum("mns,sl->mnl", contortion_lowered(torsion_low), ginv)


def contortion_by_solve(g: np.ndarray, dg: np.ndarray, torsion_low: np.ndarray) -> np.ndarray:
    """Contortion ``K_{mu nu}^lambda`` from an explicit linear solve (point values).

    Unknowns are the 40 symmetric components ``S_{(mu nu) lambda}``; equations
    are metric compatibility ``d_mu g_{ls} = Gamma_{mu l s} + Gamma_{mu s l}``
    with ``Gamma_{mu nu lambda} = S + T``.  The Christoffel part is then removed
    through its own definition, independent of the closed form.
    """
    unknowns = [(m, n, l) for m in range(4) for n in range(m, 4) for l in range(4)]
    col = {u: k for k, u in enumerate(unknowns)}

    def s_index(m, n, l):
        return col[(min(m, n), max(m, n), l)]

    rows, rhs = [], []
    for m in range(4):
        for l in range(4):
            for s in range(l, 4):
                row = np.zeros(len(unknowns))
                row[s_index(m, l, s)] += 1
                row[s_index(m, s, l)] += 1
                rows.append(row)
                rhs.append(dg[m, l, s] - torsion_low[m, l, s] - torsion_low[m, s, l])
    a = np.array(rows)
    b = np.array(rhs)
    sol = np.linalg.lstsq(a, b.real, rcond=None)[0] + 1j * np.linalg.lstsq(a, b.imag, rcond=None)[0]
    gam = np.array(torsion_low, dtype=complex)
    for (m, n, l), k in col.items():
        gam[m, n, l] += sol[k]
        if m != n:
            gam[n, m, l] += sol[k]
    chr_low = 0.5 * (dg + np.transpose(dg, (1, 0, 2)) - np.transpose(dg, (1, 2, 0)))
    return np.einsum("mns,sl->mnl", gam - chr_low, np.linalg.inv(g))


def world_connection(g: np.ndarray, torsion_low: np.ndarray) -> WorldConnection:
    ginv = jet.matinv(g)
    det = jet.det4(g)
    chris = christoffel(g, ginv)
    kont = contortion(torsion_low, ginv)
    gamma = chris + kont
    gamma_sym = 0.5 * (gamma + np.swapaxes(gamma, 0, 1))
    tors = jet.einsum("mns,sl->mnl", torsion_low, ginv)
    return WorldConnection(g, ginv, det, chris, kont, gamma, gamma_sym, torsion_low, tors)


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

def riemann_of(kernel: np.ndarray) -> np.ndarray:
    """``2(d_[mu G_nu] lambda^rho + G_[mu|tau|^rho G_nu] lambda^tau)`` for any kernel."""
    dk = jet.grad(kernel)
    quad = jet.einsum("mtr,nlt->mnlr", kernel, kernel)
    return dk - np.swapaxes(dk, 0, 1) + quad - np.swapaxes(quad, 0, 1)


def crossed_terms(gamma_sym: np.ndarray, torsion: np.ndarray) -> np.ndarray:
    """``2(T_[mu|t|^r Gt_nu]l^t + Gt_[mu|t|^r T_nu]l^t)``."""
    a = jet.einsum("mtr,nlt->mnlr", torsion, gamma_sym)
    b = jet.einsum("mtr,nlt->mnlr", gamma_sym, torsion)
    s = a + b
    return s - np.swapaxes(s, 0, 1)


@dataclass(frozen=True)
class WorldCurvature:
    riemann: np.ndarray
    riemann_sym: np.ndarray
    riemann_torsion: np.ndarray
    crossed: np.ndarray
    riemann_low: np.ndarray

    @property
    def ricci(self) -> np.ndarray:
        """``R_{mu nu} = R_{mu lambda nu}^lambda``."""
        return np.einsum("mlnl...->mn...", self.riemann)

    def scalar(self, ginv: np.ndarray) -> np.ndarray:
        return jet.einsum("mn,mn->", ginv, self.ricci)


def riemann(conn: WorldConnection) -> WorldCurvature:
    r = riemann_of(conn.gamma)
    return WorldCurvature(
        riemann=r,
        riemann_sym=riemann_of(conn.gamma_sym),
        riemann_torsion=riemann_of(conn.torsion),
        crossed=crossed_terms(conn.gamma_sym, conn.torsion),
        riemann_low=jet.einsum("mnlr,rs->mnls", r, conn.g),
    )


def first_dual(x: np.ndarray, conn: WorldConnection) -> np.ndarray:
    """First-left dual over the leading lower index pair of a jet array."""
    eps = LEVI_CIVITA[..., None] * conn.sqrt_minus_det
    rest = "uvwx"[: x.ndim - 3]
    up = jet.einsum(f"pa,qb,ab{rest}->pq{rest}", conn.ginv, conn.ginv, x)
    return 0.5 * jet.einsum(f"mnpq,pq{rest}->mn{rest}", eps, up)


def raise_index(x: np.ndarray, axis: int, ginv: np.ndarray) -> np.ndarray:
    letters = "abcdefgh"[: x.ndim - 1]
    out = letters[:axis] + "z" + letters[axis + 1:]
    return jet.einsum(f"{letters[axis]}z,{letters}->{out}", ginv, x)


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

def _max(a) -> float:
    return float(np.max(np.abs(jet.value(a)), initial=0.0))


def antisym3(x: np.ndarray) -> np.ndarray:
    """Antisymmetrise the first three axes."""
    total = np.zeros_like(x)
    for p in itertools.permutations(range(3)):
        total = total + jet._perm_sign(p) * np.transpose(x, p + tuple(range(3, x.ndim)))
    return total / 6.0


def metricity_residual(conn: WorldConnection) -> float:
    """``max |nabla_mu g_{lambda sigma}|``."""
    return _max(nabla(conn.g, (DOWN, DOWN), conn.gamma))


def torsion_split_residual(conn: WorldConnection) -> float:
    """``Gamma_[mu nu]^lambda - T_{mu nu}^lambda``."""
    return _max(0.5 * (conn.gamma - np.swapaxes(conn.gamma, 0, 1)) - conn.torsion)


def sym_metricity_residual(conn: WorldConnection) -> float:
    """``nablat_l g_{mu nu} - 2 T_{l (mu nu)}`` with the symmetric connection."""
    dg = nabla(conn.g, (DOWN, DOWN), conn.gamma_sym)
    t = conn.torsion_low
    return _max(dg - (t + np.swapaxes(t, 1, 2)))


def trace_residual(conn: WorldConnection) -> float:
    """``Gamma_mu - d_mu log sqrt(-g)``."""
    return _max(conn.trace - jet.grad(jet.log(jet.sqrt(-conn.det))))


def decomposition_residual(curv: WorldCurvature) -> float:
    """``R - Rt - R^(T) - crossed``."""
    return _max(curv.riemann - curv.riemann_sym - curv.riemann_torsion - curv.crossed)


def cyclic_terms(conn: WorldConnection, curv: WorldCurvature) -> np.ndarray:
    """``R_[mu nu lambda]^s - 2 nabla_[mu T_nu lambda]^s + 4 T_[mu nu^t T_lambda]t^s``."""
    dt = nabla(conn.torsion, (DOWN, DOWN, UP), conn.gamma)
    tt = jet.einsum("mnt,lts->mnls", conn.torsion, conn.torsion)
    return antisym3(curv.riemann) - 2 * antisym3(dt) + 4 * antisym3(tt)


def cyclic_residual(conn, curv) -> float:
    return _max(cyclic_terms(conn, curv))


def bianchi_terms(conn: WorldConnection, curv: WorldCurvature) -> np.ndarray:
    """``nabla_[mu R_nu lambda] s^r - 2 T_[mu nu^t R_lambda] t s^r``."""
    dr = nabla(curv.riemann, (DOWN, DOWN, DOWN, UP), conn.gamma)
    tr = jet.einsum("mnt,ltsr->mnlsr", conn.torsion, curv.riemann)
    return antisym3(dr) - 2 * antisym3(tr)


def bianchi_residual(conn, curv) -> float:
    return _max(bianchi_terms(conn, curv))


def dual_torsion(conn: WorldConnection) -> np.ndarray:
    """``*T_{l mu nu}``: dual over the first (antisymmetric) pair of ``T_{l mu nu}``."""
    return first_dual(conn.torsion_low, conn)


def dual_riemann(conn: WorldConnection, curv: WorldCurvature) -> np.ndarray:
    return first_dual(curv.riemann_low, conn)


def contracted_dual_riemann(conn, curv) -> np.ndarray:
    """``*R^l_{mu l nu}``."""
    d = raise_index(dual_riemann(conn, curv), 0, conn.ginv)
    return np.einsum("lmln...->mn...", d)


def dual_cyclic_terms(conn: WorldConnection, curv: WorldCurvature) -> np.ndarray:
    """``*R^l_{mu nu l} + 2 nabla^l *T_{l mu nu} + 4 *T_mu^{l t} T_{l t nu}``."""
    dr = raise_index(dual_riemann(conn, curv), 0, conn.ginv)
    a = np.einsum("lmnl...->mn...", dr)
    st = dual_torsion(conn)
    dst = nabla(st, (DOWN, DOWN, DOWN), conn.gamma)
    b = jet.einsum("pl,plmn->mn", conn.ginv, dst)
    st_up = raise_index(raise_index(st, 1, conn.ginv), 2, conn.ginv)
    c = jet.einsum("mlt,ltn->mn", st_up, conn.torsion_low)
    return a + 2 * b + 4 * c


def dual_cyclic_residual(conn, curv) -> float:
    return _max(dual_cyclic_terms(conn, curv))


def dual_bianchi_terms(conn: WorldConnection, curv: WorldCurvature) -> np.ndarray:
    """``nabla^r *R_{r mu l s} + 2 *T_mu^{r t} R_{r t l s}``."""
    sr = dual_riemann(conn, curv)
    dsr = nabla(sr, (DOWN,) * 4, conn.gamma)
    a = jet.einsum("pr,prmls->mls", conn.ginv, dsr)
    st_up = raise_index(raise_index(dual_torsion(conn), 1, conn.ginv), 2, conn.ginv)
    b = jet.einsum("mrt,rtls->mls", st_up, curv.riemann_low)
    return a + 2 * b


def dual_bianchi_residual(conn, curv) -> float:
    return _max(dual_bianchi_terms(conn, curv))


def d_operator_residuals(conn: WorldConnection, curv: WorldCurvature, v: np.ndarray,
                         u: np.ndarray, f: np.ndarray) -> dict[str, float]:
    """Commutator checks on a scalar ``f``, a vector ``v^l`` and a covector ``u_l``."""
    df = d_operator(f, (), conn.gamma, conn.torsion)
    dv = d_operator(v, (UP,), conn.gamma, conn.torsion)
    du = d_operator(u, (DOWN,), conn.gamma, conn.torsion)
    rv = jet.einsum("mnsl,s->mnl", curv.riemann, v)
    ru = jet.einsum("mnls,s->mnl", curv.riemann, u)
    return {
        "scalar": _max(df),
        "vector": _max(dv - rv),
        "covector": _max(du + ru),
    }
