"""Connecting objects between world and spinor indices.

The soldering form is built from a Gram-Schmidt tetrad and the flat symbols
``s_a^{AA'} = (1, sigma_1, sigma_2, sigma_3)^T / sqrt(2)`` (transposed in ``AA'``), giving
``S_mu^{AA'} = theta^a_mu s_a^{AA'}`` (scaled by ``1/|gamma|`` in the gamma
formalism).  Array layouts put the world index first, then ``A``, then ``A'``:

* ``down_up[m, A, A']``   ``S_mu^{AA'}``
* ``down_down[m, A, A']`` ``S_{mu AA'}``
* ``up_down[m, A, A']``   ``S^mu_{AA'}``
* ``up_up[m, A, A']``     ``S^{mu AA'}``

The spinor metric ``M`` is ``gamma eps`` or ``eps``; primed slots use its
conjugate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from . import jet
from .errors import NonLorentzianSignature
from .spintensor import EPS, LEVI_CIVITA

GAMMA, EPSILON = "gamma", "epsilon"

PAULI = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)
ETA = np.diag([1.0, -1.0, -1.0, -1.0])
# transposed Pauli matrices fix the orientation so that the volume spinor
# matches sqrt(-g) eps_{mu nu la si} with eps_{0123} = +1
FLAT_SYMBOLS = np.swapaxes(PAULI, 1, 2) / math.sqrt(2.0)


@dataclass(frozen=True)
class Formalism:
    """Gamma formalism (``|gamma|``, ``Phi``) or epsilon formalism (``Upsilon_mu``)."""

    kind: str
    modulus: ex.Expr | None = None
    phase: ex.Expr | None = None
    upsilon: tuple = field(default=())

    @classmethod
    def gamma(cls, modulus="1", phase="0") -> "Formalism":
        m = ex.parse(modulus) if isinstance(modulus, str) else modulus
        p = ex.parse(phase) if isinstance(phase, str) else phase
        return cls(GAMMA, m, p)

    @classmethod
    def epsilon(cls, upsilon=("0", "0", "0", "0")) -> "Formalism":
        ups = tuple(ex.parse(u) if isinstance(u, str) else u for u in upsilon)
        return cls(EPSILON, upsilon=ups)

    @property
    def is_gamma(self) -> bool:
        return self.kind == GAMMA

    def modulus_jet(self, point) -> np.ndarray:
        if not self.is_gamma:
            return jet.const(1.0)
        m = ex.eval_jet_array(self.modulus, point)
        if abs(m[0].imag) > 1e-14 or m[0].real <= 0:
            raise ValueError(f"|gamma| must be real and positive, got {m[0]}")
        return m

    def phase_jet(self, point) -> np.ndarray:
        if not self.is_gamma:
            return jet.const(0.0)
        return ex.eval_jet_array(self.phase, point)

    def gamma_jet(self, point) -> np.ndarray:
        """The complex scalar ``gamma = |gamma| exp(i Phi)`` (1 in the epsilon formalism)."""
        return jet.mul(self.modulus_jet(point), jet.exp(1j * self.phase_jet(point)))

    def upsilon_jet(self, point) -> np.ndarray:
        out = np.zeros((4, jet.NCOEF), dtype=complex)
        if not self.is_gamma:
            for m, e in enumerate(self.upsilon):
                out[m] = ex.eval_jet_array(e, point)
        return out


def metric_spinor(gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(M_AB, M^AB)`` as jets from the scalar jet ``gamma``."""
    lo = EPS[..., None] * gamma
    hi = EPS[..., None] * jet.recip(gamma)
    return lo, hi


def tetrad(g: np.ndarray) -> np.ndarray:
    """Orthonormal legs ``e_a^mu`` from Gram-Schmidt on the coordinate frame.

    The timelike leg comes from ``d_0``; legs 1..3 follow in coordinate order.
    """
    def inner(u, v):
        return jet.einsum("m,n,mn->", u, v, g)

    legs = []
    for k in range(4):
        v = jet.const(np.eye(4)[k])
        for j, e in enumerate(legs):
            v = v - ETA[j, j] * jet.mul(inner(v, e), e)
        norm2 = inner(v, v) * (1.0 if k == 0 else -1.0)
        if norm2[0].real <= 0:
            raise NonLorentzianSignature(f"Gram-Schmidt leg {k} has the wrong causal character")
        legs.append(jet.mul(v, jet.recip(jet.sqrt(norm2))[None, :]))
    return np.array(legs)


@dataclass(frozen=True)
class SolderingForm:
    kind: str
    metric_lo: np.ndarray
    metric_hi: np.ndarray
    down_up: np.ndarray
    down_down: np.ndarray
    up_down: np.ndarray
    up_up: np.ndarray
    tetrad: np.ndarray

    @property
    def conj_lo(self) -> np.ndarray:
        return jet.conj(self.metric_lo)

    @property
    def conj_hi(self) -> np.ndarray:
        return jet.conj(self.metric_hi)

    @property
    def weight_up_down(self) -> tuple[float, float]:
        """Density weights of ``S^mu_{AA'}`` (non-zero only for the epsilon formalism)."""
        return (-0.5, -0.5) if self.kind == EPSILON else (0.0, 0.0)


def build_soldering(g: np.ndarray, ginv: np.ndarray, formalism: Formalism, point) -> SolderingForm:
    """All four members of the soldering family at ``point`` as jets."""
    legs = tetrad(g)
    coframe = jet.einsum("ab,bn,nm->am", jet.const(ETA), legs, g)
    gamma = formalism.gamma_jet(point)
    lo, hi = metric_spinor(gamma)
    scale = jet.recip(formalism.modulus_jet(point))
    down_up = jet.einsum("am,aAB->mAB", coframe, jet.const(FLAT_SYMBOLS))
    down_up = jet.mul(down_up, scale[None, None, None, :])
    lo_bar = jet.conj(lo)
    down_down = jet.einsum("mCD,CA,DB->mAB", down_up, lo, lo_bar)
    up_down = jet.einsum("mn,nAB->mAB", ginv, down_down)
    up_up = jet.einsum("mn,nAB->mAB", ginv, down_up)
    return SolderingForm(formalism.kind, lo, hi, down_up, down_down, up_down, up_up, legs)


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

def _max(a) -> float:
    return float(np.max(np.abs(jet.value(a)), initial=0.0))


def volume_spinor(s: SolderingForm) -> np.ndarray:
    """``i (M_AC M_BD Mb_A'D' Mb_B'C' - c.c.)`` with axes ``A A' B B' C C' D D'``."""
    m = jet.value(s.metric_lo)
    mb = np.conj(m)
    a = np.einsum("ac,bd,AD,BC->aAbBcCdD", m, m, mb, mb)
    return 1j * (a - np.conj(np.einsum("aAbBcCdD->AaBbCcDd", a)))


def verify_soldering_identities(s: SolderingForm, g: np.ndarray, det: np.ndarray) -> dict[str, float]:
    """Residuals of the basic algebraic identities of the soldering family."""
    V = jet.value
    du, dd, ud = V(s.down_up), V(s.down_down), V(s.up_down)
    m, mb = V(s.metric_lo), np.conj(V(s.metric_lo))
    gv = V(g)
    delta = np.eye(2)
    # mixed object S_{mu A'}^A = S_mu^{AB'} Mb_{B'A'}
    mixed = np.einsum("mab,bc->mac", du, mb)  # [mu, A(up), A'(down)]
    # 2 S_{AA'(mu} S_nu)^{BA'}
    anti = np.einsum("maA,nbA->mnab", dd, du)
    anti = anti + np.swapaxes(anti, 0, 1)
    res = {}
    res["anticommutator"] = np.max(np.abs(anti - np.einsum("ab,mn->mnab", delta, gv)))
    # S_{mu A'}^(A S_nu^B)A' = S_{A'[mu}^(A S_nu]^B)A' = S_{A'[mu}^A S_nu]^BA'
    p = np.einsum("maA,nbA->mnab", mixed, du)
    sym_ab = 0.5 * (p + np.swapaxes(p, 2, 3))
    skew_mn = 0.5 * (sym_ab - np.swapaxes(sym_ab, 0, 1))
    skew_only = 0.5 * (p - np.swapaxes(p, 0, 1))
    res["symmetric_pair"] = max(np.max(np.abs(sym_ab - skew_mn)), np.max(np.abs(sym_ab - skew_only)))
    # S_{AA'mu} S_nu^{AA'} symmetric in mu nu
    q = np.einsum("maA,naA->mn", dd, du)
    res["symmetric_contraction"] = np.max(np.abs(q - 0.5 * (q + q.T)))
    res["metric_from_soldering"] = np.max(np.abs(
        np.einsum("maA,nbB,ab,AB->mn", du, du, m, mb) - gv))
    res["spinor_metric_from_world"] = np.max(np.abs(
        np.einsum("maA,nbB,mn->aAbB", ud, ud, gv) - np.einsum("ab,AB->aAbB", m, mb)))
    res["hermitian"] = max(np.max(np.abs(x - np.conj(np.swapaxes(x, 1, 2)))) for x in (du, dd, ud))
    vol = math.sqrt(-V(det).real) * LEVI_CIVITA
    e_world = np.einsum("maA,nbB,lcC,sdD,mnls->aAbBcCdD", ud, ud, ud, ud, vol)
    res["volume_spinor"] = np.max(np.abs(e_world - volume_spinor(s)))
    return {k: float(v) for k, v in res.items()}
