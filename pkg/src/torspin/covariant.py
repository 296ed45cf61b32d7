"""Covariant differentiation of jet-valued world-spin tensor densities.

Fields are raw jet arrays whose leading axes follow a tuple of ``Slot``
objects.  Connection conventions, with the derivative index first:

* world up ``+Gamma_{mu sigma}^lambda X^sigma``, world down
  ``-Gamma_{mu lambda}^sigma X_sigma``;
* unprimed up ``+theta_{mu B}^A X^B``, unprimed down ``-theta_{mu A}^B X_B``;
  primed slots use the complex conjugate of ``theta``;
* a density of weights ``(w, wbar)`` picks up
  ``-(w theta_mu + wbar conj(theta_mu)) X`` with ``theta_mu = theta_{mu A}^A``.
"""

from __future__ import annotations

import numpy as np

from . import jet
from .spintensor import UNPRIMED, WORLD, Slot

_LET = "abcdefghijk"


def nabla(x: np.ndarray, slots: tuple[Slot, ...], gamma: np.ndarray,
          theta: np.ndarray | None = None, weight=(0.0, 0.0)) -> np.ndarray:
    """Covariant derivative; the new lower world axis is placed first.

    ``gamma`` is ``Gamma_{mu sigma}^lambda`` with shape ``(4, 4, 4, NCOEF)``
    and ``theta`` is ``theta_{mu A}^B`` with shape ``(4, 2, 2, NCOEF)``.
    """
    out = jet.grad(x)
    src = _LET[: len(slots)]
    for k, s in enumerate(slots):
        dst = src[:k] + "z" + src[k + 1:]
        if s.kind == WORLD:
            conn = gamma
        elif theta is None:
            raise ValueError("spinor slots need a spin affinity")
        else:
            conn = theta if s.kind == UNPRIMED else jet.conj(theta)
        if s.up:
            # + C_{mu s}^{z} X^{...s...}
            term = jet.einsum(f"m{src[k]}z,{src}->m{dst}", conn, x)
        else:
            # - C_{mu z}^{s} X_{...s...}
            term = -jet.einsum(f"mz{src[k]},{src}->m{dst}", conn, x)
        out = out + term
    w, wbar = weight
    if (w or wbar) and theta is not None:
        tr = jet.einsum("maa->m", theta)
        dens = w * tr + wbar * jet.conj(tr)
        out = out - jet.einsum(f"m,{src}->m{src}", dens, x)
    return out


def nabla2(x: np.ndarray, slots: tuple[Slot, ...], gamma, theta=None, weight=(0.0, 0.0)):
    """Second covariant derivative ``nabla_mu nabla_nu X`` (axes ``mu, nu`` first)."""
    first = nabla(x, slots, gamma, theta, weight)
    return nabla(first, (Slot(WORLD, False),) + tuple(slots), gamma, theta, weight)


def d_operator(x: np.ndarray, slots: tuple[Slot, ...], gamma, torsion_up,
               theta=None, weight=(0.0, 0.0)) -> np.ndarray:
    """``D_{mu nu} X = 2 nabla_[mu nabla_nu] X + 2 T_{mu nu}^lambda nabla_lambda X``.

    ``torsion_up`` is ``T_{mu nu}^lambda`` as a jet array.
    """
    first = nabla(x, slots, gamma, theta, weight)
    second = nabla(first, (Slot(WORLD, False),) + tuple(slots), gamma, theta, weight)
    comm = second - np.swapaxes(second, 0, 1)
    src = _LET[: len(slots)]
    tors = 2.0 * jet.einsum(f"mnl,l{src}->mn{src}", torsion_up, first)
    return comm + tors

