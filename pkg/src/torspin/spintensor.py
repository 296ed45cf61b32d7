"""Indexed complex arrays tagged with world/spinor slot metadata.

A ``SpinTensor`` holds a dense complex array whose leading axes correspond to
the slots of its ``IndexSignature``.  An optional trailing jet axis (length
``jet.NCOEF``) is carried along untouched by the algebra here, which is linear
in the components.

Spinor index conventions:

* ``EPS`` is both eps_AB and eps^AB, ``[[0, 1], [-1, 0]]``.
* Raising contracts the second metric slot, ``xi^A = M^AB xi_B``; lowering
  contracts the first, ``xi_B = xi^A M_AB``.  With these rules
  ``eps^AC eps_BC = delta_B^A``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import jet
from .errors import IncompatibleSlots, InsufficientSamples, NotAntisymmetric

WORLD, UNPRIMED, PRIMED = "world", "unprimed", "primed"
DIM = {WORLD: 4, UNPRIMED: 2, PRIMED: 2}

EPS = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)


def _levi_civita4() -> np.ndarray:
    e = np.zeros((4, 4, 4, 4))
    for p in itertools.permutations(range(4)):
        e[p] = jet._perm_sign(p)
    return e


LEVI_CIVITA = _levi_civita4()  # numeric symbol with [0,1,2,3] = +1


@dataclass(frozen=True)
class Slot:
    kind: str
    up: bool

    def __str__(self):
        mark = {WORLD: "w", UNPRIMED: "A", PRIMED: "A'"}[self.kind]
        return ("^" if self.up else "_") + mark


@dataclass(frozen=True)
class IndexSignature:
    """Ordered slots plus spin-density weights ``(w, wbar)`` and a world weight.

    Weights are half-integers in general (the epsilon-formalism soldering
    objects carry ``(-1/2, -1/2)``), so they are stored as floats.
    """

    slots: tuple[Slot, ...]
    weight: tuple[float, float] = (0.0, 0.0)
    world_weight: int = 0

    @classmethod
    def parse(cls, text: str, weight=(0.0, 0.0), world_weight: int = 0) -> "IndexSignature":
        """Build from a compact string such as ``"_w ^w _A ^A'"``."""
        slots = []
        for tok in text.split():
            up = tok[0] == "^"
            mark = tok[1:]
            kind = {"w": WORLD, "A": UNPRIMED, "A'": PRIMED}[mark]
            slots.append(Slot(kind, up))
        return cls(tuple(slots), tuple(float(x) for x in weight), world_weight)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(DIM[s.kind] for s in self.slots)

    def __str__(self):
        return " ".join(str(s) for s in self.slots)


@dataclass(frozen=True)
class SpinTensor:
    signature: IndexSignature
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        shape = self.signature.shape
        if data.shape not in (shape, shape + (jet.NCOEF,)):
            raise ValueError(f"components of shape {data.shape} do not fit {shape}")
        object.__setattr__(self, "data", data)

    @property
    def is_jet(self) -> bool:
        return self.data.ndim == len(self.signature.slots) + 1

    @property
    def values(self) -> np.ndarray:
        return jet.value(self.data) if self.is_jet else self.data

    def __add__(self, other: "SpinTensor") -> "SpinTensor":
        if other.signature != self.signature:
            raise IncompatibleSlots(f"cannot add {other.signature} to {self.signature}")
        return SpinTensor(self.signature, self.data + other.data)

    def __sub__(self, other: "SpinTensor") -> "SpinTensor":
        return self + other.scale(-1)

    def scale(self, c) -> "SpinTensor":
        return SpinTensor(self.signature, c * self.data)


def delta(kind: str) -> SpinTensor:
    """Kronecker delta with one lower and one upper slot of ``kind``."""
    return SpinTensor(IndexSignature((Slot(kind, False), Slot(kind, True))), np.eye(DIM[kind]))


def _letters(n: int) -> str:
    return "abcdefghijklmnopqrstuvwxy"[:n]


def contract(t: SpinTensor, a: int, b: int) -> SpinTensor:
    """Trace over one up and one down slot of the same kind."""
    sa, sb = t.signature.slots[a], t.signature.slots[b]
    if a == b or sa.kind != sb.kind or sa.up == sb.up:
        raise IncompatibleSlots(f"cannot contract {sa} with {sb}")
    n = len(t.signature.slots)
    idx = list(_letters(n))
    idx[b] = idx[a]
    out = "".join(c for k, c in enumerate(_letters(n)) if k not in (a, b))
    data = np.einsum("".join(idx) + "...->" + out + "...", t.data)
    slots = tuple(s for k, s in enumerate(t.signature.slots) if k not in (a, b))
    return SpinTensor(replace(t.signature, slots=slots), data)


def _check_same(t: SpinTensor, slots: Sequence[int]):
    first = t.signature.slots[slots[0]]
    for k in slots[1:]:
        if t.signature.slots[k] != first:
            raise IncompatibleSlots("symmetrised slots must share kind and variance")


def _permute_average(t: SpinTensor, slots: Sequence[int], signed: bool) -> SpinTensor:
    _check_same(t, slots)
    n = t.data.ndim
    total = np.zeros_like(t.data)
    perms = list(itertools.permutations(range(len(slots))))
    for p in perms:
        axes = list(range(n))
        for k, pk in zip(slots, p):
            axes[k] = slots[pk]
        sign = jet._perm_sign(p) if signed else 1
        total = total + sign * np.transpose(t.data, axes)
    return SpinTensor(t.signature, total / len(perms))


def sym(t: SpinTensor, *slots: int) -> SpinTensor:
    """Symmetric projection over the listed slots."""
    return _permute_average(t, slots, signed=False)


def antisym(t: SpinTensor, *slots: int) -> SpinTensor:
    """Antisymmetric projection over the listed slots."""
    return _permute_average(t, slots, signed=True)


@dataclass(frozen=True)
class GammaSpinor:
    """The gamma-formalism metric spinor ``gamma_AB = gamma eps_AB``."""

    gamma: complex

    @classmethod
    def polar(cls, modulus: float, phase: float) -> "GammaSpinor":
        if modulus <= 0:
            raise ValueError("|gamma| must be positive")
        return cls(modulus * np.exp(1j * phase))

    @property
    def lower(self) -> np.ndarray:
        return self.gamma * EPS

    @property
    def upper(self) -> np.ndarray:
        return EPS / self.gamma


@dataclass(frozen=True)
class WorldMetric:
    g: np.ndarray
    ginv: np.ndarray


def _apply(t: SpinTensor, k: int, mat: np.ndarray, first: bool) -> np.ndarray:
    """Contract slot ``k`` with the first (``first=True``) or second slot of ``mat``."""
    src = _letters(len(t.signature.slots))
    new = "z"
    m = (src[k] + new) if first else (new + src[k])
    out = src[:k] + new + src[k + 1:]
    return np.einsum(f"{src}...,{m}->{out}...", t.data, mat)


def raise_lower(t: SpinTensor, slot: int, metric) -> SpinTensor:
    """Flip the variance of one slot.

    ``metric`` is ``"eps"``, a ``GammaSpinor`` or a ``WorldMetric``; the slot
    kind must match (spinor metrics act on both unprimed and primed slots,
    primed ones through the complex conjugate).
    """
    s = t.signature.slots[slot]
    if isinstance(metric, WorldMetric):
        if s.kind != WORLD:
            raise IncompatibleSlots("world metric on a spinor slot")
        mat = metric.ginv if not s.up else metric.g
        data = _apply(t, slot, mat, first=True)
        dw = (0.0, 0.0)
    else:
        if s.kind == WORLD:
            raise IncompatibleSlots("spinor metric on a world slot")
        if isinstance(metric, GammaSpinor):
            lo, hi = metric.lower, metric.upper
            dw = (0.0, 0.0)
        elif metric == "eps":
            lo, hi = EPS, EPS
            dw = (-1.0, 0.0) if s.up else (1.0, 0.0)
        else:
            raise IncompatibleSlots(f"unknown metric {metric!r}")
        if s.kind == PRIMED:
            lo, hi = np.conj(lo), np.conj(hi)
            dw = dw[::-1]
        # raise: xi^A = M^AB xi_B (second slot); lower: xi_B = xi^A M_AB (first slot)
        data = _apply(t, slot, lo, first=True) if s.up else _apply(t, slot, hi, first=False)
    slots = list(t.signature.slots)
    slots[slot] = Slot(s.kind, not s.up)
    w = t.signature.weight
    sig = replace(t.signature, slots=tuple(slots), weight=(w[0] + dw[0], w[1] + dw[1]))
    return SpinTensor(sig, data)


def world_dual(t: SpinTensor, a: int, b: int, metric: WorldMetric) -> SpinTensor:
    """Dual on the world slot pair ``(a, b)`` using ``sqrt(-g) eps_{mu nu la si}``.

    ``*X_{mu nu} = 1/2 sqrt(-g) eps_{mu nu al be} X^{al be}`` with
    ``eps_{0123} = +1``.  Upper pairs are lowered, dualised and raised back.
    Works on point values; a jet axis is dropped.
    """
    if t.is_jet:
        t = SpinTensor(t.signature, t.values)
    sa, sb = t.signature.slots[a], t.signature.slots[b]
    if b != a + 1 or sa.kind != WORLD or sb.kind != WORLD or sa.up != sb.up:
        raise IncompatibleSlots("dual needs two adjacent world slots of equal variance")
    vals = t.values
    skew = vals + np.swapaxes(vals, a, b)
    if np.max(np.abs(skew), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(vals), initial=0.0)):
        raise NotAntisymmetric("slot pair is not antisymmetric")
    if sa.up:
        lowered = raise_lower(raise_lower(t, a, metric), b, metric)
        d = world_dual(lowered, a, b, metric)
        return raise_lower(raise_lower(d, a, metric), b, metric)
    up = raise_lower(raise_lower(t, a, metric), b, metric)
    vol = math.sqrt(-np.linalg.det(metric.g).real)
    n = t.data.ndim
    src = _letters(n)
    out = src[:a] + "yz" + src[b + 1:]
    data = 0.5 * vol * np.einsum(f"yz{src[a]}{src[b]},{src}->{out}", LEVI_CIVITA, up.data)
    return SpinTensor(t.signature, data)


def is_hermitian(t: SpinTensor, a: int, b: int, tol: float = 1e-12) -> bool:
    """Whether swapping an unprimed/primed slot pair and conjugating is the identity."""
    sa, sb = t.signature.slots[a], t.signature.slots[b]
    if {sa.kind, sb.kind} != {UNPRIMED, PRIMED} or sa.up != sb.up:
        raise IncompatibleSlots("Hermiticity pairs an unprimed and a primed slot on one stair")
    vals = t.values
    return bool(np.max(np.abs(np.conj(np.swapaxes(vals, a, b)) - vals)) <= tol)


# ---------------------------------------------------------------------------
# numerical rank
# ---------------------------------------------------------------------------

RANK_THRESHOLD = 1e-8
MIN_GAP = 1e4


@dataclass(frozen=True)
class RankResult:
    rank: int
    gap: float
    samples: int
    singular_values: np.ndarray = field(repr=False)

    @property
    def clean(self) -> bool:
        return self.gap >= MIN_GAP


def real_rows(arrays) -> np.ndarray:
    """Stack flattened real and imaginary parts of each array as matrix rows."""
    rows = []
    for a in arrays:
        a = np.asarray(a).ravel()
        rows.append(np.concatenate([a.real, a.imag]))
    return np.array(rows)


def numerical_rank(matrix: np.ndarray, threshold: float = RANK_THRESHOLD) -> RankResult:
    s = np.linalg.svd(matrix, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return RankResult(0, math.inf, matrix.shape[0], s)
    r = int(np.sum(s > threshold * s[0]))
    below = s[r] if r < s.size else 0.0
    gap = math.inf if below == 0 else s[r - 1] / below if r else s[0] / below
    return RankResult(r, gap, matrix.shape[0], s)


def rank_count(sampler: Callable[[np.random.Generator], np.ndarray], samples: int,
               bound: int, seed: int = 0) -> RankResult:
    """Dimension of the real span of ``sampler`` outputs over random draws.

    ``bound`` is an a priori upper bound on the dimension; at least twice that
    many samples are required, and a rank reaching the sample count is
    rejected as undetermined.
    """
    if samples < 2 * bound:
        raise InsufficientSamples(f"{samples} samples for a bound of {bound}")
    rng = np.random.default_rng(seed)
    result = numerical_rank(real_rows(sampler(rng) for _ in range(samples)))
    if result.rank >= samples:
        raise InsufficientSamples(f"rank saturated the {samples} samples")
    return result
