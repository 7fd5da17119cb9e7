"""Dense point-local tensors with a declared slot pattern.

A valence is a string over ``{"u", "l"}``: one character per slot, ``u`` for a
contravariant (upper) index and ``l`` for a covariant (lower) one. Data axes
follow the valence order, so a (1,2) tensor ``A^k_ij`` has valence ``"ull"``
and ``data[k, i, j]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

__all__ = [
    "TensorValue",
    "ValenceError",
    "SingularMetricError",
    "contract",
    "lower_index",
    "raise_index",
    "antisymmetry_residual",
    "DEFAULT_TOL",
    "SINGULAR_DET",
]

DEFAULT_TOL = 1e-8
SINGULAR_DET = 1e-12


class ValenceError(ValueError):
    """Slot pattern does not fit the requested operation."""


class SingularMetricError(ValueError):
    """Metric determinant is too small to raise or lower indices."""


@dataclass(frozen=True, eq=False)
class TensorValue:
    valence: str
    data: np.ndarray

    def __post_init__(self):
        if any(c not in "ul" for c in self.valence):
            raise ValenceError(f"valence must use only 'u' and 'l', got {self.valence!r}")
        data = np.array(self.data, dtype=float)
        if data.ndim != len(self.valence):
            raise ValenceError(f"data has {data.ndim} axes, valence {self.valence!r} has {len(self.valence)}")
        if data.ndim and len(set(data.shape)) != 1:
            raise ValenceError(f"all slots must share one dimension, got shape {data.shape}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def rank(self) -> int:
        return len(self.valence)

    @property
    def dim(self) -> int:
        return self.data.shape[0] if self.rank else 0

    def __getitem__(self, index):
        if not isinstance(index, tuple):
            index = (index,)
        if len(index) != self.rank:
            raise ValenceError(f"tensor has {self.rank} slots, got {len(index)} indices")
        return self.data[index]

    def scalar(self) -> float:
        if self.rank:
            raise ValenceError("not a scalar")
        return float(self.data)

    def allclose(self, other: "TensorValue", tol: float = DEFAULT_TOL) -> bool:
        return self.valence == other.valence and bool(np.max(np.abs(self.data - other.data), initial=0.0) < tol)


def contract(t: TensorValue, slot_a: int, slot_b: int) -> TensorValue:
    """Trace over one upper and one lower slot."""
    if slot_a == slot_b:
        raise ValenceError("contraction slots must be distinct")
    for s in (slot_a, slot_b):
        if not 0 <= s < t.rank:
            raise ValenceError(f"slot {s} out of range for rank {t.rank}")
    if {t.valence[slot_a], t.valence[slot_b]} != {"u", "l"}:
        raise ValenceError(f"cannot contract slots {slot_a},{slot_b} of valence {t.valence!r}")
    data = np.trace(t.data, axis1=slot_a, axis2=slot_b)
    valence = "".join(c for i, c in enumerate(t.valence) if i not in (slot_a, slot_b))
    return TensorValue(valence, data)


def _check_metric(m: TensorValue, expected: str) -> None:
    if m.valence != expected:
        raise ValenceError(f"metric argument must have valence {expected!r}, got {m.valence!r}")
    if abs(np.linalg.det(m.data)) < SINGULAR_DET:
        raise SingularMetricError(f"singular metric (|det| < {SINGULAR_DET:g})")


def _apply_on_slot(matrix: np.ndarray, data: np.ndarray, slot: int) -> np.ndarray:
    # new[..., a, ...] = matrix[a, m] data[..., m, ...]
    return np.moveaxis(np.tensordot(matrix, data, axes=([1], [slot])), 0, slot)


def lower_index(t: TensorValue, slot: int, g: TensorValue) -> TensorValue:
    """Lower an upper slot with the metric ``g`` (valence ``"ll"``)."""
    if t.valence[slot] != "u":
        raise ValenceError(f"slot {slot} of {t.valence!r} is not upper")
    _check_metric(g, "ll")
    valence = t.valence[:slot] + "l" + t.valence[slot + 1:]
    return TensorValue(valence, _apply_on_slot(g.data, t.data, slot))


def raise_index(t: TensorValue, slot: int, g_inv: TensorValue) -> TensorValue:
    """Raise a lower slot with the inverse metric ``g_inv`` (valence ``"uu"``)."""
    if t.valence[slot] != "l":
        raise ValenceError(f"slot {slot} of {t.valence!r} is not lower")
    _check_metric(g_inv, "uu")
    valence = t.valence[:slot] + "u" + t.valence[slot + 1:]
    return TensorValue(valence, _apply_on_slot(g_inv.data, t.data, slot))


def _perm_sign(perm) -> int:
    sign, seen = 1, list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def antisymmetry_residual(t: TensorValue) -> float:
    """Largest deviation of a (0,3) tensor from total skew-symmetry."""
    if t.valence != "lll":
        raise ValenceError(f"antisymmetry residual needs valence 'lll', got {t.valence!r}")
    worst = 0.0
    for perm in permutations(range(3)):
        diff = np.transpose(t.data, perm) - _perm_sign(perm) * t.data
        worst = max(worst, float(np.max(np.abs(diff), initial=0.0)))
    return worst
