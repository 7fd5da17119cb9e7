"""Adapted connections built from the Levi-Civita connection or a base connection.

Every connection is stored through its coefficients ``gamma[k, i, j]``
(``nabla_{d_i} d_j = gamma^k_ij d_k``). Most constructions add a potential
``S`` to a base; the building blocks are

* ``P1[k, i, j] = ((nabla_{d_i} J) J d_j)^k``
* ``P2[k, i, j] = ((nabla_{J d_i} J) d_j)^k``

and their transposes in the two lower slots. Laws stated as (0,3) data
``g(nabla_X Y, Z)`` are converted to coefficients by raising the Z slot.

Batched ``*_field`` functions work over a :class:`FrameBatch`; the point
functions wrap them for a single :class:`PointFrame`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .structure import FrameBatch, PointFrame, nijenhuis_field, second_nijenhuis_field
from .tensor import TensorValue

__all__ = [
    "KINDS",
    "NAMED_KINDS",
    "ConnectionBuildError",
    "WrongSignatureError",
    "SkewNonexistenceError",
    "NonTorsionFreeBaseError",
    "ConnectionField",
    "ConnectionAtPoint",
    "connection_field",
    "build_connection",
    "torsion_field",
    "potential_field",
    "nabla_j_field",
    "nabla_g_field",
    "naturality_field",
    "f_tensor_field",
    "skew_existence_field",
    "bismut_b_field",
    "chern_explicit_field",
    "decompose_kq_field",
    "lower_first",
    "torsion",
    "potential",
    "naturality_residuals",
    "f_tensor",
    "skew_existence_residual",
    "bismut_B",
    "decompose_KQ",
    "BASE_TORSION_TOL",
]

KINDS = (
    "levi_civita", "first_canonical", "kobayashi_nomizu", "yano", "chern", "well_adapted",
    "bismut", "skew", "canonical", "base0", "base1", "base_yano",
)
NAMED_KINDS = KINDS[:8]
BASE_TORSION_TOL = 1e-10


class ConnectionBuildError(ValueError):
    """A connection cannot be constructed for this frame."""


class WrongSignatureError(ConnectionBuildError):
    """The connection is only defined for alpha * epsilon = -1."""


class SkewNonexistenceError(ConnectionBuildError):
    def __init__(self, residual: float, tol: float):
        super().__init__(f"no natural connection with totally skew torsion: "
                         f"existence residual {residual:.6g} >= tol {tol:g}")
        self.residual = residual


class NonTorsionFreeBaseError(ConnectionBuildError):
    def __init__(self, residual: float):
        super().__init__(f"base connection is not torsion-free (max |T| = {residual:.6g})")
        self.residual = residual


@dataclass(frozen=True, eq=False)
class ConnectionField:
    kind: str
    gamma: np.ndarray
    frames: FrameBatch
    s: float | None = None

    @property
    def label(self) -> str:
        return f"canonical(s={self.s:g})" if self.kind == "canonical" else self.kind

    def at(self, i: int) -> "ConnectionAtPoint":
        return ConnectionAtPoint(self.kind, self.gamma[i], self.frames.frame(i), self.s)


@dataclass(frozen=True, eq=False)
class ConnectionAtPoint:
    kind: str
    gamma: np.ndarray
    frame: PointFrame
    s: float | None = None

    @property
    def label(self) -> str:
        return f"canonical(s={self.s:g})" if self.kind == "canonical" else self.kind

    def as_field(self) -> ConnectionField:
        return ConnectionField(self.kind, self.gamma[None], self.frame.as_batch(), self.s)


# ------------------------------------------------------------------ helpers

def _swap(a: np.ndarray) -> np.ndarray:
    """Exchange the two lower slots of ``[p, k, i, j]``."""
    return a.transpose(0, 1, 3, 2)


def _blocks(D: np.ndarray, J: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p1 = np.einsum("pkim,pmj->pkij", D, J)
    p2 = np.einsum("pkmj,pmi->pkij", D, J)
    return p1, p2


def lower_first(g: np.ndarray, a: np.ndarray) -> np.ndarray:
    """``low[i, j, l] = g_lk a^k_ij`` for a batched (1,2) tensor."""
    return np.einsum("plk,pkij->pijl", g, a)


def _raise_law(g_inv: np.ndarray, low: np.ndarray) -> np.ndarray:
    """Coefficients ``Q^k_ij`` from a law ``low[i, j, l] = g(Q(d_i, d_j), d_l)``."""
    return np.einsum("pkl,pijl->pkij", g_inv, low)


def _x_slot_law(g: np.ndarray, a: np.ndarray) -> np.ndarray:
    """``low[i, j, l] = g(a(d_j, d_l), d_i)``."""
    return np.einsum("pki,pkjl->pijl", g, a)


def _first_canonical_potential(fb: FrameBatch) -> np.ndarray:
    p1, _ = _blocks(fb.nabla_g_J, fb.J)
    return -0.5 * fb.alpha * p1


def _canonical_potential(fb: FrameBatch, s: float) -> np.ndarray:
    if fb.ae == -1:
        tensor, coef = second_nijenhuis_field(fb), fb.alpha * s / 12.0
    else:
        tensor, coef = nijenhuis_field(fb), fb.alpha * s / 8.0
    return _first_canonical_potential(fb) + coef * _raise_law(fb.g_inv, _x_slot_law(fb.g, tensor))


def skew_existence_field(fb: FrameBatch) -> np.ndarray:
    """Per-point max |(D_X J)JY + (D_JX J)Y + (D_Y J)JX + (D_JY J)X| over basis X, Y."""
    combo = kernels.nabla_j_combination(fb.nabla_g_J, fb.J, 1.0, 1.0, 1.0)
    return np.max(np.abs(combo), axis=(1, 2, 3))


def _skew_potential(fb: FrameBatch, tol: float) -> np.ndarray:
    residual = float(np.max(skew_existence_field(fb)))
    if not residual < tol:
        raise SkewNonexistenceError(residual, tol)
    p1, p2 = _blocks(fb.nabla_g_J, fb.J)
    a = fb.alpha
    if fb.ae == -1:
        # g(Q(X,Y),Z) = (-a/2)(g((D_Y J)JZ, X) + g((D_JZ J)Y, X))
        low = -0.5 * a * _x_slot_law(fb.g, p1 + _swap(p2))
        return -0.5 * a * p1 + _raise_law(fb.g_inv, low)
    return -0.5 * a * p1 + 0.25 * a * (_swap(p1) - _swap(p2))


def _require_negative_signature(fb: FrameBatch, kind: str) -> None:
    if fb.ae != -1:
        name = kind.capitalize()
        raise WrongSignatureError(f"{name} connection undefined for alpha*epsilon=+1")


def _base_gamma(fb: FrameBatch, base, kind: str) -> np.ndarray:
    if base is None:
        raise ConnectionBuildError(f"kind {kind} needs base connection coefficients")
    b = np.asarray(base, dtype=float)
    P, n = len(fb), fb.dimension
    if b.shape == (n, n, n):
        b = np.broadcast_to(b, (P, n, n, n))
    if b.shape != (P, n, n, n):
        raise ConnectionBuildError(f"base coefficients must have shape {(n, n, n)} or {(P, n, n, n)}")
    if kind in ("base1", "base_yano"):
        residual = float(np.max(np.abs(b - _swap(b)), initial=0.0))
        if residual >= BASE_TORSION_TOL:
            raise NonTorsionFreeBaseError(residual)
    return np.ascontiguousarray(b)


# ------------------------------------------------------------------ construction

def connection_field(frames: FrameBatch, kind: str, s: float | None = None, base=None,
                     tol: float = 1e-8) -> ConnectionField:
    """Coefficients of connection ``kind`` at every frame of the batch."""
    if kind not in KINDS:
        raise ValueError(f"unknown connection kind {kind!r}")
    if s is not None and kind != "canonical":
        raise ValueError("the parameter s is only valid with kind 'canonical'")
    fb, a = frames, frames.alpha
    lc = fb.gamma_g

    if kind in ("base0", "base1", "base_yano"):
        b = _base_gamma(fb, base, kind)
        p1, p2 = _blocks(kernels.covariant_derivative_j(b, fb.J, fb.dJ), fb.J)
        if kind == "base0":
            pot = -0.5 * a * p1
        elif kind == "base1":
            pot = -0.5 * a * p1 - 0.25 * a * (_swap(p1) - _swap(p2))
        else:
            pot = -0.5 * a * _swap(p1) - 0.25 * a * (p1 - p2)
        return ConnectionField(kind, b + pot, fb)

    if kind == "levi_civita":
        return ConnectionField(kind, lc.copy(), fb)
    if kind == "first_canonical":
        return ConnectionField(kind, lc + _first_canonical_potential(fb), fb)
    if kind in ("kobayashi_nomizu", "yano"):
        p1, p2 = _blocks(fb.nabla_g_J, fb.J)
        if kind == "kobayashi_nomizu":
            pot = -0.5 * a * p1 - 0.25 * a * (_swap(p1) - _swap(p2))
        else:
            pot = -0.5 * a * _swap(p1) - 0.25 * a * (p1 - p2)
        return ConnectionField(kind, lc + pot, fb)
    if kind == "canonical":
        if s is None:
            raise ValueError("kind 'canonical' needs the parameter s")
        return ConnectionField(kind, lc + _canonical_potential(fb, float(s)), fb, float(s))
    if kind in ("chern", "bismut"):
        _require_negative_signature(fb, kind)
        return ConnectionField(kind, lc + _canonical_potential(fb, 3.0 if kind == "chern" else -3.0), fb)
    if kind == "well_adapted":
        return ConnectionField(kind, lc + _canonical_potential(fb, 1.0), fb)
    # skew
    return ConnectionField(kind, lc + _skew_potential(fb, tol), fb)


def build_connection(frame: PointFrame, kind: str, s: float | None = None, base=None,
                     tol: float = 1e-8) -> ConnectionAtPoint:
    b = None if base is None else np.asarray(base, dtype=float)[None]
    return connection_field(frame.as_batch(), kind, s=s, base=b, tol=tol).at(0)


def chern_explicit_field(fb: FrameBatch) -> np.ndarray:
    """Chern coefficients from the explicit nabla^g J formula (alpha*epsilon = -1).

    ``g(nabla_X Y, Z) = g(nabla0_X Y, Z) - (alpha/4) g((D_Z J)JY - (D_Y J)JZ - (D_JZ J)Y + (D_JY J)Z, X)``
    """
    _require_negative_signature(fb, "chern")
    p1, p2 = _blocks(fb.nabla_g_J, fb.J)
    w = _swap(p1) - p1 - _swap(p2) + p2            # w[k, j, l] with Y = d_j, Z = d_l
    low = -0.25 * fb.alpha * _x_slot_law(fb.g, w)
    return fb.gamma_g + _first_canonical_potential(fb) + _raise_law(fb.g_inv, low)


# ------------------------------------------------------------------ derived quantities (batched)

def torsion_field(conn: ConnectionField) -> np.ndarray:
    return conn.gamma - _swap(conn.gamma)


def potential_field(conn: ConnectionField) -> np.ndarray:
    return conn.gamma - conn.frames.gamma_g


def nabla_j_field(conn: ConnectionField) -> np.ndarray:
    fb = conn.frames
    return kernels.covariant_derivative_j(conn.gamma, fb.J, fb.dJ)


def nabla_g_field(conn: ConnectionField) -> np.ndarray:
    fb = conn.frames
    return kernels.covariant_derivative_g(conn.gamma, fb.g, fb.dg)


def naturality_field(conn: ConnectionField) -> tuple[np.ndarray, np.ndarray]:
    """Per-point (max |nabla J|, max |nabla g|)."""
    return (np.max(np.abs(nabla_j_field(conn)), axis=(1, 2, 3)),
            np.max(np.abs(nabla_g_field(conn)), axis=(1, 2, 3)))


def f_tensor_field(conn: ConnectionField) -> np.ndarray:
    """``F[i, j, l] = T(X,Y,Z) - T(Z,Y,X) + eps (T(JX,Y,JZ) - T(JZ,Y,JX))`` with ``T(X,Y,Z) = g(T(X,Y),Z)``."""
    fb = conn.frames
    tl = lower_first(fb.g, torsion_field(conn))
    jj = np.einsum("pai,pbl,pajb->pijl", fb.J, fb.J, tl)
    return tl - tl.transpose(0, 3, 2, 1) + fb.epsilon * (jj - jj.transpose(0, 3, 2, 1))


def bismut_b_field(fb: FrameBatch) -> np.ndarray:
    """``g(T^b(X,Y) + (alpha/4) N(X,Y), Z)`` for the Bismut connection."""
    _require_negative_signature(fb, "bismut")
    tb = torsion_field(connection_field(fb, "bismut"))
    return lower_first(fb.g, tb + 0.25 * fb.alpha * nijenhuis_field(fb))


def decompose_kq_field(S: np.ndarray, fb: FrameBatch) -> tuple[np.ndarray, np.ndarray]:
    """``K = (S - alpha J S(X,JY))/2``, ``Q = (S + alpha J S(X,JY))/2``."""
    js = np.einsum("pkm,pmia,paj->pkij", fb.J, S, fb.J)
    return 0.5 * (S - fb.alpha * js), 0.5 * (S + fb.alpha * js)


# ------------------------------------------------------------------ point API

def torsion(conn: ConnectionAtPoint) -> TensorValue:
    return TensorValue("ull", torsion_field(conn.as_field())[0])


def potential(conn: ConnectionAtPoint) -> TensorValue:
    """Potential tensor ``S = Gamma - Gamma^g``."""
    return TensorValue("ull", potential_field(conn.as_field())[0])


def naturality_residuals(conn: ConnectionAtPoint) -> tuple[float, float]:
    rj, rg = naturality_field(conn.as_field())
    return float(rj[0]), float(rg[0])


def f_tensor(conn: ConnectionAtPoint) -> TensorValue:
    return TensorValue("lll", f_tensor_field(conn.as_field())[0])


def skew_existence_residual(frame: PointFrame) -> float:
    return float(skew_existence_field(frame.as_batch())[0])


def bismut_B(frame: PointFrame) -> TensorValue:
    return TensorValue("lll", bismut_b_field(frame.as_batch())[0])


def decompose_KQ(S: TensorValue, frame: PointFrame) -> tuple[TensorValue, TensorValue]:
    if S.valence != "ull":
        raise ValueError(f"decompose_KQ expects a (1,2) tensor with valence 'ull', got {S.valence!r}")
    k, q = decompose_kq_field(S.data[None], frame.as_batch())
    return TensorValue("ull", k[0]), TensorValue("ull", q[0])
