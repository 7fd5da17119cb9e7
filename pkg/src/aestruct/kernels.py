"""Batched component kernels.

Every kernel takes arrays with a leading batch axis of sample points. Index
layout (after the batch axis):

* ``gamma[k, i, j]``  connection coefficients, ``nabla_{d_i} d_j = gamma^k_ij d_k``
* ``dg[a, i, j]``     partial ``d_a g_ij``
* ``J[k, j]``         ``J^k_j`` (row = upper index)
* ``dJ[a, k, j]``     partial ``d_a J^k_j``
* ``D[k, i, j]``      ``((nabla_{d_i} J) d_j)^k``

Two interchangeable implementations exist: explicit loops compiled with
numba, and numpy ``einsum``. The active one is chosen by ``AESTRUCT_NUMBA``
at import and can be switched with :func:`set_backend`.
"""

from __future__ import annotations

import numpy as np

from ._jit import default_backend, njit, NUMBA_AVAILABLE

__all__ = [
    "get_backend", "set_backend", "BACKENDS",
    "levi_civita", "covariant_derivative_j", "covariant_derivative_g",
    "nabla_j_combination", "nijenhuis_bracket",
]

BACKENDS = ("numba", "numpy")
_backend = default_backend()


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> str:
    """Select ``"numba"`` or ``"numpy"``; returns the previous backend."""
    global _backend
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba is not importable")
    previous, _backend = _backend, name
    return previous


# ---------------------------------------------------------------- numpy path

def _levi_civita_np(g_inv, dg):
    # lowered Christoffel symbols of the first kind, [i, j, m]
    first = 0.5 * (dg.transpose(0, 1, 3, 2) + dg.transpose(0, 3, 1, 2) - dg.transpose(0, 3, 2, 1))
    # first[p,i,j,m] = d_i g_jm + d_j g_im - d_m g_ij
    return np.einsum("pkm,pijm->pkij", g_inv, first)


def _covariant_derivative_j_np(gamma, J, dJ):
    return (dJ.transpose(0, 2, 1, 3)
            + np.einsum("pkim,pmj->pkij", gamma, J)
            - np.einsum("pmij,pkm->pkij", gamma, J))


def _covariant_derivative_g_np(gamma, g, dg):
    return (dg
            - np.einsum("pmki,pmj->pkij", gamma, g)
            - np.einsum("pmkj,pim->pkij", gamma, g))


def _nabla_j_combination_np(D, J, c1, c2, c3):
    p1 = np.einsum("pkim,pmj->pkij", D, J)      # (nabla_X J) JY
    p2 = np.einsum("pkmj,pmi->pkij", D, J)      # (nabla_JX J) Y
    return p1 + c1 * p2 + c2 * p1.transpose(0, 1, 3, 2) + c3 * p2.transpose(0, 1, 3, 2)


def _nijenhuis_bracket_np(J, dJ):
    flow = np.einsum("pai,pakj->pkij", J, dJ)   # J^a_i d_a J^k_j
    twist = np.einsum("pkm,pimj->pkij", J, dJ)  # J^k_m d_i J^m_j
    return flow - flow.transpose(0, 1, 3, 2) - twist + twist.transpose(0, 1, 3, 2)


# ---------------------------------------------------------------- numba path

@njit
def _levi_civita_nb(g_inv, dg):
    P, n = g_inv.shape[0], g_inv.shape[1]
    out = np.zeros((P, n, n, n))
    for p in range(P):
        for i in range(n):
            for j in range(i, n):
                for k in range(n):
                    acc = 0.0
                    for m in range(n):
                        acc += g_inv[p, k, m] * (dg[p, i, j, m] + dg[p, j, i, m] - dg[p, m, i, j])
                    out[p, k, i, j] = 0.5 * acc
                    out[p, k, j, i] = 0.5 * acc
    return out


@njit
def _covariant_derivative_j_nb(gamma, J, dJ):
    P, n = J.shape[0], J.shape[1]
    out = np.empty((P, n, n, n))
    for p in range(P):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    acc = dJ[p, i, k, j]
                    for m in range(n):
                        acc += gamma[p, k, i, m] * J[p, m, j] - gamma[p, m, i, j] * J[p, k, m]
                    out[p, k, i, j] = acc
    return out


@njit
def _covariant_derivative_g_nb(gamma, g, dg):
    P, n = g.shape[0], g.shape[1]
    out = np.empty((P, n, n, n))
    for p in range(P):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    acc = dg[p, k, i, j]
                    for m in range(n):
                        acc -= gamma[p, m, k, i] * g[p, m, j] + gamma[p, m, k, j] * g[p, i, m]
                    out[p, k, i, j] = acc
    return out


@njit
def _nabla_j_combination_nb(D, J, c1, c2, c3):
    P, n = J.shape[0], J.shape[1]
    p1 = np.zeros((P, n, n, n))
    p2 = np.zeros((P, n, n, n))
    for p in range(P):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    a = 0.0
                    b = 0.0
                    for m in range(n):
                        a += D[p, k, i, m] * J[p, m, j]
                        b += D[p, k, m, j] * J[p, m, i]
                    p1[p, k, i, j] = a
                    p2[p, k, i, j] = b
    out = np.empty((P, n, n, n))
    for p in range(P):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    out[p, k, i, j] = (p1[p, k, i, j] + c1 * p2[p, k, i, j]
                                       + c2 * p1[p, k, j, i] + c3 * p2[p, k, j, i])
    return out


@njit
def _nijenhuis_bracket_nb(J, dJ):
    P, n = J.shape[0], J.shape[1]
    out = np.empty((P, n, n, n))
    for p in range(P):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    acc = 0.0
                    for m in range(n):
                        acc += J[p, m, i] * dJ[p, m, k, j] - J[p, m, j] * dJ[p, m, k, i]
                        acc -= J[p, k, m] * (dJ[p, i, m, j] - dJ[p, j, m, i])
                    out[p, k, i, j] = acc
    return out


# ---------------------------------------------------------------- dispatch

def _f64(*arrays):
    return tuple(np.ascontiguousarray(a, dtype=np.float64) for a in arrays)


def levi_civita(g_inv, dg):
    """Christoffel symbols ``gamma[p,k,i,j]`` of the Levi-Civita connection."""
    g_inv, dg = _f64(g_inv, dg)
    if _backend == "numba":
        return _levi_civita_nb(g_inv, dg)
    return _levi_civita_np(g_inv, dg)


def covariant_derivative_j(gamma, J, dJ):
    """``(nabla J)^k_ij`` for the connection with coefficients ``gamma``."""
    gamma, J, dJ = _f64(gamma, J, dJ)
    if _backend == "numba":
        return _covariant_derivative_j_nb(gamma, J, dJ)
    return _covariant_derivative_j_np(gamma, J, dJ)


def covariant_derivative_g(gamma, g, dg):
    """``(nabla_k g)_ij`` laid out as ``[p, k, i, j]``."""
    gamma, g, dg = _f64(gamma, g, dg)
    if _backend == "numba":
        return _covariant_derivative_g_nb(gamma, g, dg)
    return _covariant_derivative_g_np(gamma, g, dg)


def nabla_j_combination(D, J, c1: float, c2: float, c3: float):
    """``(D_X J)JY + c1 (D_JX J)Y + c2 (D_Y J)JX + c3 (D_JY J)X`` as ``[p,k,i,j]``.

    ``(1, -1, -1)`` gives the Nijenhuis tensor, ``(ae, ae, 1)`` the second
    Nijenhuis tensor and ``(1, 1, 1)`` the skew-torsion obstruction.
    """
    D, J = _f64(D, J)
    if _backend == "numba":
        return _nabla_j_combination_nb(D, J, float(c1), float(c2), float(c3))
    return _nabla_j_combination_np(D, J, c1, c2, c3)


def nijenhuis_bracket(J, dJ):
    """Connection-free Nijenhuis tensor from ``J`` and its partials."""
    J, dJ = _f64(J, dJ)
    if _backend == "numba":
        return _nijenhuis_bracket_nb(J, dJ)
    return _nijenhuis_bracket_np(J, dJ)
