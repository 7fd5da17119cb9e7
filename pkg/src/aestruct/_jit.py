"""Numba availability switch.

``AESTRUCT_NUMBA=0`` (or ``false``/``off``/``no``) forces the pure-numpy
kernels even when numba is importable. Anything else, or unset, enables the
JIT path when numba can be imported.
"""

from __future__ import annotations

import os

_FALSEY = {"0", "false", "off", "no"}

NUMBA_REQUESTED = os.environ.get("AESTRUCT_NUMBA", "1").strip().lower() not in _FALSEY

try:
    from numba import njit as _njit

    NUMBA_AVAILABLE = True
except Exception:  # pragma: no cover - numba is a hard dependency in practice
    _njit = None
    NUMBA_AVAILABLE = False


def njit(func):
    """``numba.njit(cache=True)`` when available, else the plain function."""
    if _njit is None:
        return func
    return _njit(cache=True)(func)


def default_backend() -> str:
    return "numba" if (NUMBA_REQUESTED and NUMBA_AVAILABLE) else "numpy"
