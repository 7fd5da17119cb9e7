"""Bundled example manifolds.

Each entry is stored as the JSON document accepted by :func:`load_spec`.
Nonconstant examples use ``f = 1 + x1`` (dimension 2) or ``f = 1 + x3``,
``h = 1 + x1`` (dimension 4) on the box ``[-0.5, 0.5]^n``.
"""

from __future__ import annotations

import json

from .structure import ManifoldSpec, load_spec

__all__ = ["CATALOG", "catalog_names", "catalog_spec", "catalog_json"]

_BOX2 = [[-0.5, 0.5]] * 2
_BOX4 = [[-0.5, 0.5]] * 4
_C2 = ["x1", "x2"]
_C4 = ["x1", "x2", "x3", "x4"]


def _entry(name, alpha, epsilon, coords, metric, J, domain):
    return {"name": name, "dimension": len(coords), "alpha": alpha, "epsilon": epsilon,
            "coordinates": coords, "metric": metric, "J": J, "domain": domain, "seed": 0}


def _diag(*entries):
    n = len(entries)
    return [[entries[i] if i == j else "0" for j in range(n)] for i in range(n)]


def _blocks(a, b):
    """4x4 block-diagonal matrix from two 2x2 string blocks."""
    return [a[0] + ["0", "0"], a[1] + ["0", "0"], ["0", "0"] + b[0], ["0", "0"] + b[1]]


_ROT = [["0", "-1"], ["1", "0"]]
_REFL = [["1", "0"], ["0", "-1"]]
_ROT_F = [["0", "-(1 + x1)"], ["1/(1 + x1)", "0"]]
_ROT_4 = _blocks([["0", "-(1 + x3)"], ["1/(1 + x3)", "0"]], [["0", "-(1 + x1)"], ["1/(1 + x1)", "0"]])
_SWAP_4 = _blocks([["0", "1 + x3"], ["1/(1 + x3)", "0"]], [["0", "1 + x1"], ["1/(1 + x1)", "0"]])

CATALOG: dict[str, dict] = {
    e["name"]: e
    for e in [
        _entry("flat_kahler", -1, 1, _C2, _diag("1", "1"), _ROT, _BOX2),
        _entry("flat_para_kahler", 1, -1, _C2, [["0", "1"], ["1", "0"]], _REFL, _BOX2),
        _entry("flat_norden", -1, -1, _C2, _diag("1", "-1"), _ROT, _BOX2),
        _entry("flat_product", 1, 1, _C2, _diag("1", "1"), _REFL, _BOX2),
        _entry("norden2d", -1, -1, _C2, _diag("1", "-(1 + x1)^2"), _ROT_F, _BOX2),
        _entry("hermitian2d", -1, 1, _C2, _diag("1", "(1 + x1)^2"), _ROT_F, _BOX2),
        _entry("hermitian4d", -1, 1, _C4, _diag("1", "(1 + x3)^2", "1", "(1 + x1)^2"), _ROT_4, _BOX4),
        _entry("norden4d", -1, -1, _C4, _diag("1", "-(1 + x3)^2", "1", "-(1 + x1)^2"), _ROT_4, _BOX4),
        _entry("para4d", 1, -1, _C4, _diag("1", "-(1 + x3)^2", "1", "-(1 + x1)^2"), _SWAP_4, _BOX4),
        _entry("product4d", 1, 1, _C4, _diag("1", "(1 + x3)^2", "1", "(1 + x1)^2"), _SWAP_4, _BOX4),
    ]
}


def catalog_names() -> list[str]:
    return list(CATALOG)


def catalog_json(name: str) -> str:
    if name not in CATALOG:
        raise KeyError(f"unknown catalog spec {name!r}; known: {', '.join(CATALOG)}")
    return json.dumps(CATALOG[name], indent=2) + "\n"


def catalog_spec(name: str) -> ManifoldSpec:
    return load_spec(catalog_json(name))
