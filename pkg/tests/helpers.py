"""Shared fixtures data: extra specs beyond the bundled catalog."""

import json

import numpy as np

from aestruct.structure import load_spec

H = "(1 + x1)^2"
ROT4 = [["0", "-1", "0", "0"], ["1", "0", "0", "0"], ["0", "0", "0", "-1"], ["0", "0", "1", "0"]]
SWAP4 = [["0", "1", "0", "0"], ["1", "0", "0", "0"], ["0", "0", "0", "1"], ["0", "0", "1", "0"]]


def diag(*entries):
    n = len(entries)
    return [[entries[i] if i == j else "0" for j in range(n)] for i in range(n)]


def make_spec(name, alpha, epsilon, metric, J, box=0.5, seed=0):
    n = len(metric)
    doc = {
        "name": name, "dimension": n, "alpha": alpha, "epsilon": epsilon,
        "coordinates": [f"x{i + 1}" for i in range(n)],
        "metric": metric, "J": J, "domain": [[-box, box]] * n, "seed": seed,
    }
    return load_spec(json.dumps(doc))


def conformal_hermitian():
    """Integrable, non-Kahler, admits a Bismut connection."""
    return make_spec("conformal_hermitian", -1, 1, diag(H, H, H, H), ROT4)


def conformal_para():
    """Para-Hermitian analogue of :func:`conformal_hermitian`."""
    return make_spec("conformal_para", 1, -1, diag(H, "-" + H, H, "-" + H), SWAP4)


def conformal_norden():
    """Integrable Norden structure that is not quasi-Kahler."""
    return make_spec("conformal_norden", -1, -1, diag(H, "-" + H, H, "-" + H), ROT4)


def rotating_product():
    """Flat metric with a non-integrable product structure."""
    J = [["cos(x3)", "sin(x3)", "0", "0"], ["sin(x3)", "-cos(x3)", "0", "0"],
         ["0", "0", "cos(x1)", "sin(x1)"], ["0", "0", "sin(x1)", "-cos(x1)"]]
    return make_spec("rotating_product", 1, 1, diag("1", "1", "1", "1"), J)


EXTRA_SPECS = [conformal_hermitian, conformal_para, conformal_norden, rotating_product]


def amax(a):
    return float(np.max(np.abs(a), initial=0.0))


# acceptance results, printed by the terminal summary hook in conftest.py
ACCEPTANCE: dict[int, str] = {}
