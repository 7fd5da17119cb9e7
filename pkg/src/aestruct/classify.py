"""Sampling-based structural type of an (alpha, epsilon)-structure.

Every verdict means "holds at the sampled points within tol"; nothing here
claims a global statement about the manifold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .connections import lower_first, skew_existence_field
from .structure import FrameBatch, ManifoldSpec, frames_at, nijenhuis_field, sample_points, second_nijenhuis_field

__all__ = [
    "PREDICATES",
    "PredicateResult",
    "ClassificationReport",
    "classify",
    "classify_frames",
    "integrability_condition_field",
    "quasi_kahler_field",
    "nearly_kahler_field",
]

PREDICATES = ("kahler", "quasi_kahler", "nearly_kahler", "integrable", "admits_skew_connection")


@dataclass(frozen=True)
class PredicateResult:
    """``verdict`` is None when the predicate does not apply to the signature.

    ``cross_check`` holds the residual of an equivalent formulation when one is
    computed (max|N~| for quasi-Kahler, the nabla^g J condition for integrability).
    """

    name: str
    max_residual: float | None
    verdict: bool | None
    samples: int
    cross_check: float | None = None


@dataclass(frozen=True)
class ClassificationReport:
    spec_name: str
    samples: int
    tol: float
    results: tuple[PredicateResult, ...]
    consistency: tuple[str, ...] = field(default=())

    def __getitem__(self, name: str) -> PredicateResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def verdict(self, name: str) -> bool | None:
        return self[name].verdict

    def violations(self) -> list[str]:
        return list(self.consistency)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec_name,
            "samples": self.samples,
            "tol": self.tol,
            "predicates": [
                {"name": r.name, "max_residual": r.max_residual,
                 "verdict": None if r.verdict is None else ("holds" if r.verdict else "fails"),
                 "samples": r.samples, "cross_check": r.cross_check}
                for r in self.results
            ],
            "consistency_violations": list(self.consistency),
        }


def _amax(a) -> float:
    return float(np.max(np.abs(a), initial=0.0))


def quasi_kahler_field(fb: FrameBatch) -> np.ndarray:
    """Quasi-Kahler residual tensor, stacked over points.

    For ae=+1 this is the cyclic sum of g((D_X J)Y, Z); for ae=-1 it is
    (D_X J)JY - (D_JX J)Y.
    """
    D, J = fb.nabla_g_J, fb.J
    if fb.ae == 1:
        dl = lower_first(fb.g, D)
        return dl + np.einsum("pjli->pijl", dl) + np.einsum("plij->pijl", dl)
    p1 = np.einsum("pkim,pmj->pkij", D, J)
    p2 = np.einsum("pkmj,pmi->pkij", D, J)
    return p1 - p2


def nearly_kahler_field(fb: FrameBatch) -> np.ndarray:
    """Polarized nearly-Kahler residual (D_X J)Y + (D_Y J)X."""
    D = fb.nabla_g_J
    return D + D.transpose(0, 1, 3, 2)


def integrability_condition_field(fb: FrameBatch) -> np.ndarray:
    """nabla^g J condition equivalent to integrability.

    ae=-1: (D_X J)Y + alpha (D_JX J)JY.  ae=+1: cyclic sum of g((D_X J)Y, JZ).
    """
    D, J = fb.nabla_g_J, fb.J
    if fb.ae == -1:
        return D + fb.alpha * np.einsum("pkmn,pmi,pnj->pkij", D, J, J)
    e = np.einsum("pijb,pbl->pijl", lower_first(fb.g, D), J)
    return e + np.einsum("pjli->pijl", e) + np.einsum("plij->pijl", e)


def _consistency(v: dict[str, bool | None]) -> list[str]:
    out = []
    if v["kahler"] and not (v["quasi_kahler"] and v["integrable"]):
        out.append("kahler holds but quasi_kahler or integrable fails")
    if v["nearly_kahler"] and not v["quasi_kahler"]:
        out.append("nearly_kahler holds but quasi_kahler fails")
    if v["quasi_kahler"] and v["integrable"] and not v["kahler"]:
        out.append("quasi_kahler and integrable hold but kahler fails")
    return out


def classify_frames(fb: FrameBatch, tol: float = 1e-8, spec_name: str = "") -> ClassificationReport:
    n = len(fb)
    res: dict[str, tuple[float | None, float | None]] = {
        "kahler": (_amax(fb.nabla_g_J), None),
        "quasi_kahler": (_amax(quasi_kahler_field(fb)), _amax(second_nijenhuis_field(fb))),
        "nearly_kahler": (_amax(nearly_kahler_field(fb)) if fb.ae == -1 else None, None),
        "integrable": (_amax(nijenhuis_field(fb)), _amax(integrability_condition_field(fb))),
        "admits_skew_connection": (_amax(skew_existence_field(fb)), None),
    }
    results = []
    verdicts = {}
    for name in PREDICATES:
        r, cross = res[name]
        verdict = None if r is None else bool(r < tol)
        verdicts[name] = verdict
        results.append(PredicateResult(name, r, verdict, n, cross))
    return ClassificationReport(spec_name, n, tol, tuple(results), tuple(_consistency(verdicts)))


def classify(spec: ManifoldSpec, samples: int = 64, tol: float = 1e-8) -> ClassificationReport:
    fb = frames_at(spec, sample_points(spec, samples))
    return classify_frames(fb, tol, spec.name)
