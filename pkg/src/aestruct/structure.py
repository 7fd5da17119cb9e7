"""Manifold specs, validation, and point frames.

Index conventions used throughout the package:

* ``gamma[k, i, j]`` is ``Gamma^k_ij`` with ``nabla_{d_i} d_j = Gamma^k_ij d_k``;
* ``nabla_J[k, i, j]`` is ``((nabla_{d_i} J) d_j)^k``;
* torsion ``T^k_ij = Gamma^k_ij - Gamma^k_ji`` (coordinate fields commute);
* ``dg[a, i, j] = d_a g_ij`` and ``dJ[a, k, j] = d_a J^k_j``.

Batched arrays carry an extra leading axis over sample points.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import kernels
from .exprlang import EvalDomainError, ExprError, Expression, eval_batch, parse_expression
from .tensor import TensorValue

__all__ = [
    "SpecError",
    "DegenerateMetricError",
    "ManifoldSpec",
    "ValidationReport",
    "FrameBatch",
    "PointFrame",
    "load_spec",
    "spec_to_dict",
    "dump_spec",
    "sample_points",
    "evaluate_fields",
    "validate_structure",
    "frames_at",
    "frame_at",
    "phi_field",
    "nabla_phi_field",
    "nijenhuis_field",
    "second_nijenhuis_field",
    "bracket_nijenhuis_field",
    "fundamental_tensor",
    "nabla_g_phi",
    "nijenhuis",
    "second_nijenhuis",
    "DEGENERATE_DET",
    "SYMMETRY_WARN",
]

DEGENERATE_DET = 1e-10
SYMMETRY_WARN = 1e-12


class SpecError(ValueError):
    """Malformed manifold spec."""


class DegenerateMetricError(ValueError):
    """The metric is degenerate (|det g| <= 1e-10) at a requested point."""


@dataclass(frozen=True)
class ManifoldSpec:
    name: str
    dimension: int
    alpha: int
    epsilon: int
    coordinates: tuple[str, ...]
    metric: tuple[tuple[Expression, ...], ...]
    J: tuple[tuple[Expression, ...], ...]
    domain: tuple[tuple[float, float], ...]
    seed: int = 0

    @property
    def ae(self) -> int:
        """The product alpha * epsilon."""
        return self.alpha * self.epsilon

    def with_seed(self, seed: int) -> "ManifoldSpec":
        return replace(self, seed=int(seed))


# ------------------------------------------------------------------ loading

def _require(cond: bool, message: str) -> None:
    if not cond:
        raise SpecError(message)


def _matrix(raw, n: int, label: str, coords: Sequence[str]) -> tuple[tuple[Expression, ...], ...]:
    _require(isinstance(raw, list) and len(raw) == n and all(isinstance(r, list) for r in raw),
             f"{label} must be a {n}x{n} matrix")
    rows = []
    for i, row in enumerate(raw):
        _require(len(row) == n, f"{label} must be a {n}x{n} matrix (row {i + 1} has {len(row)} entries)")
        out = []
        for j, text in enumerate(row):
            _require(isinstance(text, str), f"{label} entry ({i + 1},{j + 1}) must be a string")
            try:
                out.append(parse_expression(text, coords))
            except ExprError as exc:
                raise SpecError(f"{label} entry ({i + 1},{j + 1}): {exc}") from exc
        rows.append(tuple(out))
    return tuple(rows)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_real(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def load_spec(data: bytes | str) -> ManifoldSpec:
    """Parse the JSON manifold description into a :class:`ManifoldSpec`."""
    try:
        raw = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SpecError(f"malformed JSON: {exc}") from exc
    _require(isinstance(raw, dict), "spec must be a JSON object")
    missing = [k for k in ("name", "dimension", "alpha", "epsilon", "coordinates", "metric", "J", "domain")
               if k not in raw]
    _require(not missing, f"missing field(s): {', '.join(missing)}")
    unknown = sorted(set(raw) - {"name", "dimension", "alpha", "epsilon", "coordinates", "metric", "J",
                                 "domain", "seed"})
    _require(not unknown, f"unknown field(s): {', '.join(unknown)}")

    _require(isinstance(raw["name"], str), "name must be a string")
    n = raw["dimension"]
    _require(_is_int(n) and n > 0, "dimension must be a positive integer")
    for key in ("alpha", "epsilon"):
        _require(_is_int(raw[key]) and raw[key] in (-1, 1), f"{key} must be -1 or 1")
    coords = raw["coordinates"]
    _require(isinstance(coords, list) and all(isinstance(c, str) for c in coords),
             "coordinates must be a list of strings")
    _require(len(coords) == n, f"coordinates must have {n} names")
    try:
        parse_expression("0", coords)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc

    metric = _matrix(raw["metric"], n, "metric", coords)
    J = _matrix(raw["J"], n, "J", coords)

    dom = raw["domain"]
    _require(isinstance(dom, list) and len(dom) == n, f"domain must have {n} intervals")
    domain = []
    for i, iv in enumerate(dom):
        _require(isinstance(iv, list) and len(iv) == 2 and all(_is_real(v) for v in iv),
                 f"domain interval {i + 1} must be [lo, hi]")
        lo, hi = float(iv[0]), float(iv[1])
        _require(np.isfinite(lo) and np.isfinite(hi) and lo < hi, f"domain interval {i + 1} needs lo < hi")
        domain.append((lo, hi))

    seed = raw.get("seed", 0)
    _require(_is_int(seed) and seed >= 0, "seed must be an unsigned integer")
    return ManifoldSpec(raw["name"], n, raw["alpha"], raw["epsilon"], tuple(coords),
                        metric, J, tuple(domain), seed)


def spec_to_dict(spec: ManifoldSpec) -> dict:
    return {
        "name": spec.name,
        "dimension": spec.dimension,
        "alpha": spec.alpha,
        "epsilon": spec.epsilon,
        "coordinates": list(spec.coordinates),
        "metric": [[str(e) for e in row] for row in spec.metric],
        "J": [[str(e) for e in row] for row in spec.J],
        "domain": [[lo, hi] for lo, hi in spec.domain],
        "seed": spec.seed,
    }


def dump_spec(spec: ManifoldSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2) + "\n"


# ------------------------------------------------------------------ evaluation

def sample_points(spec: ManifoldSpec, count: int, seed: int | None = None) -> np.ndarray:
    """``count`` points drawn uniformly from the spec domain (PCG64, seeded)."""
    if count < 1:
        raise ValueError("sample count must be at least 1")
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    lo = np.array([d[0] for d in spec.domain])
    hi = np.array([d[1] for d in spec.domain])
    return lo + (hi - lo) * rng.random((count, spec.dimension))


def _eval_matrix(mat, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    P, n = pts.shape
    values = np.empty((P, n, n))
    grads = np.empty((P, n, n, n))   # [p, a, i, j]
    for i, row in enumerate(mat):
        for j, expr in enumerate(row):
            v, d = eval_batch(expr, pts)
            values[:, i, j] = v
            grads[:, :, i, j] = d
    return values, grads


def _as_points(spec: ManifoldSpec, points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != spec.dimension:
        raise ValueError(f"points must have {spec.dimension} coordinates")
    return pts


def evaluate_fields(spec: ManifoldSpec, points):
    """Raw ``(g, dg, J, dJ, asym)`` at each point; ``g`` and ``dg`` symmetrized.

    ``asym`` is the per-point max |g_ij - g_ji| before symmetrization.
    """
    pts = _as_points(spec, points)
    g_raw, dg_raw = _eval_matrix(spec.metric, pts)
    J, dJ = _eval_matrix(spec.J, pts)
    asym = np.max(np.abs(g_raw - g_raw.transpose(0, 2, 1)), axis=(1, 2))
    g = 0.5 * (g_raw + g_raw.transpose(0, 2, 1))
    dg = 0.5 * (dg_raw + dg_raw.transpose(0, 1, 3, 2))
    return g, dg, J, dJ, asym


# ------------------------------------------------------------------ validation

@dataclass(frozen=True)
class ValidationReport:
    spec_name: str
    samples: int
    tol: float
    j_squared: float
    compatibility: float
    trace: float
    symmetry: float
    min_abs_det: float
    positive_definite: bool | None
    require_traceless: bool = True
    errors: tuple[str, ...] = ()

    @property
    def residuals(self) -> dict[str, float]:
        return {
            "j_squared": self.j_squared,
            "compatibility": self.compatibility,
            "trace": self.trace,
            "symmetry": self.symmetry,
        }

    @property
    def passed(self) -> bool:
        if self.errors:
            return False
        ok = (self.j_squared < self.tol and self.compatibility < self.tol and self.symmetry < self.tol
              and self.min_abs_det > DEGENERATE_DET)
        if self.require_traceless:
            ok = ok and self.trace < self.tol
        if self.positive_definite is not None:
            ok = ok and self.positive_definite
        return ok


def validate_structure(spec: ManifoldSpec, samples: int = 64, tol: float = 1e-8,
                       require_traceless: bool = True) -> ValidationReport:
    """Check the defining identities of the structure at seeded sample points."""
    pts = sample_points(spec, samples)
    nan = float("nan")
    try:
        g, _, J, _, asym = evaluate_fields(spec, pts)
    except EvalDomainError as exc:
        return ValidationReport(spec.name, samples, tol, nan, nan, nan, nan, nan, None,
                                require_traceless, (str(exc),))
    n = spec.dimension
    eye = np.eye(n)
    j2 = np.max(np.abs(J @ J - spec.alpha * eye))
    compat = np.max(np.abs(J.transpose(0, 2, 1) @ g @ J - spec.epsilon * g))
    trace = np.max(np.abs(np.trace(J, axis1=1, axis2=2)))
    min_det = float(np.min(np.abs(np.linalg.det(g))))
    spd = None
    if spec.epsilon == 1:
        spd = all(bool(np.all(np.linalg.det(g[:, :k, :k]) > 0)) for k in range(1, n + 1))
    return ValidationReport(spec.name, samples, tol, float(j2), float(compat), float(trace),
                            float(np.max(asym)), min_det, spd, require_traceless)


# ------------------------------------------------------------------ frames

@dataclass(frozen=True, eq=False)
class FrameBatch:
    """Frames at several points; every array has a leading point axis."""

    points: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    dg: np.ndarray
    J: np.ndarray
    dJ: np.ndarray
    gamma_g: np.ndarray
    nabla_g_J: np.ndarray
    alpha: int
    epsilon: int
    warnings: tuple[str, ...] = ()

    @property
    def ae(self) -> int:
        return self.alpha * self.epsilon

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def frame(self, i: int) -> "PointFrame":
        return PointFrame(
            point=self.points[i],
            g=TensorValue("ll", self.g[i]),
            g_inv=TensorValue("uu", self.g_inv[i]),
            dg=self.dg[i],
            J=TensorValue("ul", self.J[i]),
            dJ=self.dJ[i],
            gamma_g=self.gamma_g[i],
            nabla_g_J=TensorValue("ull", self.nabla_g_J[i]),
            alpha=self.alpha,
            epsilon=self.epsilon,
            warnings=self.warnings,
        )


@dataclass(frozen=True, eq=False)
class PointFrame:
    point: np.ndarray
    g: TensorValue
    g_inv: TensorValue
    dg: np.ndarray
    J: TensorValue
    dJ: np.ndarray
    gamma_g: np.ndarray
    nabla_g_J: TensorValue
    alpha: int
    epsilon: int
    warnings: tuple[str, ...] = field(default=())

    @property
    def ae(self) -> int:
        return self.alpha * self.epsilon

    @property
    def dimension(self) -> int:
        return self.point.shape[0]

    def as_batch(self) -> FrameBatch:
        return FrameBatch(
            points=self.point[None], g=self.g.data[None], g_inv=self.g_inv.data[None],
            dg=self.dg[None], J=self.J.data[None], dJ=self.dJ[None], gamma_g=self.gamma_g[None],
            nabla_g_J=self.nabla_g_J.data[None], alpha=self.alpha, epsilon=self.epsilon,
            warnings=self.warnings,
        )


def frames_at(spec: ManifoldSpec, points) -> FrameBatch:
    """Evaluate g, J, their partials, Levi-Civita symbols and nabla^g J at points."""
    pts = _as_points(spec, points)
    g, dg, J, dJ, asym = evaluate_fields(spec, pts)
    det = np.abs(np.linalg.det(g))
    bad = np.flatnonzero(det <= DEGENERATE_DET)
    if bad.size:
        p = pts[bad[0]]
        raise DegenerateMetricError(f"degenerate metric at {tuple(float(x) for x in p)}: |det g| = {det[bad[0]]:.3g}")
    warnings = ()
    worst = float(np.max(asym))
    if worst > SYMMETRY_WARN:
        warnings = (f"metric not symmetric as written (max |g_ij - g_ji| = {worst:.3g}); symmetrized",)
    g_inv = np.linalg.inv(g)
    gamma = kernels.levi_civita(g_inv, dg)
    nabla_J = kernels.covariant_derivative_j(gamma, J, dJ)
    return FrameBatch(pts, g, g_inv, dg, J, dJ, gamma, nabla_J, spec.alpha, spec.epsilon, warnings)


def frame_at(spec: ManifoldSpec, point) -> PointFrame:
    pt = np.asarray(point, dtype=float)
    if pt.shape != (spec.dimension,):
        raise ValueError(f"point must have length {spec.dimension}")
    return frames_at(spec, pt[None]).frame(0)


# ------------------------------------------------------------------ derived tensors (batched)

def phi_field(fb: FrameBatch) -> np.ndarray:
    """``Phi_ij = J^m_i g_mj``."""
    return np.einsum("pmi,pmj->pij", fb.J, fb.g)


def nabla_phi_field(fb: FrameBatch) -> np.ndarray:
    """``(nabla^g Phi)_ijk = g_mk (nabla^g J)^m_ij``."""
    return np.einsum("pmk,pmij->pijk", fb.g, fb.nabla_g_J)


def nijenhuis_field(fb: FrameBatch) -> np.ndarray:
    return kernels.nabla_j_combination(fb.nabla_g_J, fb.J, 1.0, -1.0, -1.0)


def second_nijenhuis_field(fb: FrameBatch) -> np.ndarray:
    ae = float(fb.ae)
    return kernels.nabla_j_combination(fb.nabla_g_J, fb.J, ae, ae, 1.0)


def bracket_nijenhuis_field(fb: FrameBatch) -> np.ndarray:
    """Nijenhuis tensor from J and its partials only (no connection)."""
    return kernels.nijenhuis_bracket(fb.J, fb.dJ)


# ------------------------------------------------------------------ derived tensors (one point)

def fundamental_tensor(frame: PointFrame) -> TensorValue:
    return TensorValue("ll", phi_field(frame.as_batch())[0])


def nabla_g_phi(frame: PointFrame) -> TensorValue:
    return TensorValue("lll", nabla_phi_field(frame.as_batch())[0])


def nijenhuis(frame: PointFrame) -> TensorValue:
    return TensorValue("ull", nijenhuis_field(frame.as_batch())[0])


def second_nijenhuis(frame: PointFrame) -> TensorValue:
    return TensorValue("ull", second_nijenhuis_field(frame.as_batch())[0])
