"""Identity suite over sampled points of one manifold spec.

Every check computes a max residual over all sampled points and compares it
with the tolerance. Biconditional statements are checked on both sides: if
both sides vanish the residual is the larger of the two; if both are nonzero
the statement holds through its nonzero branch and the residual is 0 (the
branch is recorded in ``note``); if exactly one side vanishes the residual is
the nonzero side, which fails.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable

import numpy as np

from . import connections as cx
from .classify import classify_frames
from .structure import (
    FrameBatch, ManifoldSpec, frames_at, bracket_nijenhuis_field, nijenhuis_field, phi_field,
    sample_points, second_nijenhuis_field,
)
from .tensor import TensorValue, antisymmetry_residual

__all__ = [
    "CheckReport",
    "SuiteConfig",
    "CHECKS",
    "CHECK_IDS",
    "DEFAULT_S_VALUES",
    "run_suite",
    "render_report",
    "report_to_dict",
]

DEFAULT_S_VALUES = (-3.0, -1.0, 0.0, 1.0, 2.0, 3.0)
ORACLE_TOL = 1e-7


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    paper_ref: str
    spec_name: str
    samples: int
    max_residual: float | None
    tol: float
    status: str
    reason: str | None = None
    note: str | None = None


@dataclass(frozen=True)
class SuiteConfig:
    samples: int = 64
    tol: float = 1e-8
    s_values: tuple[float, ...] = DEFAULT_S_VALUES


class _Skip(Exception):
    pass


# ------------------------------------------------------------------ helpers

def _amax(a) -> float:
    return float(np.max(np.abs(a), initial=0.0))


def _swap(a):
    return a.transpose(0, 1, 3, 2)


class _Context:
    """Lazily computed quantities shared by the checks of one suite run."""

    def __init__(self, spec: ManifoldSpec, config: SuiteConfig):
        self.spec = spec
        self.config = config
        self.tol = config.tol
        self.fb: FrameBatch = frames_at(spec, sample_points(spec, config.samples))
        self.rng = np.random.default_rng([spec.seed, 1])
        self._conns: dict = {}

    @property
    def a(self) -> int:
        return self.spec.alpha

    @property
    def e(self) -> int:
        return self.spec.epsilon

    @property
    def ae(self) -> int:
        return self.spec.ae

    def conn(self, kind: str, s: float | None = None, base=None) -> cx.ConnectionField:
        key = (kind, s)
        if base is not None:
            return cx.connection_field(self.fb, kind, s=s, base=base, tol=self.tol)
        if key not in self._conns:
            self._conns[key] = cx.connection_field(self.fb, kind, s=s, tol=self.tol)
        return self._conns[key]

    @cached_property
    def D(self):
        return self.fb.nabla_g_J

    @cached_property
    def blocks(self):
        p1 = np.einsum("pkim,pmj->pkij", self.D, self.fb.J)
        p2 = np.einsum("pkmj,pmi->pkij", self.D, self.fb.J)
        return p1, p2

    @cached_property
    def N(self):
        return nijenhuis_field(self.fb)

    @cached_property
    def Nt(self):
        return second_nijenhuis_field(self.fb)

    @cached_property
    def skew_mask(self) -> np.ndarray:
        return cx.skew_existence_field(self.fb) < self.tol

    @cached_property
    def skew_frames(self) -> FrameBatch | None:
        idx = np.flatnonzero(self.skew_mask)
        if idx.size == 0:
            return None
        fb = self.fb
        return FrameBatch(fb.points[idx], fb.g[idx], fb.g_inv[idx], fb.dg[idx], fb.J[idx], fb.dJ[idx],
                          fb.gamma_g[idx], fb.nabla_g_J[idx], fb.alpha, fb.epsilon, fb.warnings)

    def natural_kinds(self) -> list[cx.ConnectionField]:
        out = [self.conn("first_canonical")]
        out += [self.conn("canonical", s) for s in self.config.s_values]
        out.append(self.conn("well_adapted"))
        if self.ae == -1:
            out += [self.conn("chern"), self.conn("bismut")]
        return out

    def jx(self, a):
        """``A(JX, Y)``."""
        return np.einsum("pkaj,pai->pkij", a, self.fb.J)

    def jy(self, a):
        """``A(X, JY)``."""
        return np.einsum("pkia,paj->pkij", a, self.fb.J)

    def jv(self, a):
        """``J A(X, Y)``."""
        return np.einsum("pkm,pmij->pkij", self.fb.J, a)

    def lower(self, a):
        return cx.lower_first(self.fb.g, a)

    def low_x(self, a):
        """``low[i,j,l] = g(a(d_j, d_l), d_i)``."""
        return np.einsum("pki,pkjl->pijl", self.fb.g, a)

    def low_y(self, a):
        """``low[i,j,l] = g(a(d_i, d_l), d_j)``."""
        return np.einsum("pkj,pkil->pijl", self.fb.g, a)


def _bicond(ra: float, rb: float, tol: float, holds: str, fails: str) -> tuple[float, str]:
    if ra < tol and rb < tol:
        return max(ra, rb), f"both sides vanish ({holds})"
    if ra >= tol and rb >= tol:
        return 0.0, f"both sides nonzero ({fails}): {ra:.3g}, {rb:.3g}"
    return max(ra, rb), f"sides disagree: {ra:.3g} vs {rb:.3g}"


# ------------------------------------------------------------------ registry

@dataclass(frozen=True)
class _Check:
    check_id: str
    paper_ref: str
    func: Callable


CHECKS: list[_Check] = []


def _check(check_id: str, paper_ref: str):
    def deco(func):
        CHECKS.append(_Check(check_id, paper_ref, func))
        return func
    return deco


def _needs_negative(c: _Context):
    if c.ae != -1:
        raise _Skip("alpha*epsilon=+1")


def _needs_skew(c: _Context):
    if c.skew_frames is None:
        raise _Skip("no natural totally skew connection at sampled points")


# ---- structure

@_check("levi_civita.symmetric", "Levi-Civita coefficients are symmetric")
def _(c):
    return _amax(c.fb.gamma_g - _swap(c.fb.gamma_g))


@_check("levi_civita.metric", "Levi-Civita connection is metric")
def _(c):
    return _amax(cx.nabla_g_field(c.conn("levi_civita")))


@_check("nabla_g_J.anticommutes_with_J", "(D_X J)JY = -J(D_X J)Y")
def _(c):
    p1, _ = c.blocks
    return _amax(p1 + c.jv(c.D))


@_check("nabla_g_J.metric_symmetry", "g((D_X J)Y,Z) = ae g((D_X J)Z,Y)")
def _(c):
    dl = c.lower(c.D)
    return _amax(dl - c.ae * dl.transpose(0, 1, 3, 2))


@_check("nabla_g_J.jz_variant_a", "g((D_X J)JY,Z) = -ae g((D_X J)Y,JZ)")
def _(c):
    p1, _ = c.blocks
    lhs = c.lower(p1)
    rhs = np.einsum("pijb,pbl->pijl", c.lower(c.D), c.fb.J)
    return _amax(lhs + c.ae * rhs)


@_check("nabla_g_J.jz_variant_b", "g((D_X J)JY,Z) = -g((D_X J)JZ,Y)")
def _(c):
    p1, _ = c.blocks
    lhs = c.lower(p1)
    return _amax(lhs + lhs.transpose(0, 1, 3, 2))


@_check("phi.ae_symmetry", "g(JX,Y) = ae g(X,JY)")
def _(c):
    phi = phi_field(c.fb)
    return _amax(phi - c.ae * phi.transpose(0, 2, 1))


@_check("nijenhuis.antisymmetric", "Nijenhuis tensor is skew")
def _(c):
    return _amax(c.N + _swap(c.N))


@_check("nijenhuis.j_invariance", "N(JX,JY) = alpha N(X,Y)")
def _(c):
    return _amax(c.jx(c.jy(c.N)) - c.a * c.N)


@_check("nijenhuis.j_shift", "N(JX,Y) = N(X,JY)")
def _(c):
    return _amax(c.jx(c.N) - c.jy(c.N))


@_check("nijenhuis.metric_j", "g(N(JX,Y),JZ) = -eps g(N(X,Y),Z)")
def _(c):
    lhs = np.einsum("pijb,pbl->pijl", c.lower(c.jx(c.N)), c.fb.J)
    return _amax(lhs + c.e * c.lower(c.N))


@_check("nijenhuis.bracket_oracle", "Nijenhuis tensor via nabla^g J equals the bracket formula")
def _(c):
    return _amax(c.N - bracket_nijenhuis_field(c.fb)), ORACLE_TOL


@_check("second_nijenhuis.symmetry", "N~(Y,X) = ae N~(X,Y)")
def _(c):
    return _amax(_swap(c.Nt) - c.ae * c.Nt)


@_check("second_nijenhuis.j_invariance", "N~(JX,JY) = eps N~(X,Y)")
def _(c):
    return _amax(c.jx(c.jy(c.Nt)) - c.e * c.Nt)


@_check("second_nijenhuis.j_shift", "N~(JX,Y) = ae N~(X,JY)")
def _(c):
    return _amax(c.jx(c.Nt) - c.ae * c.jy(c.Nt))


# ---- first canonical connection

@_check("first_canonical.natural", "first canonical connection is natural")
def _(c):
    rj, rg = cx.naturality_field(c.conn("first_canonical"))
    return max(_amax(rj), _amax(rg))


@_check("first_canonical.torsion_formula", "T0(X,Y) = (-alpha/2)((D_X J)JY - (D_Y J)JX)")
def _(c):
    p1, _ = c.blocks
    return _amax(cx.torsion_field(c.conn("first_canonical")) + 0.5 * c.a * (p1 - _swap(p1)))


@_check("first_canonical.torsion_j_plus", "T0(JX,JY) + alpha T0(X,Y) = -N(X,Y)/2")
def _(c):
    t = cx.torsion_field(c.conn("first_canonical"))
    return _amax(c.jx(c.jy(t)) + c.a * t + 0.5 * c.N)


@_check("first_canonical.torsion_j_minus", "T0(JX,JY) - alpha T0(X,Y) in terms of nabla^g J")
def _(c):
    t = cx.torsion_field(c.conn("first_canonical"))
    p1, p2 = c.blocks
    return _amax(c.jx(c.jy(t)) - c.a * t - 0.5 * (p1 - p2 - _swap(p1) + _swap(p2)))


@_check("first_canonical.integrability_biconditional", "J integrable iff T0(JX,JY) = -alpha T0(X,Y)")
def _(c):
    t = cx.torsion_field(c.conn("first_canonical"))
    return _bicond(_amax(c.jx(c.jy(t)) + c.a * t), _amax(c.N), c.tol, "integrable", "non-integrable")


@_check("first_canonical.f_tensor", "F(nabla0) in terms of the (second) Nijenhuis tensor")
def _(c):
    f = cx.f_tensor_field(c.conn("first_canonical"))
    ref = 0.5 * c.a * c.low_y(c.Nt if c.ae == -1 else c.N)
    return _amax(f - ref)


# ---- Kobayashi-Nomizu and Yano

@_check("kobayashi_nomizu.torsion", "(-alpha) N = 4 T for the Kobayashi-Nomizu connection")
def _(c):
    return _amax(-c.a * c.N - 4 * cx.torsion_field(c.conn("kobayashi_nomizu")))


@_check("kobayashi_nomizu.natural_iff_quasi_kahler", "Kobayashi-Nomizu connection natural iff quasi-Kahler type")
def _(c):
    rj, rg = cx.naturality_field(c.conn("kobayashi_nomizu"))
    return _bicond(max(_amax(rj), _amax(rg)), _amax(c.Nt), c.tol, "quasi-Kahler", "not quasi-Kahler")


@_check("yano.kn_difference", "nabla^kn - nabla^y = (-alpha/4) N")
def _(c):
    diff = c.conn("kobayashi_nomizu").gamma - c.conn("yano").gamma
    return _amax(diff + 0.25 * c.a * c.N)


@_check("yano.torsion", "T^y = (alpha/4) N")
def _(c):
    return _amax(cx.torsion_field(c.conn("yano")) - 0.25 * c.a * c.N)


@_check("yano.potential_metric_part", "g(S^y(X,Y),Z) + g(S^y(X,Z),Y) in terms of nabla^g J")
def _(c):
    sl = c.lower(cx.potential_field(c.conn("yano")))          # [i,j,l] = g(S(X,Y),Z)
    lhs = sl + sl.transpose(0, 1, 3, 2)
    dl = c.lower(c.D)                                        # [i,j,l] = g((D_i J)d_j, d_l)
    p1, p2 = c.blocks
    p1l, p2l = c.lower(p1), c.lower(p2)
    # ae g((D_Y J)Z, JX) + g((D_Z J)JX, Y), then alpha(1+ae)/4 g((D_JX J)Y, Z)
    t1 = np.einsum("pjlb,pbi->pijl", dl, c.fb.J)
    t2 = np.einsum("plij->pijl", p1l)
    t3 = p2l
    rhs = -0.5 * c.a * (c.ae * t1 + t2) + 0.25 * c.a * (1 + c.ae) * t3
    return _amax(lhs - rhs)


@_check("yano.adapted_iff_integrable", "Yano connection adapted to J iff J integrable")
def _(c):
    rj = _amax(cx.nabla_j_field(c.conn("yano")))
    return _bicond(rj, _amax(c.N), c.tol, "integrable", "non-integrable")


# ---- natural connections in general

@_check("natural.nijenhuis_from_torsion", "N = J T(JX,Y) + J T(X,JY) - alpha T(X,Y) - T(JX,JY)")
def _(c):
    worst = 0.0
    for conn in c.natural_kinds():
        t = cx.torsion_field(conn)
        worst = max(worst, _amax(c.N - (c.jv(c.jx(t)) + c.jv(c.jy(t)) - c.a * t - c.jx(c.jy(t)))))
    return worst


@_check("natural.potential_from_torsion", "g(S(X,Y),Z) from the torsion of a natural connection")
def _(c):
    worst = 0.0
    for conn in c.natural_kinds():
        sl = c.lower(cx.potential_field(conn))
        tl = c.lower(cx.torsion_field(conn))             # [i,j,l] = g(T(X,Y),Z)
        rhs = 0.5 * (tl - np.einsum("pjli->pijl", tl) + np.einsum("plij->pijl", tl))
        worst = max(worst, _amax(sl - rhs))
    return worst


@_check("natural.potential_laws", "JS(X,Y) - S(X,JY) = (D_X J)Y and g(S(X,Y),Z) skew in Y,Z")
def _(c):
    worst = 0.0
    for conn in c.natural_kinds():
        s = cx.potential_field(conn)
        worst = max(worst, _amax(c.jv(s) - c.jy(s) - c.D))
        sl = c.lower(s)
        worst = max(worst, _amax(sl + sl.transpose(0, 1, 3, 2)))
    return worst


# ---- canonical family

@_check("canonical.natural", "every canonical connection is natural")
def _(c):
    worst = 0.0
    for s in c.config.s_values:
        rj, rg = cx.naturality_field(c.conn("canonical", s))
        worst = max(worst, _amax(rj), _amax(rg))
    return worst


@_check("canonical.s0_is_first_canonical", "canonical(0) is the first canonical connection")
def _(c):
    return _amax(c.conn("canonical", 0.0).gamma - c.conn("first_canonical").gamma)


@_check("canonical.affine_line", "canonical(s) = (1-s) nabla0 + s nabla^w")
def _(c):
    g0, gw = c.conn("first_canonical").gamma, c.conn("well_adapted").gamma
    return max(_amax(c.conn("canonical", s).gamma - ((1 - s) * g0 + s * gw)) for s in c.config.s_values)


@_check("well_adapted.f_vanishes", "well adapted connection satisfies F = 0")
def _(c):
    return _amax(cx.f_tensor_field(c.conn("well_adapted")))


@_check("well_adapted.equals_first_canonical_iff", "nabla0 = nabla^w iff quasi-Kahler (ae=-1) / integrable (ae=+1)")
def _(c):
    diff = _amax(c.conn("well_adapted").gamma - c.conn("first_canonical").gamma)
    obstruction = _amax(c.Nt if c.ae == -1 else c.N)
    return _bicond(diff, obstruction, c.tol, "coincide", "differ")


@_check("chern.torsion_law", "Chern torsion satisfies T(JX,JY) = alpha T(X,Y)")
def _(c):
    _needs_negative(c)
    t = cx.torsion_field(c.conn("chern"))
    return _amax(c.jx(c.jy(t)) - c.a * t)


@_check("chern.explicit_formula", "Chern connection agrees with its explicit nabla^g J formula")
def _(c):
    _needs_negative(c)
    return _amax(c.conn("chern").gamma - cx.chern_explicit_field(c.fb))


@_check("chern.equals_first_canonical_iff", "nabla0 = nabla^c iff the second Nijenhuis tensor vanishes")
def _(c):
    _needs_negative(c)
    diff = _amax(c.conn("chern").gamma - c.conn("first_canonical").gamma)
    return _bicond(diff, _amax(c.Nt), c.tol, "coincide", "differ")


# ---- skew torsion

@_check("skew.existence_criterion", "skew existence residual matches 2((D_X J)JY + (D_JX J)Y) = N")
def _(c):
    p1, p2 = c.blocks
    lhs = cx.skew_existence_field(c.fb)
    rhs = np.max(np.abs(c.N - 2 * (p1 + p2)), axis=(1, 2, 3))
    return _amax(lhs - rhs)


@_check("skew.totally_skew_torsion", "skew connection has totally skew torsion")
def _(c):
    _needs_skew(c)
    t = cx.torsion_field(cx.connection_field(c.skew_frames, "skew", tol=c.tol))
    tl = cx.lower_first(c.skew_frames.g, t)
    return max(antisymmetry_residual(TensorValue("lll", x)) for x in tl)


@_check("skew.natural", "skew connection is natural")
def _(c):
    _needs_skew(c)
    rj, rg = cx.naturality_field(cx.connection_field(c.skew_frames, "skew", tol=c.tol))
    return max(_amax(rj), _amax(rg))


@_check("skew.potential_half_torsion", "S = T/2 for the skew connection")
def _(c):
    _needs_skew(c)
    conn = cx.connection_field(c.skew_frames, "skew", tol=c.tol)
    return _amax(cx.potential_field(conn) - 0.5 * cx.torsion_field(conn))


@_check("skew.family_member", "skew connection is canonical(-3) (ae=-1) or canonical(-1) (ae=+1)")
def _(c):
    _needs_skew(c)
    conn = cx.connection_field(c.skew_frames, "skew", tol=c.tol)
    s = -3.0 if c.ae == -1 else -1.0
    return _amax(conn.gamma - cx.connection_field(c.skew_frames, "canonical", s=s).gamma)


@_check("bismut.b_totally_skew", "Bismut tensor B is totally skew when a skew connection exists")
def _(c):
    _needs_negative(c)
    _needs_skew(c)
    b = cx.bismut_b_field(c.skew_frames)
    return max(antisymmetry_residual(TensorValue("lll", x)) for x in b)


# ---- decomposition and base-generic laws

@_check("decompose.sum_and_membership", "S = K + Q with K in A_alpha and Q in L_alpha")
def _(c):
    worst = 0.0
    n = c.fb.dimension
    tensors = [cx.potential_field(k) for k in c.natural_kinds()]
    tensors.append(c.rng.uniform(-1, 1, (len(c.fb), n, n, n)))
    for s in tensors:
        k, q = cx.decompose_kq_field(s, c.fb)
        worst = max(worst, _amax(k + q - s), _amax(c.jy(k) + c.jv(k)), _amax(c.jy(q) - c.jv(q)))
    return worst


@_check("decompose.first_canonical_is_pure_k", "the first canonical potential lies in A_alpha")
def _(c):
    s = cx.potential_field(c.conn("first_canonical"))
    k, q = cx.decompose_kq_field(s, c.fb)
    return max(_amax(k - s), _amax(q))


@_check("decompose.canonical_affine", "K part constant and Q part affine along the canonical family")
def _(c):
    parts = {s: cx.decompose_kq_field(cx.potential_field(c.conn("canonical", s)), c.fb) for s in (0.0, 1.0, 3.0)}
    k0, q0 = parts[0.0]
    k1, q1 = parts[1.0]
    k3, q3 = parts[3.0]
    return max(_amax(k1 - k0), _amax(k3 - k0), _amax(q3 - (q0 + 3 * (q1 - q0))))


@_check("decompose.reconstruction", "nabla0 + Q is J-natural for every Q in L_alpha")
def _(c):
    n = c.fb.dimension
    raw = c.rng.uniform(-1, 1, (len(c.fb), n, n, n))
    _, q = cx.decompose_kq_field(raw, c.fb)
    gamma = c.conn("first_canonical").gamma + q
    return _amax(cx.nabla_j_field(cx.ConnectionField("custom", gamma, c.fb)))


@_check("base.levi_civita_reproduces", "base laws on the Levi-Civita connection give nabla0, nabla^kn, nabla^y")
def _(c):
    lc = c.fb.gamma_g
    return max(_amax(c.conn("base0", base=lc).gamma - c.conn("first_canonical").gamma),
               _amax(c.conn("base1", base=lc).gamma - c.conn("kobayashi_nomizu").gamma),
               _amax(c.conn("base_yano", base=lc).gamma - c.conn("yano").gamma))


@_check("base.generic_laws", "nabla0 and nabla1 of a random torsion-free base are J-natural; (-alpha) N = 4 T1; T^y = (alpha/4) N")
def _(c):
    n = c.fb.dimension
    raw = c.rng.uniform(-1, 1, (len(c.fb), n, n, n))
    base = 0.5 * (raw + _swap(raw))
    b0, b1, by = (c.conn(k, base=base) for k in ("base0", "base1", "base_yano"))
    return max(_amax(cx.nabla_j_field(b0)), _amax(cx.nabla_j_field(b1)),
               _amax(-c.a * c.N - 4 * cx.torsion_field(b1)),
               _amax(cx.torsion_field(by) - 0.25 * c.a * c.N))


# ---- Kahler collapse and classification

@_check("kahler.collapse", "Kahler type iff all named connections coincide with Levi-Civita")
def _(c):
    kahler = _amax(c.D)
    kinds = ["levi_civita", "first_canonical", "kobayashi_nomizu", "yano", "well_adapted"]
    if c.ae == -1:
        kinds += ["chern", "bismut"]
    gammas = [c.conn(k).gamma for k in kinds]
    if bool(np.all(c.skew_mask)):
        gammas.append(c.conn("skew").gamma)
    spread = max(_amax(g - gammas[0]) for g in gammas)
    return _bicond(kahler, spread, c.tol, "Kahler, collapse", "not Kahler, distinct")


@_check("classify.implications", "Kahler => quasi-Kahler and integrable; nearly => quasi; quasi and integrable => Kahler")
def _(c):
    report = classify_frames(c.fb, c.tol)
    violations = report.violations()
    note = "; ".join(violations) if violations else None
    return float(len(violations)), note


@_check("classify.quasi_kahler_equivalence", "quasi-Kahler condition iff the second Nijenhuis tensor vanishes")
def _(c):
    report = classify_frames(c.fb, c.tol)
    qk = report["quasi_kahler"]
    return _bicond(qk.max_residual, qk.cross_check, c.tol, "quasi-Kahler", "not quasi-Kahler")


@_check("classify.integrability_equivalence", "nabla^g J integrability condition iff N = 0")
def _(c):
    report = classify_frames(c.fb, c.tol)
    it = report["integrable"]
    return _bicond(it.cross_check, it.max_residual, c.tol, "integrable", "non-integrable")


CHECK_IDS = tuple(sorted(ch.check_id for ch in CHECKS))


# ------------------------------------------------------------------ suite

def run_suite(spec: ManifoldSpec, samples: int = 64, tol: float = 1e-8,
              s_values: Iterable[float] = DEFAULT_S_VALUES) -> list[CheckReport]:
    """Run every registered check; results are ordered by check id."""
    config = SuiteConfig(samples, tol, tuple(float(s) for s in s_values))
    ctx = _Context(spec, config)
    reports = []
    for ch in sorted(CHECKS, key=lambda c: c.check_id):
        check_tol, note = config.tol, None
        try:
            out = ch.func(ctx)
        except _Skip as skip:
            reports.append(CheckReport(ch.check_id, ch.paper_ref, spec.name, config.samples, None,
                                       check_tol, "skipped", reason=str(skip)))
            continue
        residual = out
        if isinstance(out, tuple):
            residual, extra = out
            if isinstance(extra, float):
                check_tol = extra
            else:
                note = extra
        residual = float(residual)
        status = "pass" if residual < check_tol else "fail"
        reports.append(CheckReport(ch.check_id, ch.paper_ref, spec.name, config.samples, residual,
                                   check_tol, status, note=note))
    return reports


# ------------------------------------------------------------------ rendering

def _num(x: float | None) -> str:
    if x is None:
        return "null"
    return format(float(x), ".17g") if np.isfinite(x) else json.dumps(str(x))


def report_to_dict(r: CheckReport) -> dict:
    return {
        "check_id": r.check_id,
        "paper_ref": r.paper_ref,
        "spec": r.spec_name,
        "samples": r.samples,
        "max_residual": r.max_residual,
        "tol": r.tol,
        "status": r.status,
    }


def _json_line(r: CheckReport) -> str:
    d = report_to_dict(r)
    parts = []
    for key, value in d.items():
        if key in ("max_residual", "tol"):
            text = _num(value)
        else:
            text = json.dumps(value)
        parts.append(f"{json.dumps(key)}: {text}")
    return "{" + ", ".join(parts) + "}"


def render_report(reports: Iterable[CheckReport], fmt: str = "text") -> bytes:
    """Serialize reports as a JSON array (17 significant digits) or text lines (6 digits)."""
    reports = list(reports)
    if fmt == "json":
        if not reports:
            return b"[]"
        body = ",\n  ".join(_json_line(r) for r in reports)
        return ("[\n  " + body + "\n]\n").encode()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = []
    for r in reports:
        if r.status == "skipped":
            lines.append(f"SKIP {r.check_id} ({r.reason})")
        else:
            lines.append(f"{r.status.upper()} {r.check_id} max_residual={r.max_residual:.6g} ({r.paper_ref})")
    return ("\n".join(lines) + "\n").encode() if lines else b""
