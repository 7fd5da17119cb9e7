import json
import re

import pytest

from aestruct.catalog import catalog_names, catalog_spec
from aestruct.verify import CHECK_IDS, CheckReport, render_report, run_suite

from helpers import EXTRA_SPECS, diag, make_spec

ALL_SPECS = [catalog_spec(n) for n in catalog_names()] + [f() for f in EXTRA_SPECS]

DOCUMENTED_CHECKS = {
    "base.generic_laws", "base.levi_civita_reproduces", "bismut.b_totally_skew", "canonical.affine_line",
    "canonical.natural", "canonical.s0_is_first_canonical", "chern.equals_first_canonical_iff",
    "chern.explicit_formula", "chern.torsion_law", "classify.implications", "classify.integrability_equivalence",
    "classify.quasi_kahler_equivalence", "decompose.canonical_affine", "decompose.first_canonical_is_pure_k",
    "decompose.reconstruction", "decompose.sum_and_membership", "first_canonical.f_tensor",
    "first_canonical.integrability_biconditional", "first_canonical.natural", "first_canonical.torsion_formula",
    "first_canonical.torsion_j_minus", "first_canonical.torsion_j_plus", "kahler.collapse",
    "kobayashi_nomizu.natural_iff_quasi_kahler", "kobayashi_nomizu.torsion", "levi_civita.metric",
    "levi_civita.symmetric", "nabla_g_J.anticommutes_with_J", "nabla_g_J.jz_variant_a", "nabla_g_J.jz_variant_b",
    "nabla_g_J.metric_symmetry", "natural.nijenhuis_from_torsion", "natural.potential_from_torsion",
    "natural.potential_laws", "nijenhuis.antisymmetric", "nijenhuis.bracket_oracle", "nijenhuis.j_invariance",
    "nijenhuis.j_shift", "nijenhuis.metric_j", "phi.ae_symmetry", "second_nijenhuis.j_invariance",
    "second_nijenhuis.j_shift", "second_nijenhuis.symmetry", "skew.existence_criterion", "skew.family_member",
    "skew.natural", "skew.potential_half_torsion", "skew.totally_skew_torsion",
    "well_adapted.equals_first_canonical_iff", "well_adapted.f_vanishes", "yano.adapted_iff_integrable",
    "yano.kn_difference", "yano.potential_metric_part", "yano.torsion",
}
SIGNATURE_GATED = {"chern.equals_first_canonical_iff", "chern.explicit_formula", "chern.torsion_law",
                   "bismut.b_totally_skew"}
SKEW_GATED = {"skew.family_member", "skew.natural", "skew.potential_half_torsion", "skew.totally_skew_torsion",
              "bismut.b_totally_skew"}


def test_check_catalog_is_pinned():
    assert set(CHECK_IDS) == DOCUMENTED_CHECKS
    assert list(CHECK_IDS) == sorted(CHECK_IDS)


@pytest.mark.parametrize("spec", ALL_SPECS, ids=[s.name for s in ALL_SPECS])
def test_suite_passes(spec):
    reports = run_suite(spec, samples=24)
    assert [r.check_id for r in reports] == list(CHECK_IDS)
    failed = [(r.check_id, r.max_residual, r.note) for r in reports if r.status == "fail"]
    assert failed == []
    for r in reports:
        if r.status == "skipped":
            assert r.max_residual is None and r.reason
            assert r.check_id in SIGNATURE_GATED | SKEW_GATED
            if r.check_id in SIGNATURE_GATED - SKEW_GATED:
                assert spec.ae == 1
        elif r.check_id in SIGNATURE_GATED - SKEW_GATED:
            assert spec.ae == -1


def test_biconditional_nonzero_branch_on_hermitian4d():
    reports = {r.check_id: r for r in run_suite(catalog_spec("hermitian4d"), samples=16)}
    r = reports["first_canonical.integrability_biconditional"]
    assert r.status == "pass" and r.max_residual == 0.0
    assert r.note.startswith("both sides nonzero")


def test_suite_detects_broken_structure():
    broken = make_spec("broken", -1, 1, diag("1", "(1 + x1)^2"), [["0", "-(1 + x2)"], ["1/(1 + x1)", "0"]])
    reports = run_suite(broken, samples=8)
    assert any(r.status == "fail" for r in reports)


def test_json_rendering():
    reports = run_suite(catalog_spec("norden2d"), samples=8)
    text = render_report(reports, "json")
    data = json.loads(text)
    assert len(data) == len(reports)
    for item, r in zip(data, reports):
        assert set(item) == {"check_id", "paper_ref", "spec", "samples", "max_residual", "tol", "status"}
        assert item["max_residual"] == r.max_residual
        assert item["status"] in ("pass", "fail", "skipped")
    assert render_report([], "json") == b"[]"


def test_json_uses_17_digits():
    r = CheckReport("x.y", "ref", "spec", 3, 0.1 + 0.2, 1e-8, "pass")
    text = render_report([r], "json").decode()
    assert "0.30000000000000004" in text
    assert json.loads(text)[0]["max_residual"] == 0.1 + 0.2


def test_text_rendering():
    r = CheckReport("a.b", "some identity", "s", 1, 1.2345678e-12, 1e-8, "pass")
    f = CheckReport("c.d", "other", "s", 1, 0.5, 1e-8, "fail")
    k = CheckReport("e.f", "gated", "s", 1, None, 1e-8, "skipped", reason="alpha*epsilon=+1")
    lines = render_report([r, f, k], "text").decode().splitlines()
    assert lines[0] == "PASS a.b max_residual=1.23457e-12 (some identity)"
    assert lines[1] == "FAIL c.d max_residual=0.5 (other)"
    assert lines[2] == "SKIP e.f (alpha*epsilon=+1)"
    with pytest.raises(ValueError):
        render_report([r], "xml")


def test_rendering_deterministic():
    spec = catalog_spec("para4d")
    a = render_report(run_suite(spec, samples=8), "json")
    b = render_report(run_suite(spec, samples=8), "json")
    assert a == b


def test_paper_ref_is_descriptive():
    for r in run_suite(catalog_spec("flat_kahler"), samples=2):
        assert r.paper_ref and not re.search(r"\b(eq|Prop|Lemma|Theorem)\b", r.paper_ref)
