import pytest

from aestruct.catalog import catalog_names, catalog_spec
from aestruct.classify import PREDICATES, ClassificationReport, _consistency, classify, classify_frames
from aestruct.structure import frames_at, sample_points

from helpers import EXTRA_SPECS, conformal_hermitian, conformal_norden, conformal_para, rotating_product

ALL_SPECS = [catalog_spec(n) for n in catalog_names()] + [f() for f in EXTRA_SPECS]


@pytest.mark.parametrize("spec", ALL_SPECS, ids=[s.name for s in ALL_SPECS])
def test_lattice_and_cross_checks(spec):
    rep = classify(spec, samples=32)
    assert rep.violations() == []
    qk = rep["quasi_kahler"]
    assert (qk.max_residual < rep.tol) == (qk.cross_check < rep.tol)
    it = rep["integrable"]
    assert (it.max_residual < rep.tol) == (it.cross_check < rep.tol)
    assert [r.name for r in rep.results] == list(PREDICATES)
    assert all(r.samples == 32 for r in rep.results)


def test_flat_kahler_all_hold_with_zero_residuals():
    rep = classify(catalog_spec("flat_kahler"))
    for r in rep.results:
        assert r.verdict is True
        assert r.max_residual == 0.0


def test_hermitian2d_is_kahler():
    rep = classify(catalog_spec("hermitian2d"))
    assert rep.verdict("kahler") is True


def test_hermitian4d_not_integrable():
    rep = classify(catalog_spec("hermitian4d"))
    assert rep.verdict("integrable") is False
    assert rep.verdict("kahler") is False
    assert rep["integrable"].max_residual >= 1.0


@pytest.mark.parametrize("name", ["flat_norden", "flat_product", "norden2d", "norden4d", "product4d"])
def test_nearly_kahler_not_applicable_for_positive_signature(name):
    rep = classify(catalog_spec(name), samples=8)
    nk = rep["nearly_kahler"]
    assert nk.verdict is None and nk.max_residual is None


@pytest.mark.parametrize("make, expected", [
    (conformal_hermitian, {"kahler": False, "quasi_kahler": False, "integrable": True, "admits_skew_connection": True}),
    (conformal_para, {"kahler": False, "quasi_kahler": False, "integrable": True, "admits_skew_connection": True}),
    (conformal_norden, {"kahler": False, "quasi_kahler": False, "integrable": True, "admits_skew_connection": False}),
    (rotating_product, {"kahler": False, "quasi_kahler": False, "integrable": False, "admits_skew_connection": False}),
])
def test_extra_specs(make, expected):
    rep = classify(make(), samples=16)
    for name, verdict in expected.items():
        assert rep.verdict(name) is verdict, name


def test_consistency_detects_contradictions():
    # hand-built verdicts that break each implication
    def report(**v):
        return _consistency(v)

    assert report(kahler=True, quasi_kahler=False, nearly_kahler=False, integrable=True, admits_skew_connection=True)
    assert report(kahler=False, quasi_kahler=False, nearly_kahler=True, integrable=False, admits_skew_connection=True)
    assert report(kahler=False, quasi_kahler=True, nearly_kahler=False, integrable=True, admits_skew_connection=True)
    assert not report(kahler=True, quasi_kahler=True, nearly_kahler=True, integrable=True, admits_skew_connection=True)


def test_to_dict_and_lookup():
    spec = catalog_spec("para4d")
    rep = classify_frames(frames_at(spec, sample_points(spec, 4)), 1e-8, spec.name)
    assert isinstance(rep, ClassificationReport)
    d = rep.to_dict()
    assert d["spec"] == "para4d" and len(d["predicates"]) == len(PREDICATES)
    with pytest.raises(KeyError):
        rep["hyperkahler"]
