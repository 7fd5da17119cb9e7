import json
import subprocess
import sys

import pytest

from aestruct.cli import run_command
from aestruct.catalog import catalog_names

from helpers import diag, make_spec
from aestruct.structure import dump_spec


def run(*argv):
    code, out, err = run_command(list(argv))
    return code, out.decode(), err.decode()


@pytest.fixture
def emitted(tmp_path):
    code, out, _ = run("catalog", "--emit", str(tmp_path))
    assert code == 0
    return tmp_path


def test_catalog_lists_and_emits(emitted):
    code, out, _ = run("catalog")
    assert code == 0
    assert [line.split("\t")[0] for line in out.splitlines()] == catalog_names()
    assert sorted(p.stem for p in emitted.glob("*.json")) == sorted(catalog_names())


def test_check_flat_kahler_json(emitted):
    code, out, _ = run("check", str(emitted / "flat_kahler.json"), "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data and all(item["status"] == "pass" for item in data)


def test_chern_on_positive_signature(emitted):
    code, out, err = run("connection", str(emitted / "flat_norden.json"), "--point", "0,0", "--kind", "chern")
    assert code == 2
    assert out == ""
    assert "Chern connection undefined for alpha*epsilon=+1" in err


def test_eval_nabla_j_norden2d(emitted):
    code, out, _ = run("eval", str(emitted / "norden2d.json"), "--point", "0,0", "--what", "nablaJ")
    assert code == 0
    assert out.splitlines() == ["nablaJ^1_{21} = 2", "nablaJ^2_{22} = -2"]


def test_eval_json(emitted):
    code, out, _ = run("eval", "hermitian4d", "--point", "0,0,0,0", "--what", "nijenhuis", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["valence"] == "ull"
    assert data["components"][0][0][2] == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("what", ["christoffel", "nablaJ", "phi", "nablaPhi", "nijenhuis", "second-nijenhuis"])
def test_eval_every_quantity(what):
    code, out, _ = run("eval", "para4d", "--point", "0.1,0.2,0.3,0.4", "--what", what)
    assert code == 0 and out


@pytest.mark.parametrize("show", ["gamma", "torsion", "potential", "naturality", "f-tensor"])
@pytest.mark.parametrize("kind", ["levi-civita", "first-canonical", "kobayashi-nomizu", "yano", "chern",
                                  "well-adapted", "bismut"])
def test_connection_shows(kind, show):
    code, out, _ = run("connection", "hermitian4d", "--point", "0.1,0,0,0.2", "--kind", kind, "--show", show)
    assert code == 0 and out


def test_connection_canonical_naturality():
    code, out, _ = run("connection", "norden4d", "--point", "0,0,0,0", "--kind", "canonical", "--s", "2",
                       "--show", "naturality", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["nabla_J_residual"] < 1e-8 and data["nabla_g_residual"] < 1e-8


@pytest.mark.parametrize("argv", [
    ["connection", "norden2d", "--point", "0,0", "--kind", "yano", "--s", "1"],
    ["connection", "norden2d", "--point", "0,0", "--kind", "canonical"],
    ["eval", "norden2d", "--point", "0", "--what", "phi"],
    ["eval", "norden2d", "--point", "a,b", "--what", "phi"],
    ["eval", "norden2d", "--point", "0,0", "--what", "curvature"],
    ["eval", "no_such_spec", "--point", "0,0", "--what", "phi"],
    ["check", "norden2d", "--samples", "0"],
    ["frobnicate"],
    [],
])
def test_usage_errors(argv):
    code, out, err = run(*argv)
    assert code == 2
    assert err


def test_skew_nonexistence_exit_one():
    code, _, err = run("connection", "hermitian4d", "--point", "0,0,0,0", "--kind", "skew")
    assert code == 1 and "totally skew" in err


def test_malformed_spec_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "x"}')
    code, _, err = run("validate", str(bad))
    assert code == 2 and "missing" in err


def test_validate_failure_exit_one(tmp_path):
    spec = make_spec("bad", -1, 1, diag("1", "2"), [["0", "-1"], ["1", "0"]])
    path = tmp_path / "bad.json"
    path.write_text(dump_spec(spec))
    code, out, _ = run("validate", str(path))
    assert code == 1 and "FAIL" in out


def test_degenerate_point_exit_one(tmp_path):
    spec = make_spec("deg", 1, 1, diag("x1", "x1"), [["1", "0"], ["0", "-1"]])
    path = tmp_path / "deg.json"
    path.write_text(dump_spec(spec))
    code, _, err = run("eval", str(path), "--point", "0,0", "--what", "christoffel")
    assert code == 1 and "degenerate" in err


def test_classify_output():
    code, out, _ = run("classify", "hermitian4d", "--samples", "8")
    assert code == 0
    assert "integrable: fails" in out
    code, out, _ = run("classify", "norden2d", "--samples", "8", "--format", "json")
    data = json.loads(out)
    nk = [p for p in data["predicates"] if p["name"] == "nearly_kahler"][0]
    assert nk["verdict"] is None


def test_check_output_file_and_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("check", "para4d", "--format", "json", "--samples", "8", "--output", str(a))[0] == 0
    assert run("check", "para4d", "--format", "json", "--samples", "8", "--output", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())


def test_seed_override(monkeypatch):
    base = run("check", "hermitian4d", "--format", "json", "--samples", "4")[1]
    monkeypatch.setenv("AESTRUCT_SEED", "7")
    seeded = run("check", "hermitian4d", "--format", "json", "--samples", "4")[1]
    assert seeded != base
    assert run("check", "hermitian4d", "--format", "json", "--samples", "4", "--seed", "7")[1] == seeded
    monkeypatch.setenv("AESTRUCT_SEED", "-3")
    code, out, err = run("check", "hermitian4d", "--format", "json", "--samples", "4")
    assert out == base and "ignoring" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "aestruct.cli", "eval", "norden2d", "--point", "0,0",
                           "--what", "nablaJ"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "nablaJ^1_{21} = 2" in proc.stdout
