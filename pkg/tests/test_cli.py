import json
from importlib import resources

import jsonschema
import pytest

from jetspencer.catalog import CATALOG
from jetspencer.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def schema():
    return json.loads(resources.files("jetspencer").joinpath("report.schema.json").read_text())


def test_analyze_laplace_json(capsys):
    code, out, _ = run(capsys, "analyze", "--catalog", "laplace", "--max-order", "6", "--format", "json")
    r = json.loads(out)
    assert code == 0
    assert r["involutivityDegree"] == "3" and r["hilbertPolynomial"] == "2"
    assert r["spencerTable"][2] == ["0", "1", "0"]


def test_analyze_cr_text(capsys):
    code, out, _ = run(capsys, "analyze", "--catalog", "cauchy_riemann")
    assert code == 0
    assert "involutivity degree:  2" in out
    assert "cartan characters:    2, 0" in out


def test_analyze_missing_file(capsys):
    code, _, err = run(capsys, "analyze", "missing.pde")
    assert code == 1 and "cannot read missing.pde" in err


def test_analyze_parse_error(tmp_path, capsys):
    p = tmp_path / "bad.pde"
    p.write_text("independent x\ndependent u\neq: D[u,x]*D[u,x] = 0\n")
    code, _, err = run(capsys, "analyze", str(p))
    assert code == 1 and "line 3" in err


def test_analyze_file_and_candidates(tmp_path, capsys):
    s = tmp_path / "two.pde"
    s.write_text("system two\nindependent x,y\ndependent u,v,a,b\n"
                 "eq: D[u,x]-D[v,y]=0\neq: D[u,y]+D[v,x]=0\n"
                 "eq: D[a,x]-D[b,y]=0\neq: D[a,y]+D[b,x]=0\n")
    c = tmp_path / "cr.pde"
    c.write_text("system block\nindependent x,y\ndependent u,v\neq: D[u,x]-D[v,y]=0\neq: D[u,y]+D[v,x]=0\n")
    code, out, _ = run(capsys, "analyze", str(s), "--candidates", str(c), "--format", "json", "--degree", "4")
    r = json.loads(out)
    assert code == 0
    v = r["stabilityVerdict"]
    assert v["semistable"] and not v["stable"] and v["witnesses"][0]["outcome"] == "Equal"
    assert r["bundleSlope"] == "1/4"


def test_rejected_candidate(tmp_path, capsys):
    c = tmp_path / "c.pde"
    c.write_text("independent x,y\ndependent u\neq: D[u,x]=0\n")
    code, _, err = run(capsys, "analyze", "--catalog", "laplace", "--candidates", str(c))
    assert code == 1 and "candidate" in err


def test_window_retry_and_exit_code(capsys):
    # window 3 fails, the retry at 6 succeeds
    code, out, _ = run(capsys, "analyze", "--catalog", "laplace", "--max-order", "3", "--format", "json")
    assert code == 0 and json.loads(out)["qmax"] == "6"
    # window 2 and its retry at 4 both end inside the confirmation band
    code, _, err = run(capsys, "analyze", "--catalog", "laplace", "--max-order", "2")
    assert code == 2 and "not stabilized" in err


def test_sweeney(capsys):
    assert run(capsys, "sweeney", "0", "7", "1")[1] == "0\n"
    assert run(capsys, "sweeney", "1", "1", "1")[1] == "2\n"
    assert run(capsys, "sweeney", "1", "1", "2")[1] == "4\n"
    assert run(capsys, "sweeney", "1", "0", "2")[0] == 1


@pytest.mark.parametrize("lines, expected", [
    ("1\n", ["D-stable", "ideal: (xi)", "colength: 1"]),
    ("1\nz\n", ["D-stable", "ideal: (xi^2)", "colength: 2"]),
    ("z\n", ["not D-stable"]),
])
def test_punctual(tmp_path, capsys, lines, expected):
    p = tmp_path / "v.txt"
    p.write_text(lines)
    code, out, _ = run(capsys, "punctual", str(p))
    assert code == 0
    for e in expected:
        assert e in out.splitlines()


def test_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog-list")
    assert code == 0
    names = [ln.split()[0].split(":")[0] for ln in out.splitlines()]
    assert set(CATALOG) <= set(names)


@pytest.mark.parametrize("name", list(CATALOG) + ["burgers", "flat_connection"])
def test_json_reports_validate(capsys, schema, name):
    code, out, _ = run(capsys, "analyze", "--catalog", name, "--format", "json", "--restrict")
    assert code == 0
    jsonschema.validate(json.loads(out), schema)


def test_text_and_json_agree(capsys):
    _, js, _ = run(capsys, "analyze", "--catalog", "closed_one_form", "--format", "json")
    _, txt, _ = run(capsys, "analyze", "--catalog", "closed_one_form")
    r = json.loads(js)
    for key in ("hilbertPolynomial", "reducedPolynomial", "slope", "involutivityDegree"):
        assert r[key] in txt
    assert ", ".join(r["cartanCharacters"]) in txt
