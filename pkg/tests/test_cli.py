import io
import json

import jsonschema
import pytest

from longknots.cli import main


def run(*args):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(args), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def schema(repo_root, name):
    return json.loads((repo_root / "docs" / "schemas" / f"{name}.schema.json").read_text())


def test_e2_json(repo_root):
    code, out, _ = run("e2", "--d", "4", "--pmax", "3")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema(repo_root, "e2"))
    cells = {(e["p"], e["q"]): e["dim"] for e in doc["entries"]}
    assert cells[(0, 0)] == 1 and cells[(2, 3)] == 1


def test_e2_csv():
    code, out, _ = run("e2", "--d", "4", "--pmax", "3", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "p,q,dim,provisional"


def test_e2_modular_marker(repo_root):
    code, out, _ = run("e2", "--d", "4", "--pmax", "7", "--prime-policy", "two-prime")
    doc = json.loads(out)
    jsonschema.validate(doc, schema(repo_root, "e2"))
    provs = {(e["p"], e["q"]): e["provenance"] for e in doc["entries"]}
    assert provs[(7, 6)] == "modular" and provs[(0, 0)] == "exact"


def test_bad_d():
    code, _, err = run("e2", "--d", "2")
    assert code == 2 and "d" in err and ">= 3" in err


def test_bad_flag():
    code, _, _ = run("e2", "--bogus")
    assert code == 2


def test_resource_ceiling():
    code, _, err = run("e2", "--d", "4", "--pmax", "20")
    assert code == 3 and "ceiling" in err
    code, _, _ = run("fans", "--n", "9")
    assert code == 3


def test_knots(repo_root):
    code, out, _ = run("knots", "--d", "4", "--pmax", "5")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema(repo_root, "knots"))
    rows = {r["degree"]: r for r in doc["rows"]}
    assert (rows[0]["emb_bar"], rows[0]["emb"]) == (1, 1)
    assert (rows[1]["emb_bar"], rows[1]["emb"]) == (1, 0)


def test_knots_refuses_d3():
    code, _, err = run("knots", "--d", "3")
    assert code == 2 and "converge" in err


def test_normalized_e1(repo_root):
    code, out, _ = run("normalized-e1", "--d", "4", "--pmax", "4")
    doc = json.loads(out)
    jsonschema.validate(doc, schema(repo_root, "normalized-e1"))
    assert doc["above_diagonal"]


def test_parity(repo_root):
    code, out, _ = run("parity", "--d", "3", "--pmax", "4")
    assert code == 0
    jsonschema.validate(json.loads(out), schema(repo_root, "check-report"))


def test_fans(repo_root):
    code, out, _ = run("fans", "--n", "2")
    doc = json.loads(out)
    jsonschema.validate(doc, schema(repo_root, "fans"))
    assert doc["count"] == 13


def test_graphcx(repo_root):
    code, out, _ = run("graphcx", "--n", "3", "--d", "5", "--qmax", "5")
    doc = json.loads(out)
    jsonschema.validate(doc, schema(repo_root, "graphcx"))
    assert doc["matches_conf"] and doc["closed_window"] == 8
    code, _, _ = run("graphcx", "--n", "3", "--d", "4", "--qmax", "3", "--degree-max", "9")
    assert code == 3


@pytest.mark.parametrize("cmd", ["fanic-verify", "limp-compare"])
def test_reports(repo_root, cmd):
    code, out, _ = run(cmd, "--d", "4", "--n", "2")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema(repo_root, "check-report"))
    assert doc["passed"]


def test_verify_fans(repo_root):
    code, out, _ = run("verify", "fans", "--n", "2")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema(repo_root, "verify"))
    counts = [c for c in doc["results"][0]["checks"] if c["name"] == "|Phi[2]|"]
    assert counts[0]["details"]["count"] == 13


def test_verify_hochschild():
    code, out, _ = run("verify", "hochschild", "--d", "4", "--pmax", "5")
    assert code == 0
    names = [c["name"] for c in json.loads(out)["results"][0]["checks"]]
    assert "parity d=4 vs d=6" in names and "above diagonal d=4" in names


def test_verify_deterministic():
    a = run("verify", "all", "--quick", "--seed", "7")
    b = run("verify", "all", "--quick", "--seed", "7")
    assert a[0] == 0 and a == b


def test_text_output():
    code, out, _ = run("knots", "--d", "4", "--format", "text")
    assert code == 0 and out.split()[:3] == ["degree", "emb_bar", "emb"]
