import csv
import io
import json

import pytest

from ymforms.checks import CHECKS, Context, run_checks
from ymforms.cli import main
from ymforms.scenario import ScenarioError, bundled_scenarios, load_scenario, parse_scenario

TWO = [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def write(tmp_path, data, name="s.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def test_bundled_bpst_parses():
    sc = load_scenario("bpst")
    assert sc.builtin == "bpst" and sc.params["mu"] == 1.0 and sc.dim == 2
    assert {"bpst", "eta-potential", "dirac-monopole", "constant"} <= set(bundled_scenarios())


def test_every_bundled_scenario_parses():
    for name in bundled_scenarios():
        assert set(load_scenario(name).checks) <= set(CHECKS)


def test_dimension_mismatch_is_a_schema_error():
    data = {"name": "x", "dim": 2, "connection": {"builtin": "constant", "params": {"A1": [[[1, 0]]], "A2": TWO}}}
    with pytest.raises(ScenarioError) as err:
        parse_scenario(data)
    assert any("A1" in p for p in err.value.problems)


def test_unknown_builtin_lists_known_names():
    with pytest.raises(ScenarioError) as err:
        parse_scenario({"name": "x", "connection": {"builtin": "wormhole"}})
    assert "bpst" in str(err.value) and len(err.value.problems) == 1


def test_all_problems_are_reported_together():
    data = {"name": "x", "dim": 2, "metric": "flat", "trace": "weird", "checks": ["nope"], "seed": -1,
            "connection": {"builtin": "bpst", "params": {"mu": -1}}}
    with pytest.raises(ScenarioError) as err:
        parse_scenario(data)
    assert len(err.value.problems) == 5


def test_custom_connection(tmp_path):
    data = {"name": "poly", "dim": 2, "checks": ["curvature-crosscheck", "bianchi"],
            "connection": {"custom": {"A1": [{"powers": [1, 0, 0, 0], "matrix": TWO}]}}}
    code, text = run("verify", write(tmp_path, data))
    assert code == 0 and "overall: pass" in text


def test_exit_codes(tmp_path):
    assert run("verify", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("verify", str(bad))[0] == 2
    assert run("verify", "dirac-monopole")[0] == 0
    assert run("frobnicate", "bpst")[0] == 2
    assert run("verify", "bpst", "--points", "0")[0] == 2


def test_tampered_potential_fails(tmp_path):
    data = {"name": "tampered", "metric": "minkowski", "checks": ["sd-condition"],
            "connection": {"builtin": "eta-potential",
                           "params": {"A1_shift": [[[0.1, 0], [0, 0]], [[0, 0], [0, 0]]]}}}
    code, text = run("verify", write(tmp_path, data))
    assert code == 1 and "[FAIL] sd-condition" in text


def test_verify_bpst_json_is_deterministic():
    a = run("verify", "bpst", "--json")
    b = run("verify", "bpst", "--json")
    assert a == b and a[0] == 0
    rep = json.loads(a[1])
    assert rep["seed"] == 0 and rep["status"] == "pass"
    names = {c["name"] for c in rep["checks"]}
    assert {"duality", "bianchi", "vacuum", "eb-inner"} <= names


def test_input_error_as_json(tmp_path):
    code, text = run("verify", str(tmp_path / "nope.json"), "--json")
    assert code == 2 and json.loads(text)["status"] == "input-error"


def test_star_table_minkowski_volume():
    code, text = run("star-table", "--metric", "minkowski")
    assert code == 0 and "*(dz1^dz2^dzb1^dzb2) = -4 1" in text


def test_current_csv(capsys):
    code, text = run("current", "constant", "--points", "4")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0 and len(rows) == 4 and "closed_form_gap" in rows[0]


def test_fields_csv_to_file(tmp_path):
    target = tmp_path / "eb.csv"
    code, _ = run("fields", "bpst", "--points", "3", "--output", str(target))
    rows = list(csv.DictReader(target.open()))
    assert code == 0 and len(rows) == 3 and float(rows[0]["EB_re"]) < 0


def test_functional_command():
    code, text = run("functional", "constant", "--radius", "1", "--nodes", "4", "--json")
    rep = json.loads(text)
    assert code == 0 and rep["quadrature"]["radius"] == 1


def test_context_is_seeded():
    sc = load_scenario("constant")
    a = Context(sc).points()
    b = Context(sc).points()
    assert (a[0] == b[0]).all()
    assert run_checks(Context(sc), ["bianchi"]).status == "pass"
