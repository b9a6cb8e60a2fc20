import json
from pathlib import Path

import pytest

import dgmoduli
from dgmoduli.cli import main

DATA = Path(dgmoduli.__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out) if out.strip() else None


def test_certify(capsys):
    code, d = run_json(capsys, "certify", DATA / "a2.json")
    assert code == 0
    assert d["saturated"] is True and d["smooth"]["resolution_length"] == 1
    code, d = run_json(capsys, "certify", DATA / "dual_numbers.json")
    assert code == 0 and d["smooth"]["verdict"] == "no"


def test_hochschild(capsys):
    code, d = run_json(capsys, "hochschild", DATA / "dual_numbers.json", "--window", 0, 3)
    assert code == 0
    assert d["hochschild"] == {"0": 2, "1": 1, "2": 1, "3": 1}


def test_integer_commands(capsys):
    code, d = run_json(capsys, "amplitude", DATA / "times2.json")
    assert code == 0 and d["bracket"] == [-1, 0]
    code, d = run_json(capsys, "support", DATA / "times2.json")
    assert d["support"] == {"primes": [2], "generic": False}
    code, d = run_json(capsys, "peel", DATA / "times2.json")
    assert code == 0 and d["steps"] == 1


def test_enumerate_and_count(capsys, tmp_path):
    code, d = run_json(capsys, "enumerate", DATA / "a2_bare.json", "--q", 2, "--window", 0, 0, "--caps", "1,1")
    assert code == 0 and d["count"] == 5
    code, d = run_json(capsys, "count", DATA / "point.json", "--q", 3, "--nu", "0:2")
    assert d["count"] == "73/48" or d["count"] == str(dgmoduli.moduli.gl_closed_form(2, 3))
    code, d = run_json(capsys, "enumerate", DATA / "a2_bare.json", "--q", 2, "--window", -1, 0, "--caps", "1,1")
    table = tmp_path / "table.json"
    table.write_text(json.dumps(d))
    code, c = run_json(capsys, "count", table)
    assert code == 0 and c["classes"] == 25 and c["count"] == d["stacky_count"]


def test_enumerate_csv(capsys):
    code, out, _ = run(capsys, "enumerate", DATA / "point.json", "--q", 2, "--nu", "0:1", "--csv")
    assert code == 0
    assert len(out.strip().splitlines()) == 3


def test_point_round_trip(capsys, tmp_path):
    code, d = run_json(capsys, "point", DATA / "s_plus_s_shift.json")
    assert code == 0 and d["rigidity_index"] == 2 and d["pi"] == {"1": 1, "2": 1}
    f = tmp_path / "pt.json"
    f.write_text(json.dumps(d))
    code, e = run_json(capsys, "point", f)
    assert e == d


def test_point_with_separate_quiver(capsys, tmp_path):
    c = tmp_path / "s1.json"
    c.write_text(json.dumps({"window": [0, 0], "terms": {"0": {"dims": [1, 0], "arrows": [[]]}}}))
    code, d = run_json(capsys, "point", DATA / "a2_bare.json", c, "--q", 3)
    assert code == 0 and d["aut_order"] == 2 and d["simple"] is True


def test_ext_aut_cells(capsys):
    code, d = run_json(capsys, "ext", DATA / "s_plus_s_shift.json")
    assert code == 0 and d["ext"] == {"-1": 1, "0": 2, "1": 1}
    code, d = run_json(capsys, "aut", DATA / "simple_source.json")
    assert code == 0 and d["aut_order"] == 2
    code, d = run_json(capsys, "cells", DATA / "simple_source.json")
    assert code == 0


def test_morita_and_bimodules(capsys):
    code, d = run_json(capsys, "morita", DATA / "a2.json", DATA / "simple_source.json",
                       "--generator", DATA / "generator_12.json", "--q", 3)
    assert code == 0 and d["target_dim"] == 7 and d["ext_agree"]
    # a2.json is over F5 while the complex is over F3
    code, _, _ = run(capsys, "morita", DATA / "a2.json", DATA / "simple_source.json",
                     "--generator", DATA / "generator_12.json")
    assert code == 2
    code, d = run_json(capsys, "bimod-equiv", DATA / "a2.json")
    assert code == 0 and d["equivalence"] is True
    code, d = run_json(capsys, "bimod-equiv", DATA / "two_points.json", DATA / "swap.json")
    assert d["equivalence"] is True
    code, d = run_json(capsys, "bimod-equiv", DATA / "a2.json", DATA / "doubled.json")
    assert d["equivalence"] is False


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "certify", tmp_path / "missing.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[")
    assert run(capsys, "certify", bad)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "aut", DATA / "eps_simple.json")[0] == 4
    assert run(capsys, "enumerate", DATA / "point.json", "--q", 0, "--nu", "0:1")[0] == 3
    assert run(capsys, "enumerate", DATA / "a2_bare.json", "--q", 2, "--window", 0, 0, "--caps", "5,5", "--bound", 100)[0] == 3


def test_output_is_deterministic(capsys):
    a = run(capsys, "enumerate", DATA / "a2_bare.json", "--q", 2, "--window", -1, 0, "--caps", "1,1", "--json")
    b = run(capsys, "enumerate", DATA / "a2_bare.json", "--q", 2, "--window", -1, 0, "--caps", "1,1", "--json")
    assert a == b
    h = run(capsys, "certify", DATA / "a2.json")
    assert h[0] == 0 and "saturated: true" in h[1]


def test_empty_scenario_passes(capsys, tmp_path):
    f = tmp_path / "s.json"
    f.write_text(json.dumps({"scenarios": []}))
    code, d = run_json(capsys, "scenario", f)
    assert code == 0 and d["scenarios"] == 0 and d["failed"] == []


def test_scenario_diffs(capsys, tmp_path):
    s = {"scenarios": [
        {"name": "ok", "subcommand": "amplitude", "inputs": [str(DATA / "times2.json")],
         "expected": {"bracket": [-1, 0]}},
        {"name": "wrong", "subcommand": "amplitude", "inputs": [str(DATA / "times2.json")],
         "expected": {"bracket": [0, 0]}},
    ]}
    f = tmp_path / "s.json"
    f.write_text(json.dumps(s))
    code, d = run_json(capsys, "scenario", f)
    assert code == 1
    assert d["passed"] == 1 and d["failed"] == ["wrong"]


def test_scenario_with_corrupt_expected_file(capsys, tmp_path):
    exp = tmp_path / "exp.json"
    exp.write_text("{oops")
    s = {"scenarios": [{"name": "x", "subcommand": "amplitude", "inputs": [str(DATA / "times2.json")],
                        "expected": str(exp)}]}
    f = tmp_path / "s.json"
    f.write_text(json.dumps(s))
    assert run(capsys, "scenario", f)[0] == 2
