import json
import subprocess
import sys

import pytest

from crmw import battery
from crmw.cli import main

FIX = {name: str(battery.shipped_fixture_path(name)) for name in battery.shipped_fixture_names()}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, json.loads(out), err


def test_build_then_verify(capsys, tmp_path):
    eq = tmp_path / "eq.json"
    code, rep, _ = run(capsys, "build", "--model", FIX["light_cone"], "--out", str(eq))
    assert code == 0 and rep["verdict"] is True
    assert json.loads(eq.read_text())["kind"] == "equation"
    code, rep, err = run(capsys, "verify-rank", "--eq", str(eq))
    assert code == 0 and rep["failure"] is None
    assert set(rep) == {"command", "inputs", "verdict", "result", "failure"}
    assert "PASS" in err


def test_verify_rank_hand_broken(capsys):
    code, rep, err = run(capsys, "verify-rank", "--eq", FIX["hand_broken"])
    assert code == 1 and rep["verdict"] is False
    assert rep["failure"]["monomial"] == [0, 0, 0, 0]
    assert "FAIL" in err


def test_verify_rank_from_model(capsys):
    code, rep, _ = run(capsys, "verify-rank", "--model", FIX["mixed_s3"], "--order", "4")
    assert code == 0 and rep["result"]["checked_order"] == 2


@pytest.mark.parametrize("argv", [
    ["verify-rank", "--eq", "x.json", "--bogus"],
    ["frobnicate"],
    [],
    ["build", "--model", "x.json", "--order", "-1"],
    ["build", "--model", "x.json", "--order", "six"],
])
def test_bad_command_lines(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    assert code == 2
    assert json.loads(out)["failure"]["input_error"]
    assert "input error" in err


def test_malformed_json_position(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"H": [1,\n  ]}')
    code, rep, _ = run(capsys, "verify-rank", "--eq", str(p))
    assert code == 2
    assert "line 2 column 3" in rep["failure"]["input_error"]


def test_schema_error_path(capsys, tmp_path):
    obj = json.loads(open(FIX["scaling_m1"]).read())
    obj["S"][0][0]["terms"][0]["c"] = "1/2+i"
    p = tmp_path / "m.json"
    p.write_text(json.dumps(obj))
    code, rep, _ = run(capsys, "build", "--model", str(p))
    assert code == 2
    assert "S[0][0].terms[0].c" in rep["failure"]["input_error"]


def test_missing_input_file(capsys, tmp_path):
    code, rep, _ = run(capsys, "build", "--model", str(tmp_path / "nope.json"))
    assert code == 2


def test_realizable_verdicts(capsys):
    assert run(capsys, "realizable", "--symbol", FIX["symbol_diag"])[0] == 0
    code, rep, _ = run(capsys, "realizable", "--symbol", FIX["symbol_e12"])
    assert code == 1 and rep["failure"]["condition"] == 1


def test_realize_symbol_symmetries(capsys, tmp_path):
    m = tmp_path / "m.json"
    assert run(capsys, "realize", "--symbol", FIX["symbol_diag"], "--order", "5", "--out", str(m))[0] == 0
    code, rep, _ = run(capsys, "symbol", "--model", str(m), "--foc", "--order", "5")
    assert code == 0 and rep["result"]["foc"]["constant_to_first_order"]
    x = tmp_path / "x.json"
    x.write_text('{"s": 2, "L": [["0", "0"], ["0", "1i"]]}')
    code, rep, _ = run(capsys, "symmetries", "--model", str(m), "--order", "5", "--check",
                       "--symbol", FIX["symbol_diag"], "--isotropy", str(x))
    assert code == 0
    assert all(v["passed"] for v in rep["result"]["tangency"].values())
    assert "isotropy" in rep["result"]["fields"]


def test_isotropy_precondition_is_input_error(capsys, tmp_path):
    x = tmp_path / "x.json"
    x.write_text('{"s": 2, "L": [["1i", "0"], ["0", "0"]]}')
    code, _, _ = run(capsys, "symmetries", "--model", FIX["pseudoconvex_s2"], "--order", "3",
                     "--symbol", FIX["symbol_diag"], "--isotropy", str(x))
    assert code == 2


def test_realize_unrealizable(capsys):
    code, rep, _ = run(capsys, "realize", "--symbol", FIX["symbol_e12"])
    assert code == 1 and "not realizable" in rep["failure"]["reason"]


def test_symbol_foc_failure(capsys):
    code, rep, _ = run(capsys, "symbol", "--model", FIX["pseudoconvex_s2"], "--order", "4", "--foc")
    assert code == 1 and rep["failure"]["obstructions"]
    assert run(capsys, "symbol", "--model", FIX["pseudoconvex_s2"], "--order", "4")[0] == 0


def test_normalize(capsys, tmp_path):
    out = tmp_path / "nf.json"
    code, rep, _ = run(capsys, "normalize", "--model", FIX["pivot_pair"], "--out", str(out))
    assert code == 0 and rep["result"]["pivot"] == [[1, 1], [1, 2]]
    code, rep, _ = run(capsys, "normalize", "--eq", FIX["nonnormalized_s2"])
    assert code == 0 and rep["result"]["holomorphic_terms_removed"]


def test_equiv(capsys):
    args = ["equiv", "--m1", FIX["scaling_m1"], "--m2", FIX["scaling_m2"]]
    code, rep, _ = run(capsys, *args, "--witness", FIX["scaling_witness"])
    assert code == 0 and set(rep["inputs"]) == {"m1", "m2", "witness"}
    code, rep, _ = run(capsys, "equiv", "--m1", FIX["scaling_m2"], "--m2", FIX["scaling_m1"],
                       "--witness", FIX["scaling_witness"])
    assert code == 1


def test_report_deterministic(capsys):
    argv = ["symmetries", "--model", FIX["indefinite_s2"], "--order", "4", "--check"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def _config(tmp_path, obj):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(obj))
    return str(p)


def test_battery_empty_config(capsys, tmp_path):
    code, rep, err = run(capsys, "battery", "--config", _config(tmp_path, {}))
    assert code == 0 and rep["verdict"] is True
    assert "warning" in err and rep["warnings"]


def test_battery_missing_fixture(capsys, tmp_path):
    cfg = _config(tmp_path, {"fixtures": ["scaling_m1", "scaling_m2"], "criteria": [10]})
    code, rep, _ = run(capsys, "battery", "--config", cfg)
    assert code == 2 and "scaling_witness" in rep["failure"]["input_error"]
    cfg = _config(tmp_path, {"fixtures": {"scaling_m1": "gone.json"}})
    assert run(capsys, "battery", "--config", cfg)[0] == 2


def test_battery_corrupted_fixture(capsys, tmp_path):
    broken = tmp_path / "w.json"
    broken.write_text(open(FIX["scaling_witness"]).read()[:40])
    cfg = _config(tmp_path, {"fixtures": {"scaling_m1": FIX["scaling_m1"], "scaling_m2": FIX["scaling_m2"],
                                          "scaling_witness": "w.json"}})
    code, rep, _ = run(capsys, "battery", "--config", cfg)
    assert code == 1 and rep["failure"]["fixture"] == "scaling_witness"


def test_battery_wrong_fixture_fails_criterion(capsys, tmp_path):
    obj = json.loads(open(FIX["scaling_witness"]).read())
    obj["U"] = [["3"]]
    (tmp_path / "w.json").write_text(json.dumps(obj))
    cfg = _config(tmp_path, {"fixtures": {"scaling_m1": FIX["scaling_m1"], "scaling_m2": FIX["scaling_m2"],
                                          "scaling_witness": "w.json"}})
    code, rep, _ = run(capsys, "battery", "--config", cfg)
    assert code == 1 and rep["failure"]["criterion"] == 10


def test_battery_subset_deterministic(capsys, tmp_path, monkeypatch):
    cfg = _config(tmp_path, {"fixtures": ["symbol_diag", "symbol_e12", "pivot_s1", "pivot_offdiag",
                                          "pivot_pair"], "criteria": [6, 9]})
    main(["battery", "--config", cfg])
    first = capsys.readouterr().out
    monkeypatch.setenv("CRMW_THREADS", "4")
    main(["battery", "--config", cfg])
    assert capsys.readouterr().out == first
    assert json.loads(first)["verdict"] is True


def test_battery_config_schema(capsys, tmp_path):
    assert run(capsys, "battery", "--config", _config(tmp_path, {"criteria": [13]}))[0] == 2
    assert run(capsys, "battery", "--config", _config(tmp_path, {"fixtures": 3}))[0] == 2
    assert run(capsys, "battery", "--config", _config(tmp_path, {"orders": 6}))[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "crmw", "realizable", "--symbol", FIX["symbol_zero"]],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] is True


def test_battery_order_ignored_with_warning(capsys, tmp_path):
    code, rep, _ = run(capsys, "battery", "--config", _config(tmp_path, {}), "--order", "3")
    assert code == 0 and any("--order" in w for w in rep["warnings"])
