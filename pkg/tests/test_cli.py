"""Command-line contract: exit codes, report schema, CSV shape, determinism."""
import json
import re

import numpy as np
import pytest

from extkit import cli

STATE_Q1 = "0.6,0.4,0.9,-0.7"


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list_exits_clean(capsys):
    code, out, _ = run(["list"], capsys)
    assert code == 0
    assert "quartic1" in out and "euler_top" in out


def test_show_unknown_entry_is_config_error(capsys):
    code, _, err = run(["show", "--system", "nope"], capsys)
    assert code == 2
    assert "nope" in err


def test_check_pde_passes_and_reports_schema(capsys):
    code, out, _ = run(["check-pde", "--system", "quartic1",
                        "--samples", "20", "--seed", "3"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"command", "config_echo", "metrics", "gates",
                        "skipped_points"}
    assert doc["command"] == "check-pde"
    gate = doc["gates"][0]
    assert set(gate) == {"name", "value", "tol", "pass"}
    assert gate["pass"] is True


def test_check_pde_without_seed_is_config_error(capsys):
    code, _, err = run(["check-pde", "--system", "lotka_volterra"], capsys)
    assert code == 2
    assert "no seed solution" in err


def test_check_pde_gate_failure_exits_one(capsys):
    # wrong constant on purpose; failing report must name the worst point
    code, out, _ = run(["check-pde", "--system", "quartic1", "--c0", "1.4",
                        "--samples", "20", "--seed", "3"], capsys)
    assert code == 1
    doc = json.loads(out)
    assert doc["gates"][0]["pass"] is False
    assert "worst_point" in doc["metrics"]
    assert doc["metrics"]["max_residual"] > 1e-7


def test_float_formatting_17_digits(tmp_path, capsys):
    rpt = tmp_path / "r.json"
    code, _, _ = run(["check-pde", "--system", "quartic1", "--samples", "10",
                      "--seed", "3", "--report", str(rpt)], capsys)
    assert code == 0
    text = rpt.read_text()
    m = re.search(r'"max_residual": ([-0-9.eE+]+)', text)
    assert m is not None
    v = float(m.group(1))
    assert f"{v:.17g}" == m.group(1)


def test_reports_are_byte_identical(tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    args = ["check-pde", "--system", "quartic2a", "--samples", "25", "--seed", "11"]
    assert cli.main(args + ["--report", str(a)]) == 0
    assert cli.main(args + ["--report", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"system": "quartic1",
                               "sampling": {"coutn": 5}}))
    code, _, err = run(["check-pde", "--config", str(cfg)], capsys)
    assert code == 2
    assert "coutn" in err


def test_unknown_config_section_rejected(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"system": "quartic1", "sampler": {}}))
    code, _, err = run(["check-pde", "--config", str(cfg)], capsys)
    assert code == 2
    assert "sampler" in err


def test_env_seed_overrides_config(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"system": "quartic1",
                               "sampling": {"count": 10, "seed": 1}}))
    monkeypatch.setenv("EXTKIT_SEED", "77")
    code, out, _ = run(["check-pde", "--config", str(cfg)], capsys)
    assert code == 0
    assert json.loads(out)["config_echo"]["sampling"]["seed"] == 77


def test_flag_beats_env_seed(capsys, monkeypatch):
    monkeypatch.setenv("EXTKIT_SEED", "77")
    code, out, _ = run(["check-pde", "--system", "quartic1", "--samples", "10",
                        "--seed", "5"], capsys)
    assert code == 0
    assert json.loads(out)["config_echo"]["sampling"]["seed"] == 5


def test_extend_reports_values(capsys):
    code, out, _ = run(["extend", "--system", "quartic1", "--c", "1",
                        "--c0", "1", "--C", "1", "--m", "1", "--n", "1",
                        "--state", STATE_Q1, "--samples", "5", "--seed", "2"],
                       capsys)
    assert code == 0
    doc = json.loads(out)
    assert "H" in doc["metrics"] and "K" in doc["metrics"]


def test_extend_requires_full_parameter_set(capsys):
    code, _, err = run(["extend", "--system", "quartic1", "--c", "1",
                        "--state", STATE_Q1], capsys)
    assert code == 2
    assert "required" in err


def test_integrate_writes_contract_csv(tmp_path, capsys):
    csv = tmp_path / "t.csv"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "system": "vortex_opposite",
        "extension": {"c": 0.0, "c0": 0.5, "C": 1.0, "m": 1, "n": 1},
        "initial_state": {"u": 0.7, "p_u": 0.3, "base": [0.8, -0.4, 0.5, 0.9]},
        "integration": {"t_final": 1.0, "dt": 0.001, "stride": 100},
    }))
    code, _, _ = run(["integrate", "--config", str(cfg), "--csv", str(csv)],
                     capsys)
    assert code == 0
    lines = csv.read_text().split("\n")
    assert lines[0] == "t,u,p_u,X1t,Y1t,X2t,Y2t,H,L,K_re,K_im"
    row = lines[1].split(",")
    assert len(row) == 11
    float(row[0])  # plain decimal point parses
    assert ";" not in lines[1]


def test_integrate_base_flow_only(tmp_path, capsys):
    csv = tmp_path / "lv.csv"
    code, out, _ = run(["integrate", "--system", "lotka_volterra",
                        "--base-only", "--state", "1.2,0.8",
                        "--t-final", "1", "--drift-tol", "1e-8",
                        "--csv", str(csv)], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["metrics"]["drifts"]["L"] <= 1e-8
    assert csv.read_text().split("\n")[0] == "t,x,y,L"


def test_integrate_drift_gate_failure(capsys):
    # coarse step on purpose
    code, out, _ = run(["integrate", "--system", "quartic1", "--c", "1",
                        "--c0", "1", "--C", "1", "--m", "1", "--n", "1",
                        "--state", STATE_Q1, "--t-final", "10",
                        "--dt", "0.25", "--drift-tol", "1e-12"], capsys)
    assert code == 1
    doc = json.loads(out)
    assert any(not g["pass"] for g in doc["gates"])


def test_bracket_gate(capsys):
    code, out, _ = run(["bracket", "--system", "quartic1", "--c", "1",
                        "--c0", "1", "--C", "1", "--m", "2", "--n", "1",
                        "--samples", "8", "--seed", "4"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["metrics"]["bracket_max_normalized"] <= 1e-5


def test_rank_expectation_gate(capsys):
    args = ["rank", "--system", "quartic1", "--c", "1", "--c0", "1",
            "--C", "1", "--m", "1", "--n", "1", "--samples", "6",
            "--seed", "8", "--fields", "H,K,L"]
    code, out, _ = run(args + ["--expect", "3"], capsys)
    assert code == 0
    code, out, _ = run(args + ["--expect", "4"], capsys)
    assert code == 1


def test_rank_unknown_field_rejected(capsys):
    code, _, err = run(["rank", "--system", "quartic1", "--c", "1",
                        "--c0", "1", "--C", "1", "--m", "1", "--n", "1",
                        "--fields", "H,Q9"], capsys)
    assert code == 2
    assert "Q9" in err


def test_gn_compare_documented_invocation(capsys):
    code, out, _ = run(["gn-compare", "--n-max", "8", "--samples", "200",
                        "--seed", "7"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["gates"][0]["name"] == "recursion_max_rel"
    assert doc["metrics"]["max_rel_err"] <= 1e-10


def test_invalid_extension_numbers_are_config_errors(capsys):
    code, _, err = run(["extend", "--system", "quartic1", "--c", "0",
                        "--c0", "0", "--C", "1", "--m", "1", "--n", "1",
                        "--state", STATE_Q1], capsys)
    assert code == 2
    assert err.startswith("error:")
