import json
import re
import subprocess
import sys
from pathlib import Path

import pytest

from atlas.cli import SCHEMA_VERSION, main

CLI_FIXTURES = Path(__file__).parent.parent / "fixtures" / "cli"


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("ATLAS_CONFIG", raising=False)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_split_identity(capsys):
    code, report = run_json(capsys, "split", CLI_FIXTURES / "identity.json")
    assert code == 0
    assert report["splitting_type"] == [0, 0] and report["verified"]
    assert report["schema_version"] == SCHEMA_VERSION


def test_classify_a0_times_a1_onto_a1(capsys):
    code, report = run_json(capsys, "classify", CLI_FIXTURES / "a0xa1_p2.json")
    assert code == 0
    assert report["relatively_maximal"] is False
    assert "a0-times-a1-onto-a1" in report["reasons"]
    assert report["witness_path"] and not report["witness_path"][-1]["conjugates_full_group"]


def test_rr_p_plus_q(capsys):
    code, report = run_json(capsys, "rr", "p+q")
    assert code == 0 and report["dimension"] == 2 and len(report["basis"]) == 2
    code, report = run_json(capsys, "rr", "4p")
    assert report["dimension"] == 4


def test_divisor_report(capsys):
    code, report = run_json(capsys, "divisor", "p - q")
    assert code == 0 and report["degree"] == 0 and report["principal"] is False
    code, report = run_json(capsys, "divisor", "p + q - q - p")
    assert report["principal"] is True


def test_normalize_reports_invariants(capsys):
    code, report = run_json(capsys, "normalize", CLI_FIXTURES / "indec_b2.json")
    assert code == 0
    assert report["descriptor"]["family"] == "IndecCP1"
    assert report["invariants"]["b"] == 2 and report["invariants"]["base"] == {"kind": "TrivialCP1"}


def test_links_and_witness_flag(capsys, tmp_path):
    desc = tmp_path / "a1_trivial.json"
    desc.write_text(json.dumps({"family": "Dec", "base": "A1", "b": 2, "D": {"degree": -1, "cl0": [0, 0, 0]}}))
    code, _, err = run(capsys, "links", desc)
    assert code == 2 and "SideConditionViolated" in err
    code, report = run_json(capsys, "links", desc, "--witness")
    assert code == 0 and [r["selector"] for r in report["links"]] == ["omega-S0"]


def test_orbit_dot_and_json(capsys):
    desc = CLI_FIXTURES / "sl_times_a1_onto_a1.json"
    code, report = run_json(capsys, "orbit", desc, "--bound", 2)
    assert code == 0 and len(report["nodes"]) == 5
    assert report["dot"].startswith("digraph orbit {")
    code, out, _ = run(capsys, "orbit", desc, "--bound", 1, "--format", "dot")
    assert out.startswith("digraph orbit {") and len(re.findall(r"n\d+ -> n\d+", out)) == 2


def test_exit_codes(capsys, tmp_path):
    code, report = run_json(capsys, "classify", CLI_FIXTURES / "dec_trivial_b1.json", "--field", "bir_maximality")
    assert code == 4 and report["bir_maximality"] == "Open"
    code, _ = run_json(capsys, "classify", CLI_FIXTURES / "dec_trivial_b1.json")
    assert code == 0
    code, _, err = run(capsys, "classify", CLI_FIXTURES / "a0xa1_p2.json", "--genus", 2)
    assert code == 3 and "OutOfUniverse" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "classify", bad)[0] == 2
    assert run(capsys, "classify", tmp_path / "missing.json")[0] == 2
    assert run(capsys, "rr", "p + k")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_config_search_order(capsys, tmp_path, monkeypatch):
    # ./atlas.json, then $ATLAS_CONFIG overriding it, then --config overriding both
    (tmp_path / "atlas.json").write_text(json.dumps({"curve": {"p": 101, "a": 1, "b": 3}, "format": "text"}))
    code, out, _ = run(capsys, "rr", "p")
    assert out.startswith("schema_version: 1.0")
    env_cfg = tmp_path / "env.json"
    env_cfg.write_text(json.dumps({"format": "json", "named_points": {"p": "O"}}))
    monkeypatch.setenv("ATLAS_CONFIG", str(env_cfg))
    code, report = run_json(capsys, "rr", "p")
    assert report["divisor"] == "O"
    explicit = tmp_path / "explicit.json"
    explicit.write_text(json.dumps({"format": "text"}))
    code, out, _ = run(capsys, "--config", explicit, "rr", "p")
    assert out.startswith("schema_version")
    code, out, _ = run(capsys, "--config", explicit, "rr", "p", "--format", "json")
    assert json.loads(out)["dimension"] == 1


def test_malformed_config(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"format": "yaml"}))
    assert run(capsys, "--config", cfg, "rr", "p")[0] == 2


def test_output_is_byte_identical_across_runs():
    cmd = [sys.executable, "-m", "atlas", "classify", str(CLI_FIXTURES / "sl_times_a1_onto_a1.json")]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and b'"schema_version": "1.0"' in first
