import json
import subprocess
import sys

import pytest

from ellint import cli


def run_cli(*args):
    return cli.main(list(args))


def test_list(capsys):
    assert run_cli("--list") == 0
    out = capsys.readouterr().out
    assert "beta" in out and "ybe" in out


def test_help_exits_zero():
    assert run_cli("--help") == 0


def test_beta_seed_seven(tmp_path):
    out = tmp_path / "beta.json"
    assert run_cli("--suite", "beta", "--seed", "7", "--out", str(out)) == 0
    report = json.loads(out.read_text())
    assert len(report["records"]) == 1
    assert report["records"][0]["seed"] == 7
    assert all(g["pass"] for g in report["gates"].values())
    lines = out.with_suffix(".csv").read_text().splitlines()
    assert lines[0] == "identity_id,seed,residual,tolerance,pass,N,runtime_ms"
    assert len(lines) == 2


def test_csv_is_byte_identical_across_runs(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run_cli("--suite", "beta,discrete", "--seed", "0x2a", "--draws", "2", "--out", str(p)) == 0
    assert a.with_suffix(".csv").read_bytes() == b.with_suffix(".csv").read_bytes()


@pytest.mark.parametrize("args", [
    ("--suite", "nope"),
    ("--regime", "Sideways"),
    ("--suite", "beta", "--grid", "48"),
    ("--suite", "beta", "--tol", "-1"),
    ("--suite", "beta", "--moduli", "0.5,0.1"),
    ("--suite", "beta", "--draws", "0"),
    ("--config", "/nonexistent/config.json"),
])
def test_bad_configuration_exit_code(args):
    assert run_cli(*args) == 2


def test_failing_record_exit_code(tmp_path):
    assert run_cli("--suite", "beta", "--tol", "1e-30") == 1


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"suite": "beta", "seed": "0x10", "draws": 2, "tol": {"beta": 1e-7}}))
    parsed = cli.config_from_args(cli.build_parser().parse_args(["--config", str(cfg), "--seed", "5"]))
    assert parsed.suites == ["beta"]
    assert parsed.seed == 5
    assert parsed.draws == 2
    assert parsed.tol == {"beta": 1e-7}


def test_per_suite_overrides():
    args = cli.build_parser().parse_args(["--tol", "beta=1e-9,rll=1e-5", "--grid", "64", "--suite", "all"])
    cfg = cli.config_from_args(args)
    assert cfg.tol == {"beta": 1e-9, "rll": 1e-5}
    assert cfg.grid == {"*": 64}
    assert cfg.suites[0] == "appendix" and len(cfg.suites) > 10


def test_empty_report(tmp_path):
    path, csv_path = cli.emit_report([], tmp_path / "empty.json")
    assert json.loads(path.read_text())["records"] == []
    assert csv_path.read_text() == "identity_id,seed,residual,tolerance,pass,N,runtime_ms\n"


def test_three_records_three_lines():
    recs = [{"identity_id": f"x{k}", "seed": k, "residual": 1e-12 * k, "tolerance": 1e-8, "pass": True,
             "N_used": 64, "runtime_ms": 17} for k in range(3)]
    lines = cli.csv_text(recs).splitlines()
    assert len(lines) == 4
    assert lines[1].endswith(",0")
    assert cli.csv_text(recs, timing=True).splitlines()[1].endswith(",17")


def test_gate_failure_forces_record_failure(monkeypatch):
    failing = lambda: cli.perm_engine.GateResult(False, [("forced", False)])
    monkeypatch.setitem(cli.perm_engine.GATES, "RLL", failing)
    cfg = cli.RunConfig(suites=["r_cross"]).validate()
    gates, records = cli.run(cfg)
    assert not gates["RLL"]["pass"]
    assert records and all(not r["pass"] and r["gate_failed"] == "RLL" for r in records)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ellint", "--list"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "appendix" in res.stdout
