import filecmp
import json
import subprocess
import sys

import pytest

from ndevoi import cli
from ndevoi.verification import Check

RUNS = [
    ("pod", "hypothetical"),
    ("roc", "hypothetical"),
    ("roc", "halfcell"),
    ("decide", "hypothetical"),
    ("decide", "halfcell"),
    ("expdesign", "hypothetical"),
    ("twostep", "halfcell"),
]


@pytest.mark.parametrize("command, scenario", RUNS)
def test_outputs_are_byte_identical_across_runs(command, scenario, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main([command, "--scenario", scenario, "--out", str(a)]) == 0
    assert cli.main([command, "--scenario", scenario, "--out", str(b)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names and names == sorted(p.name for p in b.iterdir())
    _, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    assert not mismatch and not errors
    assert not any(p.name.startswith(".") for p in a.iterdir())  # no stray temp files


def test_expected_files(tmp_path, capsys):
    cli.main(["decide", "--scenario", "halfcell", "--out", str(tmp_path)])
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["model3_binary_condition"]["expected_cost"] == pytest.approx(1.4, abs=0.05)
    header = (tmp_path / "sweep_model4.csv").read_text().splitlines()[0]
    assert header.startswith("s_th,cost")


@pytest.mark.parametrize(
    "argv",
    [
        ["pod", "--scenario", "halfcell"],  # PoD curves need a base model
        ["twostep", "--scenario", "hypothetical"],  # no two-step block
        ["verify", "--scenario", "no-such-scenario"],
        ["decide", "--scenario", "hypothetical", "--xth", "-3"],
        ["decide", "--scenario", "hypothetical", "--grid", "1"],
    ],
)
def test_config_errors_exit_2(argv, tmp_path, capsys):
    assert cli.main(argv + ["--out", str(tmp_path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_malformed_json_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"name": "x", "c_F_money": "lots"}')
    assert cli.main(["decide", "--scenario", str(cfg), "--out", str(tmp_path)]) == 2


def test_failed_verification_exits_1(monkeypatch, capsys):
    impossible = Check(id="x", criterion=1, scenario="hypothetical", quantity="prior.C0", expected=123.0,
                       abs_tol=0.0, rel_tol=0.0)
    monkeypatch.setattr(cli, "load_manifest", lambda: [impossible])
    assert cli.main(["verify", "--scenario", "hypothetical"]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out and "0/1 checks passed" in out


def test_verify_without_checks_exits_1(tmp_path, capsys):
    cli.main(["export", "--scenario", "halfcell", "--out", str(tmp_path)])
    path = tmp_path / "halfcell.json"
    raw = json.loads(path.read_text())
    raw["name"] = "renamed"
    path.write_text(json.dumps(raw))
    assert cli.main(["verify", "--scenario", str(path)]) == 1


def test_export_reload_verify(tmp_path, capsys):
    assert cli.main(["export", "--scenario", "halfcell", "--out", str(tmp_path)]) == 0
    assert cli.main(["verify", "--scenario", str(tmp_path / "halfcell.json"), "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "verify_halfcell.txt").read_text().splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ndevoi", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "verify" in proc.stdout
