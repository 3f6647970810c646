import json

import pytest

from cbshell.cli import main


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "plate.json"
    assert main(["generate", "1", "--mesh", "1x1", "-o", str(path)]) == 0
    return path


def test_run_writes_probes_and_snapshots(config, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["run", str(config), "--max-steps", "20", "--snapshot-every", "10", "--out-dir", str(out)])
    assert code == 0
    assert (out / "probes.csv").read_text().startswith("step,time,center_w")
    assert (out / "snap_000020.vtk").exists()
    assert "center_w" in capsys.readouterr().out


def test_invalid_poisson_ratio_exit_1(config, tmp_path, capsys):
    doc = json.loads(config.read_text())
    doc["material"]["nu"] = 0.6
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert main(["run", str(bad), "--out-dir", str(tmp_path)]) == 1
    assert "nu" in capsys.readouterr().err


def test_malformed_file_exit_1(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["run", str(bad)]) == 1
    assert main(["dt-report", str(bad)]) == 1


def test_divergence_exit_2(config, tmp_path, capsys):
    code = main(["run", str(config), "--dt", "1e-4", "--max-steps", "200", "--out-dir", str(tmp_path)])
    assert code == 2
    assert "diverged" in capsys.readouterr().err


def test_static_mode(config, tmp_path, capsys):
    assert main(["run", str(config), "--static", "--out-dir", str(tmp_path)]) == 0
    assert "stop relaxed" in capsys.readouterr().out


def test_dt_report(config, capsys):
    assert main(["dt-report", str(config)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("# classical step") and "wave speed" in out[0]
    assert out[1].split() == ["element", "dt_eig", "dt_classical", "ratio"]
    assert len(out) == 3


def test_benchmark_report(tmp_path, capsys):
    assert main(["benchmark", "1", "--mesh", "1x1", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "report.csv").read_text().startswith("benchmark,case,quantity")
    assert "experiment1" in capsys.readouterr().out
    assert main(["benchmark", "9"]) == 1
    assert main(["benchmark", "2", "--nu", "0.3"]) == 1
