import csv

import numpy as np

from cbshell.benchmarks import experiment1
from cbshell.mesh import TimeControls
from cbshell.output import format_table, snapshot_writer, write_probes_csv, write_report_csv, write_vtk
from cbshell.solver import initial_state, run


def test_probe_csv(tmp_path):
    model = experiment1("1x1")
    res = run(model, TimeControls(max_steps=5))
    path = tmp_path / "p.csv"
    write_probes_csv(path, res)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["step", "time", "center_w"]
    assert len(rows) == 7
    assert float(rows[-1][2]) == res.probe("center_w")[-1]  # full precision round trip


def test_vtk_layout(tmp_path):
    model = experiment1("2x2")
    st = initial_state(model)
    st.x = st.x + np.array([0.0, 0.0, 1e-3])
    path = tmp_path / "s.vtk"
    write_vtk(path, model, st)
    lines = path.read_text().splitlines()
    assert lines[0] == "# vtk DataFile Version 3.0"
    assert "DATASET UNSTRUCTURED_GRID" in lines
    i = lines.index(f"CELLS {model.nelements} {10 * model.nelements}")
    assert lines[i + 1].split()[0] == "9"
    j = lines.index(f"CELL_TYPES {model.nelements}")
    assert set(lines[j + 1:j + 1 + model.nelements]) == {"28"}
    k = lines.index("SCALARS displacement_magnitude double 1")
    assert float(lines[k + 2]) == 1e-3
    assert "SCALARS thickness double 1" in lines


def test_snapshots_written_on_cadence(tmp_path):
    model = experiment1("1x1")
    run(model, TimeControls(max_steps=6, snapshot_every=3), snapshot=snapshot_writer(model, tmp_path))
    assert sorted(p.name for p in tmp_path.iterdir()) == ["snap_000003.vtk", "snap_000006.vtk"]


def test_report_table_and_csv(tmp_path):
    rows = [{"a": 1, "b": 0.5}, {"a": 22, "b": 1 / 3}]
    text = format_table(rows, ["a", "b"])
    assert text.splitlines()[0].split() == ["a", "b"]
    assert "0.333333" in text
    write_report_csv(tmp_path / "r.csv", rows)
    back = list(csv.DictReader((tmp_path / "r.csv").open()))
    assert float(back[1]["b"]) == 1 / 3
