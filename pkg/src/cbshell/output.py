"""CSV histories, benchmark report tables and legacy VTK snapshots."""

import csv
from pathlib import Path

import numpy as np

VTK_BIQUADRATIC_QUAD = 28


def _fmt(x):
    return repr(float(x))


def write_probes_csv(path, result):
    """``step,time,<probe labels>`` with one row per step."""
    names = list(result.probes)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "time", *names])
        for k in range(len(result.times)):
            w.writerow([int(result.steps[k]), _fmt(result.times[k]),
                        *(_fmt(result.probes[n][k]) for n in names)])


def write_report_csv(path, rows):
    rows = [r.to_dict() if hasattr(r, "to_dict") else dict(r) for r in rows]
    if not rows:
        Path(path).write_text("")
        return
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: (_fmt(v) if isinstance(v, float) else v) for k, v in row.items()})


def format_table(rows, columns):
    """Plain fixed-width text table."""
    def cell(v):
        if isinstance(v, float):
            return f"{v:.6g}"
        return str(v)

    body = [[cell(r[c]) for c in columns] for r in rows]
    widths = [max(len(c), *(len(b[i]) for b in body)) if body else len(c) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(wd) for c, wd in zip(columns, widths))]
    lines += ["  ".join(v.ljust(wd) for v, wd in zip(b, widths)) for b in body]
    return "\n".join(lines)


def write_vtk(path, model, state):
    """Legacy ASCII unstructured grid of the current reference surface.

    Each element is one biquadratic quad (VTK type 28, same node order as
    the element). Point data: displacement vector and magnitude, fiber
    length (thickness) and director.
    """
    x = state.x
    disp = x - model.coords
    lines = ["# vtk DataFile Version 3.0", f"cbshell step {state.step} time {state.time!r}",
             "ASCII", "DATASET UNSTRUCTURED_GRID", f"POINTS {len(x)} double"]
    lines += [" ".join(repr(float(v)) for v in p) for p in x]
    ne = model.nelements
    lines.append(f"CELLS {ne} {ne * 10}")
    lines += ["9 " + " ".join(str(int(i)) for i in row) for row in model.conn]
    lines.append(f"CELL_TYPES {ne}")
    lines += [str(VTK_BIQUADRATIC_QUAD)] * ne
    lines.append(f"POINT_DATA {len(x)}")
    lines.append("VECTORS displacement double")
    lines += [" ".join(repr(float(v)) for v in d) for d in disp]
    lines.append("SCALARS displacement_magnitude double 1")
    lines.append("LOOKUP_TABLE default")
    lines += [repr(float(v)) for v in np.linalg.norm(disp, axis=1)]
    lines.append("SCALARS thickness double 1")
    lines.append("LOOKUP_TABLE default")
    lines += [repr(float(v)) for v in state.h]
    lines.append("VECTORS director double")
    lines += [" ".join(repr(float(v)) for v in d) for d in state.d]
    Path(path).write_text("\n".join(lines) + "\n")


def snapshot_writer(model, out_dir):
    out = Path(out_dir)

    def write(state):
        write_vtk(out / f"snap_{state.step:06d}.vtk", model, state)

    return write
