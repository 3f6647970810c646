"""Command-line front end.

Exit codes: 0 on success, 1 for invalid input (parse or validation
errors), 2 when the integration diverges or the state degenerates.
"""

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import benchmarks
from .errors import ParseError, ShellError, UnknownExperiment, ValidationError
from .mesh import load_model, save_model
from .output import format_table, snapshot_writer, write_probes_csv, write_report_csv
from .solver import Assembler, run

EXIT_OK, EXIT_INVALID, EXIT_DIVERGED = 0, 1, 2


def _controls(model, args):
    changes = {}
    for flag, key in (("dt_safety", "dt_safety"), ("max_steps", "max_steps"), ("damping", "damping"),
                      ("snapshot_every", "snapshot_every"), ("dt", "dt"), ("t_end", "t_end")):
        value = getattr(args, flag, None)
        if value is not None:
            changes[key] = value
    return replace(model.time, **changes)


def cmd_run(args):
    try:
        model = load_model(args.config)
        controls = _controls(model, args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = model.with_(time=controls)
    start = time.perf_counter()
    try:
        if args.static:
            sol = benchmarks.solve_static(model, dt_safety=controls.dt_safety, max_steps=controls.max_steps,
                                          dt_reeval_every=controls.dt_reeval_every)
            result = sol.result
        elif args.peak:
            if not model.probes:
                print("error: --peak needs at least one probe", file=sys.stderr)
                return EXIT_INVALID
            sol, _ = benchmarks.solve_first_peak(model, model.probes[0].name, dt_safety=controls.dt_safety)
            result = sol.result
        else:
            snap = snapshot_writer(model, out) if controls.snapshot_every else None
            result = run(model, controls, assembler=Assembler(model), snapshot=snap)
    except ShellError as exc:
        step = getattr(exc, "step", None)
        where = f" at step {step}" if step is not None else ""
        print(f"diverged{where}: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    write_probes_csv(out / "probes.csv", result)
    st = result.state
    print(f"steps {st.step}  time {st.time:.6g}  loops {result.loops}  "
          f"dt {min(result.dt_history):.6g}..{max(result.dt_history):.6g}  "
          f"stop {result.stop_reason}  wall {time.perf_counter() - start:.2f}s")
    for name, hist in result.probes.items():
        if args.peak:
            k = int(np.argmax(np.abs(hist)))
            print(f"{name}: peak {hist[k]:.9g} at step {int(result.steps[k])}")
        else:
            print(f"{name}: {hist[-1]:.9g}")
    return EXIT_OK


def cmd_benchmark(args):
    rows = []
    for exp in args.experiments:
        try:
            kw = {}
            if args.nu is not None:
                if exp != 6:
                    raise ValidationError("--nu applies to experiment 6 only")
                kw["nu"] = args.nu
            if args.peak:
                if exp != 1:
                    raise ValidationError("--peak is available for experiment 1")
                kw["protocol"] = "peak"
            rows += benchmarks.run_benchmark(exp, args.mesh, **kw)
        except (UnknownExperiment, ValidationError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
        except ShellError as exc:
            print(f"diverged: {exc}", file=sys.stderr)
            return EXIT_DIVERGED
    cols = ["benchmark", "case", "quantity", "numerical", "oracle", "error_percent", "dt_min", "steps", "loops"]
    print(format_table([r.to_dict() for r in rows], cols))
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_report_csv(out / "report.csv", rows)
    return EXIT_OK


def cmd_dt_report(args):
    try:
        model = load_model(args.config)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    rows = benchmarks.dt_report(model)
    c = model.material.wave_speed()
    kind = "plane-strain dilatational" if model.material.normal == "zero_strain" else "plane-stress dilatational"
    print(f"# classical step = shortest element edge / c, c = {c:.6g} ({kind} wave speed)")
    print(format_table(rows, ["element", "dt_eig", "dt_classical", "ratio"]))
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_report_csv(out / "dt_report.csv", rows)
    return EXIT_OK


def cmd_generate(args):
    try:
        model = benchmarks.generate_benchmark_mesh(args.experiment, args.mesh)
    except (UnknownExperiment, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    save_model(model, args.output)
    print(f"wrote {args.output}: {model.nnodes} nodes, {model.nelements} elements")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="cbshell", description="Explicit 9-node thick shell solver")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="integrate a model file")
    r.add_argument("config")
    r.add_argument("--dt-safety", type=float)
    r.add_argument("--max-steps", type=int)
    r.add_argument("--damping", type=float)
    r.add_argument("--snapshot-every", type=int)
    r.add_argument("--dt", type=float, help="fixed step overriding the stable estimate")
    r.add_argument("--t-end", type=float)
    r.add_argument("--out-dir", default=".")
    mode = r.add_mutually_exclusive_group()
    mode.add_argument("--static", action="store_true", help="dynamic relaxation to the static limit")
    mode.add_argument("--peak", action="store_true", help="undamped run to the first peak")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("benchmark", help="run benchmark experiments against their oracles")
    b.add_argument("experiments", nargs="+", type=int)
    b.add_argument("--mesh", help="refinement MxN (mesh name for experiment 3)")
    b.add_argument("--nu", type=float, help="Poisson ratio override (experiment 6)")
    b.add_argument("--peak", action="store_true", help="report the undamped first peak (experiment 1)")
    b.add_argument("--out-dir")
    b.set_defaults(func=cmd_benchmark)

    d = sub.add_parser("dt-report", help="eigenvalue vs length/wave-speed time steps")
    d.add_argument("config")
    d.add_argument("--out-dir")
    d.set_defaults(func=cmd_dt_report)

    g = sub.add_parser("generate", help="write a benchmark model file")
    g.add_argument("experiment", type=int)
    g.add_argument("--mesh")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
