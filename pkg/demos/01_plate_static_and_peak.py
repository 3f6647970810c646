"""Simply supported square plate under uniform pressure.

A quarter of the plate is modelled with 1 and then 2x2 elements. Each mesh
is relaxed to its static limit with mass-proportional damping, and the
undamped first peak is reported too (for a suddenly applied load it should
be close to twice the static value). Run from the repository root:

    python3 demos/01_plate_static_and_peak.py
"""

from cbshell import benchmarks, oracles

cfg = benchmarks.config(1)
w_ref = oracles.plate_center_deflection(cfg["side"], cfg["thickness"], cfg["E"], cfg["nu"], cfg["pressure"])
print(f"Navier series centre deflection: {w_ref:.6e} m")

for mesh in ("1x1", "2x2"):
    static = benchmarks.run_experiment1(mesh)[0]
    peak = benchmarks.run_experiment1(mesh, protocol="peak")[0]
    print(f"{mesh}: static {static.numerical:.6e} ({static.error_percent:+.2f}%, {static.steps} steps)"
          f"   first peak {peak.numerical:.6e} ({peak.error_percent:+.2f}% vs twice the series value)")

# The stable step of a single element is set by its thickness-shear mode,
# not by the edge length: compare with the length over wave speed estimate.
row = benchmarks.dt_report(benchmarks.experiment1("1x1"))[0]
print(f"dt eigenvalue {row['dt_eig']:.3e} s, edge/c {row['dt_classical']:.3e} s, ratio {row['ratio']:.3f}")
