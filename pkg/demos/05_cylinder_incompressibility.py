"""Thick-walled cylinder under internal pressure, plane strain.

Pushing Poisson's ratio towards one half shrinks the stable step by the
ratio of the dilatational wave speeds. With full integration the element
also locks volumetrically; the nu = 0.3 line is a control.
"""

from cbshell import benchmarks

for nu in (0.3, 0.49, 0.4999):
    rows = benchmarks.run_experiment6("2x3", nu=nu)
    errs = "  ".join(f"{r.quantity} {r.error_percent:+.1f}%" for r in rows)
    print(f"nu={nu:<7} dt {rows[0].dt_min:.2e} s  {errs}")
