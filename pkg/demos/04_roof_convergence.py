"""Scordelis-Lo roof: free-edge midpoint deflection under self weight.

The load is scaled down so the comparison stays in the linear range that
the reference value describes. Coarse meshes are stiff and the sequence
converges from below.
"""

import sys

from cbshell import benchmarks

meshes = sys.argv[1:] or ["2x2", "4x4", "6x6"]
for mesh in meshes:
    row = benchmarks.run_experiment4(mesh)[0]
    print(f"{mesh:>5}: {row.numerical:.4f}  ({row.error_percent:+.2f}% of {row.oracle})  "
          f"{row.steps} steps, {row.wall_time:.1f} s")
