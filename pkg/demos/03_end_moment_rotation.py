"""Cantilever bent by an end moment.

A moment parameter of 0.25 would roll the tip through 90 degrees. The
small-rotation case tracks the circular-arc answer closely; at larger
rotations a coarse curved mesh stiffens (spurious membrane strain in the
quadratic chord), so the tip lags the exact arc.
"""

from cbshell import benchmarks

for mp in (0.05, 0.125):
    for row in benchmarks.run_experiment3("regular3", [mp]):
        print(f"m={mp:<6} {row.quantity:4s} num {row.numerical: .5f}  arc {row.oracle: .5f}  "
              f"ratio {row.numerical / row.oracle:.3f}")
