"""Large deflection of a cantilever under a uniform load.

The explicit solution is compared against a shooting solution of the
elastica equation. The load sits on the mid-surface; moving it to the
top face adds a lever arm once the beam rotates, and the gap to the
elastica grows accordingly.
"""

from cbshell import benchmarks, oracles

cfg = benchmarks.config(2)
EI = cfg["E"] * cfg["width"] * cfg["thickness"] ** 3 / 12.0
v_ref, u_ref, _ = oracles.cantilever_uniform_load(cfg["length"], EI, cfg["pressure"] * cfg["width"])
print(f"elastica: tip deflection {v_ref:.5f} m, shortening {u_ref:.5f} m")

for load in ("midsurface", "top"):
    model = benchmarks.experiment2("5x1", load=load)
    sol = benchmarks.solve_static(model, ramp_periods=cfg["t_ramp_periods"], dt_reeval_every=100)
    v = -sol.result.probe("tip_w")[-1]
    u = -sol.result.probe("tip_u")[-1]
    print(f"{load:10s} tip {v:.5f} ({oracles.percent_error(v, v_ref):+.2f}%)  "
          f"shortening {u:.5f} ({oracles.percent_error(u, u_ref):+.2f}%)  {sol.state.step} steps")
