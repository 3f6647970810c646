"""Benchmark models, solution protocols and reporting.

Geometry and material data live in ``data/benchmarks.json``. Each
``experiment<k>`` function builds a validated model; ``run_benchmark``
solves it with the static (dynamic relaxation) or first-peak protocol and
pairs every numerical quantity with its oracle.
"""

import json
import time as _time
from dataclasses import asdict, dataclass, replace
from functools import lru_cache
from importlib import resources

import numpy as np
from scipy.linalg import eigh

from . import oracles
from .errors import UnknownExperiment, ValidationError
from .geometry import fiber_basis
from .mesh import TimeControls, TimeFunction, model_from_dict
from .solver import Assembler, initial_state, nodal_stress, run

# corner, midside and center offsets of a 9-node element on a node grid
_LOCAL = ((0, 0), (2, 0), (2, 2), (0, 2), (1, 0), (2, 1), (1, 2), (0, 1), (1, 1))


@lru_cache(maxsize=1)
def benchmark_config():
    text = resources.files("cbshell").joinpath("data/benchmarks.json").read_text()
    return json.loads(text)


def config(experiment):
    try:
        return dict(benchmark_config()[f"experiment{int(experiment)}"])
    except (KeyError, ValueError):
        raise UnknownExperiment(f"unknown experiment {experiment!r}") from None


class Grid:
    """Structured (2m+1) x (2n+1) node grid carrying m x n 9-node elements."""

    def __init__(self, m, n, point):
        if m < 1 or n < 1:
            raise ValidationError(f"refinement must be at least 1x1, got {m}x{n}")
        self.m, self.n = m, n
        self.nx, self.ny = 2 * m + 1, 2 * n + 1
        self.points = np.array(
            [point(i, j) for j in range(self.ny) for i in range(self.nx)], dtype=float
        )

    def nid(self, i, j):
        return j * self.nx + i + 1

    def index(self, i, j):
        return j * self.nx + i

    def elements(self):
        out = []
        for ej in range(self.n):
            for ei in range(self.m):
                conn = [self.nid(2 * ei + di, 2 * ej + dj) for di, dj in _LOCAL]
                out.append({"id": ej * self.m + ei + 1, "conn": conn})
        return out

    def nodes(self, directors=None):
        out = []
        for k, p in enumerate(self.points):
            item = {"id": k + 1, "x": p[0], "y": p[1], "z": p[2]}
            if directors is not None:
                item["director"] = list(directors[k])
            out.append(item)
        return out

    def line(self, i=None, j=None):
        """Node ids along a grid line (fixed ``i`` or fixed ``j``)."""
        if i is not None:
            return [self.nid(i, jj) for jj in range(self.ny)]
        return [self.nid(ii, j) for ii in range(self.nx)]


def _document(grid, thickness, material, bcs, loads, probes, units, directors=None, meta=None):
    return {
        "units": units,
        "nodes": grid.nodes(directors),
        "elements": grid.elements(),
        "material": material,
        "default_thickness": thickness,
        "bcs": bcs,
        "loads": loads,
        "time": {"dt_safety": 0.9, "max_steps": 1_000_000, "dt_reeval_every": 0},
        "probes": probes,
        "meta": meta or {},
    }


def _merge_bcs(fixes):
    """Combine ``{node: set(dofs)}`` into boundary-condition records."""
    return [
        {"node": int(node), "fix": [k in dofs for k in range(5)]}
        for node, dofs in sorted(fixes.items())
    ]


def symmetry_rotation(director, normal):
    """Rotation DOF (3 or 4) whose fiber axis best aligns with a plane normal."""
    s = fiber_basis(np.asarray(director, float))
    proj = np.abs(np.asarray(normal, float) @ s[:, :2])
    return 3 + int(np.argmax(proj))


def _fix(fixes, node, *dofs):
    fixes.setdefault(node, set()).update(dofs)


def _parse_refinement(refinement, default):
    if refinement is None:
        return tuple(default)
    try:
        if isinstance(refinement, str):
            m, n = refinement.lower().split("x")
            out = int(m), int(n)
        elif isinstance(refinement, int):
            out = refinement, refinement
        else:
            out = int(refinement[0]), int(refinement[1])
    except (ValueError, TypeError, IndexError):
        raise ValidationError(f"refinement must look like MxN, got {refinement!r}") from None
    if min(out) < 1:
        raise ValidationError(f"refinement needs positive counts, got {refinement!r}")
    return out


# ---------------------------------------------------------------- experiments


def experiment1(refinement=None, **overrides):
    """Quarter of a simply supported square plate under step pressure.

    The quarter spans ``[0, a/2]^2``; x = 0 and y = 0 are simply supported
    edges (hard support), the other two are symmetry planes. The probe is
    the plate center deflection.
    """
    cfg = {**config(1), **overrides}
    m, n = _parse_refinement(refinement, cfg["refinement"])
    half = cfg["side"] / 2.0
    grid = Grid(m, n, lambda i, j: (half * i / (2 * m), half * j / (2 * n), 0.0))
    fixes = {}
    up = (0.0, 0.0, 1.0)
    for nd in grid.line(i=0):
        _fix(fixes, nd, 2, symmetry_rotation(up, (0, 1, 0)))
    for nd in grid.line(j=0):
        _fix(fixes, nd, 2, symmetry_rotation(up, (1, 0, 0)))
    for nd in grid.line(i=grid.nx - 1):
        _fix(fixes, nd, 0, symmetry_rotation(up, (1, 0, 0)))
    for nd in grid.line(j=grid.ny - 1):
        _fix(fixes, nd, 1, symmetry_rotation(up, (0, 1, 0)))
    center = grid.nid(grid.nx - 1, grid.ny - 1)
    loads = [{"kind": "surface_pressure", "face": "top", "magnitude": cfg["pressure"], "time": {"type": "step"}}]
    probes = [{"node": center, "dof": 2, "label": "center_w"}]
    mat = {"E": cfg["E"], "nu": cfg["nu"], "rho": cfg["rho"]}
    doc = _document(grid, cfg["thickness"], mat, _merge_bcs(fixes), loads, probes, cfg["units"],
                    meta={"experiment": 1, "refinement": [m, n]})
    return model_from_dict(doc)


def experiment2(refinement=None, load="midsurface", **overrides):
    """Cantilever under a uniform dead load of ``pressure`` per unit area.

    ``load="midsurface"`` applies it as a body force, so it acts on the
    beam axis like the elastica load; ``load="top"`` puts it on the top
    face, where it gains a lever arm of h/2 as the fibers rotate.
    """
    cfg = {**config(2), **overrides}
    m, n = _parse_refinement(refinement, cfg["refinement"])
    L, b = cfg["length"], cfg["width"]
    grid = Grid(m, n, lambda i, j: (L * i / (2 * m), b * j / (2 * n), 0.0))
    fixes = {nd: set(range(5)) for nd in grid.line(i=0)}
    tip = grid.nid(grid.nx - 1, n)
    if load == "top":
        loads = [{"kind": "surface_pressure", "face": "top", "magnitude": cfg["pressure"],
                  "follower": False, "time": {"type": "step"}}]
    elif load == "midsurface":
        g = cfg["pressure"] / (cfg["rho"] * cfg["thickness"])
        loads = [{"kind": "body_force", "vector": [0.0, 0.0, -g], "time": {"type": "step"}}]
    else:
        raise ValidationError(f"load must be 'midsurface' or 'top', got {load!r}")
    probes = [{"node": tip, "dof": 2, "label": "tip_w"}, {"node": tip, "dof": 0, "label": "tip_u"}]
    mat = {"E": cfg["E"], "nu": cfg["nu"], "rho": cfg["rho"]}
    doc = _document(grid, cfg["thickness"], mat, _merge_bcs(fixes), loads, probes, cfg["units"],
                    meta={"experiment": 2, "refinement": [m, n]})
    return model_from_dict(doc)


EXP3_MESHES = ("regular3", "irregular3", "regular4", "irregular4")


def _exp3_lines(mesh, cfg):
    L = cfg["length"]
    if mesh in ("regular3", "regular4"):
        k = 3 if mesh == "regular3" else 4
        inner = [L * q / k for q in range(1, k)]
        return [0.0, *inner, L], [0.0, *inner, L]
    if mesh not in ("irregular3", "irregular4"):
        raise ValidationError(f"unknown mesh {mesh!r}; expected one of {EXP3_MESHES}")
    split = cfg[mesh]
    return [0.0, *(L * v for v in split["bottom"]), L], [0.0, *(L * v for v in split["top"]), L]


def experiment3(mesh="irregular3", moment_parameter=0.05, t_ramp=None, **overrides):
    """Cantilever bent by an end moment, on one of four 1-row meshes.

    Element boundaries are straight lines from ``bottom[k]`` (y = 0) to
    ``top[k]`` (y = b). The moment is distributed over the three tip nodes
    with weights 1/6, 4/6, 1/6 and ramped over ``t_ramp``.
    """
    cfg = {**config(3), **overrides}
    L, b, h = cfg["length"], cfg["width"], cfg["thickness"]
    bottom, top = _exp3_lines(mesh, cfg)
    m = len(bottom) - 1

    def point(i, j):
        y = b * j / 2.0
        k, odd = divmod(i, 2)
        xk = bottom[k] + (top[k] - bottom[k]) * y / b
        if odd:
            xk = 0.5 * (xk + bottom[k + 1] + (top[k + 1] - bottom[k + 1]) * y / b)
        return (xk, y, 0.0)

    grid = Grid(m, 1, point)
    fixes = {nd: set(range(5)) for nd in grid.line(i=0)}
    EI = cfg["E"] * b * h**3 / 12.0
    M = oracles.moment_parameter_to_moment(moment_parameter, L, EI)
    tf = {"type": "ramp", "t_ramp": t_ramp} if t_ramp else {"type": "step"}
    loads = []
    for j, wgt in zip(range(3), (1 / 6, 4 / 6, 1 / 6)):
        # a moment about -y lifts the tip towards +z
        loads.append({"kind": "nodal_force", "node": grid.nid(grid.nx - 1, j),
                      "moment": [0.0, -M * wgt, 0.0], "time": tf})
    tip = grid.nid(grid.nx - 1, 1)
    probes = [{"node": tip, "dof": 0, "label": "tip_u"}, {"node": tip, "dof": 2, "label": "tip_w"}]
    mat = {"E": cfg["E"], "nu": cfg["nu"], "rho": cfg["rho"]}
    doc = _document(grid, h, mat, _merge_bcs(fixes), loads, probes, cfg["units"],
                    meta={"experiment": 3, "mesh": mesh, "moment_parameter": moment_parameter,
                          "tip_node": tip, "EI": EI, "length": L})
    return model_from_dict(doc)


def experiment4(refinement=None, **overrides):
    """Quarter of the Scordelis-Lo roof under vertical self weight.

    The cylinder axis is x; x = 0 is the rigid diaphragm (uy = uz = 0),
    x = L/2 and the crown (y = 0) are symmetry planes and the edge at the
    opening angle is free. Element ``m`` counts divisions along the axis,
    ``n`` around the arc. The weight is multiplied by ``load_scale`` so the
    response stays in the linear range of the reference solution.
    """
    cfg = {**config(4), **overrides}
    m, n = _parse_refinement(refinement, cfg["refinement"])
    R, half = cfg["radius"], cfg["length"] / 2.0
    phi = np.radians(cfg["angle_deg"])

    def point(i, j):
        a = phi * j / (2 * n)
        return (half * i / (2 * m), R * np.sin(a), R * np.cos(a))

    grid = Grid(m, n, point)
    dirs = np.array([[0.0, np.sin(phi * j / (2 * n)), np.cos(phi * j / (2 * n))]
                     for j in range(grid.ny) for _ in range(grid.nx)])
    fixes = {}
    for nd in grid.line(i=0):
        _fix(fixes, nd, 1, 2)
    for nd in grid.line(i=grid.nx - 1):
        _fix(fixes, nd, 0, symmetry_rotation(dirs[nd - 1], (1, 0, 0)))
    for nd in grid.line(j=0):
        _fix(fixes, nd, 1, symmetry_rotation(dirs[nd - 1], (0, 1, 0)))
    g = cfg["load_per_area"] * cfg["load_scale"] / (cfg["rho"] * cfg["thickness"])
    loads = [{"kind": "body_force", "vector": [0.0, 0.0, -g], "time": {"type": "step"}}]
    probe = grid.nid(grid.nx - 1, grid.ny - 1)
    probes = [{"node": probe, "dof": 2, "label": "free_edge_w"}]
    mat = {"E": cfg["E"], "nu": cfg["nu"], "rho": cfg["rho"]}
    doc = _document(grid, cfg["thickness"], mat, _merge_bcs(fixes), loads, probes, cfg["units"],
                    directors=dirs, meta={"experiment": 4, "refinement": [m, n]})
    return model_from_dict(doc)


def experiment5(refinement=None, direction="x", load=1.0, **overrides):
    """Pre-twisted cantilever along z with a tip load in X or Y.

    The width axis turns from global Y at the root to global X at the tip.
    The tip load is shared by the three tip nodes as 1/6, 4/6, 1/6.
    """
    cfg = {**config(5), **overrides}
    m, n = _parse_refinement(refinement, cfg["refinement"])
    L, w = cfg["length"], cfg["width"]
    twist = np.radians(cfg["twist_deg"])

    def point(i, j):
        z = L * i / (2 * m)
        a = twist * z / L
        eta = w * (j / (2 * n) - 0.5)
        return (-eta * np.sin(a), eta * np.cos(a), z)

    grid = Grid(m, n, point)
    fixes = {nd: set(range(5)) for nd in grid.line(i=0)}
    axis = {"x": 0, "y": 1}[direction]
    loads = []
    tip_nodes = grid.line(i=grid.nx - 1)
    weights = _edge_weights(n)
    for nd, wgt in zip(tip_nodes, weights):
        vec = [0.0, 0.0, 0.0]
        vec[axis] = load * wgt
        loads.append({"kind": "nodal_force", "node": nd, "force": vec, "time": {"type": "step"}})
    tip = grid.nid(grid.nx - 1, n)
    probes = [{"node": tip, "dof": 0, "label": "tip_x"}, {"node": tip, "dof": 1, "label": "tip_y"}]
    mat = {"E": cfg["E"], "nu": cfg["nu"], "rho": cfg["rho"]}
    doc = _document(grid, cfg["thickness"], mat, _merge_bcs(fixes), loads, probes, cfg["units"],
                    meta={"experiment": 5, "refinement": [m, n], "direction": direction})
    return model_from_dict(doc)


def _edge_weights(n):
    """Consistent nodal shares of a unit uniform line load on n quadratic edges."""
    w = np.zeros(2 * n + 1)
    for k in range(n):
        w[2 * k : 2 * k + 3] += np.array([1.0, 4.0, 1.0]) / (6.0 * n)
    return w


def experiment6(refinement=None, **overrides):
    """Quarter of a thick-walled cylinder under internal pressure.

    The cross-section lies in the x-y plane with directors along the
    cylinder axis. Axial translations and both rotations are held at every
    node and the normal-strain-free material mode gives the plane-strain
    state. ``m`` divides the arc, ``n`` the wall.
    """
    cfg = {**config(6), **overrides}
    m, n = _parse_refinement(refinement, cfg["refinement"])
    ri, ro = cfg["r_inner"], cfg["r_outer"]
    span = np.radians(cfg["angle_deg"])

    def point(i, j):
        a = span * i / (2 * m)
        r = ri + (ro - ri) * j / (2 * n)
        return (r * np.cos(a), r * np.sin(a), 0.0)

    grid = Grid(m, n, point)
    # arc-then-radius node order makes the element normal point along -z
    dirs = np.tile([0.0, 0.0, -1.0], (len(grid.points), 1))
    fixes = {k + 1: {2, 3, 4} for k in range(len(grid.points))}
    for nd in grid.line(i=0):
        _fix(fixes, nd, 1)
    for nd in grid.line(i=grid.nx - 1):
        _fix(fixes, nd, 0)
    loads = []
    shares = _arc_pressure_shares(m, ri, span, cfg["pressure"] * cfg["axial_thickness"])
    for i, f in enumerate(shares):
        loads.append({"kind": "nodal_force", "node": grid.nid(i, 0), "force": list(f),
                      "time": {"type": "step"}})
    probes = [{"node": grid.nid(0, 0), "dof": 0, "label": "u_r_inner"}]
    mat = {"E": cfg["E"], "nu": cfg["nu"], "rho": cfg["rho"], "normal": "zero_strain"}
    doc = _document(grid, cfg["axial_thickness"], mat, _merge_bcs(fixes), loads, probes,
                    cfg["units"], directors=dirs,
                    meta={"experiment": 6, "refinement": [m, n], "nu": cfg["nu"],
                          "inner_nodes": grid.line(j=0), "outer_nodes": grid.line(j=grid.ny - 1)})
    return model_from_dict(doc)


def _arc_pressure_shares(m, r, span, p):
    """Consistent nodal forces of a radial pressure on a circular arc."""
    g, w = np.polynomial.legendre.leggauss(6)
    out = np.zeros((2 * m + 1, 3))
    da = span / m
    for k in range(m):
        for xi, wt in zip(g, w):
            a = da * (k + 0.5 * (xi + 1.0))
            nrm = np.array([np.cos(a), np.sin(a), 0.0])
            shape = np.array([0.5 * xi * (xi - 1.0), 1.0 - xi * xi, 0.5 * xi * (xi + 1.0)])
            out[2 * k : 2 * k + 3] += np.outer(shape, nrm) * p * r * 0.5 * da * wt
    return out


GENERATORS = {1: experiment1, 2: experiment2, 3: experiment3, 4: experiment4, 5: experiment5, 6: experiment6}


def generate_benchmark_mesh(experiment, refinement=None, **options):
    """Model of experiment 1-6 at the given refinement (``"MxN"`` or tuple)."""
    try:
        gen = GENERATORS[int(experiment)]
    except (KeyError, ValueError):
        raise UnknownExperiment(f"unknown experiment {experiment!r}") from None
    if int(experiment) == 3:
        if refinement is not None:
            options.setdefault("mesh", refinement)
        return gen(**options)
    return gen(refinement, **options)


# ---------------------------------------------------------------- protocols


def assemble_stiffness(asm, state):
    """Dense global tangent stiffness (used for modal estimates only)."""
    ke = asm.tangent_stiffness(state)
    n = asm.model.ndof
    k = np.zeros((n, n))
    for e, dofs in enumerate(asm.edofs):
        k[np.ix_(dofs, dofs)] += ke[e]
    return k


def fundamental_frequency(asm, state):
    """Lowest circular frequency of the constrained, linearized model."""
    free = asm.dofmap.free
    k = assemble_stiffness(asm, state)[np.ix_(free, free)]
    m = state.mass[free]
    s = 1.0 / np.sqrt(m)
    lam = eigh(s[:, None] * k * s[None, :], eigvals_only=True, subset_by_index=[0, 0])[0]
    return float(np.sqrt(max(lam, 0.0)))


def with_ramp(model, t_ramp):
    """Copy of ``model`` whose loads rise linearly over ``t_ramp``."""
    if not t_ramp:
        return model
    tf = TimeFunction("ramp", t_ramp)
    return model.with_(loads=[replace(load, time=tf) for load in model.loads])


@dataclass
class Solution:
    model: object
    assembler: object
    result: object
    omega1: float
    wall_time: float

    @property
    def state(self):
        return self.result.state


def relaxation_rotary_scale(model, factor=1.0):
    """Rotary-inertia multiplier that lifts the thickness-shear frequency of a
    thin model to the level of its in-plane modes.

    The fiber rotation mode of a layer of thickness h oscillates at about
    ``sqrt(12 G / rho) / h`` while in-plane modes of nodal spacing l sit near
    ``c / l``; the ratio squared is the scale. Only the static protocol uses
    it, since the relaxed equilibrium does not depend on the mass.
    """
    mat = model.material
    spacing = 0.5 * smallest_edge(model)
    h = float(np.min(model.thickness))
    g = mat.E / (2.0 * (1.0 + mat.nu))
    s = 12.0 * g / (mat.rho * mat.wave_speed() ** 2) * (spacing / h) ** 2
    return max(1.0, factor * s)


def solve_static(model, ke_tol=1e-8, damping_ratio=1.0, ramp_periods=0.0, max_periods=60.0,
                 dt_reeval_every=0, dt_safety=0.9, max_steps=2_000_000, rotary_scale="auto"):
    """Dynamic relaxation with mass-proportional damping ``c = 2 zeta omega_1``.

    The run ends when the load is fully applied and the kinetic energy has
    dropped below ``ke_tol`` times its peak. ``rotary_scale`` (a number or
    ``"auto"``) inflates the rotary inertia to enlarge the stable step.
    """
    start = _time.perf_counter()
    if rotary_scale == "auto":
        rotary_scale = relaxation_rotary_scale(model)
    asm0 = Assembler(model, rotary_scale=rotary_scale)
    st0 = initial_state(model, asm0)
    w1 = fundamental_frequency(asm0, st0)
    period = 2.0 * np.pi / w1
    model = with_ramp(model, ramp_periods * period)
    asm = Assembler(model, rotary_scale=rotary_scale)
    controls = TimeControls(
        dt_safety=dt_safety, damping=2.0 * damping_ratio * w1, ke_tol=ke_tol,
        t_end=(ramp_periods + max_periods) * period, max_steps=max_steps,
        dt_reeval_every=dt_reeval_every,
    )
    result = run(model, controls, assembler=asm)
    return Solution(model, asm, result, w1, _time.perf_counter() - start)


def solve_first_peak(model, probe, periods=0.75, dt_safety=0.9):
    """Undamped run over part of the first period; returns the solution and
    the index of the extreme probe value."""
    start = _time.perf_counter()
    asm = Assembler(model)
    st0 = initial_state(model, asm)
    w1 = fundamental_frequency(asm, st0)
    controls = TimeControls(dt_safety=dt_safety, t_end=periods * 2.0 * np.pi / w1, dt_reeval_every=0)
    result = run(model, controls, assembler=asm, state=st0)
    sol = Solution(model, asm, result, w1, _time.perf_counter() - start)
    hist = result.probe(probe)
    return sol, int(np.argmax(np.abs(hist)))


# ---------------------------------------------------------------- reports


@dataclass
class RunReport:
    benchmark: str
    case: str
    quantity: str
    numerical: float
    oracle: float
    error_percent: float
    protocol: str
    dt_min: float
    dt_max: float
    steps: int
    loops: int
    wall_time: float

    def to_dict(self):
        return asdict(self)


def _report(name, case, quantity, num, ref, protocol, sol, steps=None, loops=None):
    dts = sol.result.dt_history
    return RunReport(
        benchmark=name, case=case, quantity=quantity, numerical=float(num), oracle=float(ref),
        error_percent=float(oracles.percent_error(num, ref)), protocol=protocol,
        dt_min=float(min(dts)), dt_max=float(max(dts)),
        steps=int(sol.state.step if steps is None else steps),
        loops=int(sol.result.loops if loops is None else loops), wall_time=sol.wall_time,
    )


def classical_time_step(length, material):
    """Length over plane-stress dilatational wave speed."""
    return length / material.wave_speed()


def smallest_edge(model):
    """Shortest element edge measured along the reference surface chords."""
    best = np.inf
    for row in model.conn:
        x = model.coords[row]
        for a, mid, b in ((0, 4, 1), (1, 5, 2), (2, 6, 3), (3, 7, 0)):
            length = np.linalg.norm(x[mid] - x[a]) + np.linalg.norm(x[b] - x[mid])
            best = min(best, length)
    return float(best)


def dt_report(model):
    """Per-element eigenvalue step, classical step and their ratio."""
    asm = Assembler(model)
    st = initial_state(model, asm)
    eig = asm.element_time_steps(st)
    rows = []
    for e, dt in enumerate(eig):
        sub = model.with_(conn=model.conn[[e]], element_ids=model.element_ids[[e]])
        classical = classical_time_step(smallest_edge(sub), model.material)
        rows.append({"element": int(model.element_ids[e]), "dt_eig": float(dt),
                     "dt_classical": float(classical), "ratio": float(dt / classical)})
    return rows


def run_experiment1(refinement=None, protocol="static", **kw):
    model = experiment1(refinement, **kw)
    cfg = {**config(1), **kw}
    ref = oracles.plate_center_deflection(cfg["side"], cfg["thickness"], cfg["E"], cfg["nu"], cfg["pressure"])
    case = "x".join(map(str, model.meta["refinement"]))
    if protocol == "peak":
        sol, k = solve_first_peak(model, "center_w")
        w = -sol.result.probe("center_w")[k]
        steps = int(sol.result.steps[k])
        return [_report("experiment1", case, "center deflection (first peak)", w, 2.0 * ref, "peak",
                        sol, steps=steps, loops=steps * model.nelements)]
    sol = solve_static(model)
    w = -sol.result.probe("center_w")[-1]
    return [_report("experiment1", case, "center deflection", w, ref, "static", sol)]


def run_experiment2(refinement=None, **kw):
    cfg = {**config(2), **kw}
    model = experiment2(refinement, **kw)
    EI = cfg["E"] * cfg["width"] * cfg["thickness"] ** 3 / 12.0
    v, u, _ = oracles.cantilever_uniform_load(cfg["length"], EI, cfg["pressure"] * cfg["width"])
    sol = solve_static(model, ramp_periods=cfg["t_ramp_periods"], dt_reeval_every=100)
    case = "x".join(map(str, model.meta["refinement"]))
    rows = [
        _report("experiment2", case, "tip deflection", -sol.result.probe("tip_w")[-1], v, "static", sol),
        _report("experiment2", case, "tip axial shortening", -sol.result.probe("tip_u")[-1], u, "static", sol),
    ]
    return rows


def exp3_tip_quantities(sol):
    """Tip rotation, axial shortening and lift from the deformed state."""
    model = sol.model
    tip = model.node_index(model.meta["tip_node"])
    d = sol.state.d[tip]
    phi = float(np.arctan2(-d[0], d[2]))
    disp = sol.state.x[tip] - model.coords[tip]
    return phi, float(-disp[0]), float(disp[2])


def run_experiment3(mesh="irregular3", moment_parameters=None, **kw):
    cfg = {**config(3), **kw}
    params = cfg["moment_parameters"] if moment_parameters is None else moment_parameters
    rows = []
    for mp in params:
        model = experiment3(mesh, mp, **kw)
        sol = solve_static(model, ramp_periods=cfg["t_ramp_periods"], dt_reeval_every=100)
        M = oracles.moment_parameter_to_moment(mp, cfg["length"], model.meta["EI"])
        ref = oracles.cantilever_end_moment(cfg["length"], model.meta["EI"], M)
        num = exp3_tip_quantities(sol)
        for name, a, b in zip(("phi", "U", "V"), num, ref):
            rows.append(_report("experiment3", f"{mesh} m={mp}", name, a, b, "static", sol))
    return rows


def run_experiment4(refinement=None, **kw):
    model = experiment4(refinement, **kw)
    scale = {**config(4), **kw}["load_scale"]
    sol = solve_static(model)
    ref = oracles.scordelis_lo_reference()[0].value
    case = "x".join(map(str, model.meta["refinement"]))
    w = -sol.result.probe("free_edge_w")[-1] / scale
    return [_report("experiment4", case, "free-edge midpoint vertical displacement", w, ref, "static", sol)]


def run_experiment5(refinement=None, **kw):
    refs = oracles.twisted_beam_reference()
    rows = []
    for direction, ref, probe in (("x", refs[0].value, "tip_x"), ("y", refs[1].value, "tip_y")):
        model = experiment5(refinement, direction=direction, **kw)
        sol = solve_static(model)
        case = "x".join(map(str, model.meta["refinement"])) + f" {direction.upper()} load"
        rows.append(_report("experiment5", case, f"tip deflection {direction.upper()}",
                            sol.result.probe(probe)[-1], ref, "static", sol))
    return rows


def cylinder_results(sol):
    """Radial displacement and stresses on the inner and outer walls."""
    model = sol.model
    asm, st = sol.assembler, sol.state

    def polar(node_id):
        i = model.node_index(node_id)
        x = model.coords[i]
        er = np.array([x[0], x[1], 0.0]) / np.hypot(x[0], x[1])
        et = np.array([-er[1], er[0], 0.0])
        sig = nodal_stress(asm, st, i)
        return i, er, float(et @ sig @ et), float(er @ sig @ er)

    inner = [polar(nd) for nd in model.meta["inner_nodes"]]
    outer = [polar(nd) for nd in model.meta["outer_nodes"]]
    u_r = np.mean([(st.x[i] - model.coords[i]) @ er for i, er, _, _ in inner])
    return {
        "u_r_inner": float(u_r),
        "sigma_t_inner": float(np.mean([s for _, _, s, _ in inner])),
        "sigma_r_inner": float(np.mean([s for _, _, _, s in inner])),
        "sigma_t_outer": float(np.mean([s for _, _, s, _ in outer])),
    }


def run_experiment6(refinement=None, **kw):
    cfg = {**config(6), **kw}
    model = experiment6(refinement, **kw)
    sol = solve_static(model)
    res = cylinder_results(sol)
    args = (cfg["r_inner"], cfg["r_outer"], cfg["pressure"], cfg["E"], cfg["nu"])
    u_i, st_i, sr_i = oracles.lame_cylinder(*args, cfg["r_inner"])
    _, st_o, _ = oracles.lame_cylinder(*args, cfg["r_outer"])
    case = "x".join(map(str, model.meta["refinement"])) + f" nu={cfg['nu']}"
    return [
        _report("experiment6", case, "radial displacement r_i", res["u_r_inner"], u_i, "static", sol),
        _report("experiment6", case, "circumferential stress r_i", res["sigma_t_inner"], st_i, "static", sol),
        _report("experiment6", case, "circumferential stress r_o", res["sigma_t_outer"], st_o, "static", sol),
        _report("experiment6", case, "radial stress r_i", res["sigma_r_inner"], sr_i, "static", sol),
    ]


RUNNERS = {1: run_experiment1, 2: run_experiment2, 3: run_experiment3, 4: run_experiment4,
           5: run_experiment5, 6: run_experiment6}


def run_benchmark(experiment, refinement=None, **kw):
    """Report rows for one experiment (``refinement`` is a mesh name for 3)."""
    try:
        runner = RUNNERS[int(experiment)]
    except (KeyError, ValueError):
        raise UnknownExperiment(f"unknown experiment {experiment!r}") from None
    if int(experiment) == 3:
        return runner(refinement or "irregular3", **kw)
    return runner(refinement, **kw)
