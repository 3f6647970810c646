"""Model data: nodes, 9-node elements, boundary conditions, loads and time
controls, plus JSON ingestion and validation.

The model file is a JSON document::

    {
      "units": "SI",
      "nodes": [{"id": 1, "x": 0, "y": 0, "z": 0, "director": [0, 0, 1], "thickness": 0.1}, ...],
      "elements": [{"id": 1, "conn": [9 node ids]}, ...],
      "material": {"E": 7e10, "nu": 0.3, "rho": 2700},
      "default_thickness": 0.01,
      "bcs": [{"node": 1, "fix": [true, true, true, false, false]}, ...],
      "loads": [{"kind": "surface_pressure", "face": "top", "magnitude": 1e3,
                 "time": {"type": "step"}}, ...],
      "time": {"dt_safety": 0.9, "t_end": 1e-3, "max_steps": 100000},
      "probes": [{"node": 5, "dof": 2}]
    }
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import geometry
from .errors import DegenerateNormal, InvertedElement, ParseError, ValidationError
from .kinematics import NDOF
from .material import MaterialLaw

FACES = {"top": 1.0, "bottom": -1.0}


@dataclass(frozen=True)
class TimeFunction:
    kind: str = "step"
    t_ramp: float = 0.0

    def __post_init__(self):
        if self.kind not in ("step", "ramp"):
            raise ValidationError(f"unknown time function {self.kind!r}")
        if self.kind == "ramp" and not self.t_ramp > 0.0:
            raise ValidationError("ramp time function needs t_ramp > 0")

    def __call__(self, t):
        if self.kind == "step":
            return 1.0 if t >= 0.0 else 0.0
        return float(np.clip(t / self.t_ramp, 0.0, 1.0))

    def to_dict(self):
        if self.kind == "step":
            return {"type": "step"}
        return {"type": "ramp", "t_ramp": self.t_ramp}

    @classmethod
    def from_dict(cls, data):
        if data is None:
            return cls()
        kind = data.get("type", "step")
        if kind in ("linear_ramp", "ramp"):
            return cls("ramp", float(data.get("t_ramp", 0.0)))
        return cls(kind)


@dataclass(frozen=True)
class LoadCase:
    """One load definition.

    ``surface_pressure`` acts on the top (t=+1) or bottom (t=-1) face and
    pushes against the outward face normal; with ``follower`` false the
    direction is frozen at the reference normal. ``body_force`` is a force
    per unit mass in a fixed global direction. ``nodal_force`` carries three
    force components and a global moment vector.
    """

    kind: str
    time: TimeFunction = TimeFunction()
    face: str = "top"
    magnitude: float = 0.0
    follower: bool = True
    vector: tuple = (0.0, 0.0, 0.0)
    node: int = -1
    moment: tuple = (0.0, 0.0, 0.0)
    elements: tuple = ()

    def __post_init__(self):
        if self.kind not in ("surface_pressure", "body_force", "nodal_force"):
            raise ValidationError(f"unknown load kind {self.kind!r}")
        if self.kind == "surface_pressure" and self.face not in FACES:
            raise ValidationError(f"face must be top or bottom, got {self.face!r}")
        vals = [self.magnitude, *self.vector, *self.moment]
        if not np.all(np.isfinite(vals)):
            raise ValidationError("load magnitudes must be finite")

    def to_dict(self):
        out = {"kind": self.kind, "time": self.time.to_dict()}
        if self.kind == "surface_pressure":
            out.update(face=self.face, magnitude=self.magnitude, follower=self.follower)
            if self.elements:
                out["elements"] = list(self.elements)
        elif self.kind == "body_force":
            out["vector"] = list(self.vector)
            if self.elements:
                out["elements"] = list(self.elements)
        else:
            out.update(node=self.node, force=list(self.vector), moment=list(self.moment))
        return out


@dataclass(frozen=True)
class BoundaryCondition:
    node: int
    fix: tuple
    value: tuple = (0.0,) * NDOF

    def __post_init__(self):
        if len(self.fix) != NDOF or len(self.value) != NDOF:
            raise ValidationError("a boundary condition needs 5 flags")


@dataclass(frozen=True)
class TimeControls:
    """Explicit integration settings.

    ``damping`` is a mass-proportional coefficient (1/time). ``ke_tol``
    turns on the static (dynamic relaxation) stop: the run ends once the
    load is fully applied and the kinetic energy has fallen below
    ``ke_tol`` times its peak. ``dt`` overrides the stable step.
    """

    dt_safety: float = 0.9
    t_end: float = np.inf
    max_steps: int = 100_000
    damping: float = 0.0
    dt_reeval_every: int = 100
    ke_tol: float = 0.0
    dt: float = 0.0
    snapshot_every: int = 0

    def __post_init__(self):
        if not (0.0 < self.dt_safety <= 1.0):
            raise ValidationError(f"dt_safety must lie in (0, 1], got {self.dt_safety}")
        if self.damping < 0.0:
            raise ValidationError("damping must be non-negative")
        if self.max_steps < 0:
            raise ValidationError("max_steps must be non-negative")

    def to_dict(self):
        out = {"dt_safety": self.dt_safety, "max_steps": self.max_steps}
        if np.isfinite(self.t_end):
            out["t_end"] = self.t_end
        for key in ("damping", "ke_tol", "dt"):
            if getattr(self, key):
                out[key] = getattr(self, key)
        out["dt_reeval_every"] = self.dt_reeval_every
        if self.snapshot_every:
            out["snapshot_every"] = self.snapshot_every
        return out


@dataclass(frozen=True)
class Probe:
    node: int
    dof: int
    label: str = ""

    @property
    def name(self):
        return self.label or f"n{self.node}_d{self.dof}"


@dataclass
class Model:
    """Validated, immutable-by-convention shell model.

    Node and element ids are kept for I/O; internally everything is indexed
    by array position.
    """

    node_ids: np.ndarray
    coords: np.ndarray
    directors: np.ndarray
    thickness: np.ndarray
    element_ids: np.ndarray
    conn: np.ndarray
    material: MaterialLaw
    bcs: list = field(default_factory=list)
    loads: list = field(default_factory=list)
    time: TimeControls = TimeControls()
    probes: list = field(default_factory=list)
    units: str = ""
    default_thickness: float = 0.0
    meta: dict = field(default_factory=dict)
    director_given: np.ndarray = None

    @property
    def nnodes(self):
        return len(self.node_ids)

    @property
    def nelements(self):
        return len(self.element_ids)

    @property
    def ndof(self):
        return NDOF * self.nnodes

    def node_index(self, node_id):
        idx = self._index.get(int(node_id))
        if idx is None:
            raise ValidationError(f"unknown node id {node_id}")
        return idx

    @property
    def _index(self):
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {int(n): i for i, n in enumerate(self.node_ids)}
            self.__dict__["_index_cache"] = cache
        return cache

    def element_arrays(self, e=None):
        """Reference nodal arrays ``(x, h, d)`` of one or all elements."""
        c = self.conn if e is None else self.conn[e]
        return self.coords[c], self.thickness[c], self.directors[c]

    def with_(self, **changes):
        """Copy with some fields replaced (material, time, loads, ...)."""
        data = {k: v for k, v in self.__dict__.items() if not k.startswith("_")}
        data.update(changes)
        return Model(**data)


def compute_default_directors(coords, conn, nnodes=None):
    """Unit normals averaged over the elements sharing each node.

    Each element contributes the lamina normal of its mid-surface at the
    node's parent coordinates.
    """
    coords = np.asarray(coords, float)
    conn = np.asarray(conn, int)
    nnodes = len(coords) if nnodes is None else nnodes
    n, dr, ds = geometry.shape_functions(geometry.NODE_RS[:, 0], geometry.NODE_RS[:, 1])
    x = coords[conn]  # (ne,9,3)
    yr = np.einsum("pa,eai->epi", dr, x)
    ys = np.einsum("pa,eai->epi", ds, x)
    normal = np.cross(yr, ys)
    normal /= np.linalg.norm(normal, axis=-1, keepdims=True)
    acc = np.zeros((nnodes, 3))
    np.add.at(acc, conn, normal)
    norm = np.linalg.norm(acc, axis=1)
    used = np.zeros(nnodes, bool)
    used[conn.ravel()] = True
    if np.any(norm[used] < 1e-8):
        raise DegenerateNormal("averaged nodal normal vanishes (folded mesh?)")
    out = np.zeros((nnodes, 3))
    out[used] = acc[used] / norm[used, None]
    return out


@dataclass(frozen=True)
class DofMap:
    """Global DOF numbering: node i owns DOFs ``5 i .. 5 i + 4``."""

    index: np.ndarray  # (nnodes, 5)
    fixed: np.ndarray  # boolean mask over all DOFs
    prescribed: np.ndarray  # values on fixed DOFs

    @property
    def free(self):
        return ~self.fixed

    @property
    def nfree(self):
        return int(np.count_nonzero(~self.fixed))


def build_dof_map(model):
    n = model.nnodes
    index = np.arange(NDOF * n).reshape(n, NDOF)
    fixed = np.zeros(NDOF * n, bool)
    prescribed = np.zeros(NDOF * n)
    for bc in model.bcs:
        i = model.node_index(bc.node)
        for k in range(NDOF):
            if bc.fix[k]:
                fixed[index[i, k]] = True
                prescribed[index[i, k]] = bc.value[k]
    return DofMap(index, fixed, prescribed)


# ---------------------------------------------------------------- validation


def validate(model):
    """Check references, positivity and element orientation in place."""
    ids = model.node_ids
    if len(np.unique(ids)) != len(ids):
        raise ValidationError("duplicate node ids")
    if model.conn.ndim != 2 or model.conn.shape[1] != 9:
        raise ValidationError("every element needs exactly 9 nodes")
    for row, eid in zip(model.conn, model.element_ids):
        if len(set(row.tolist())) != 9:
            raise ValidationError(f"element {eid} repeats a node")
    if np.any(~(model.thickness > 0.0)):
        raise ValidationError("fiber lengths must be positive")
    norms = np.linalg.norm(model.directors, axis=1)
    used = np.zeros(model.nnodes, bool)
    used[model.conn.ravel()] = True
    if np.any(np.abs(norms[used] - 1.0) > 1e-9):
        raise ValidationError("directors must be unit vectors")
    x, h, d = model.element_arrays()
    rule = geometry.FULL_RULE
    n, dr, ds = geometry.shape_functions(rule.r, rule.s)
    jac = geometry.position_derivatives(x, h, d, n, dr, ds, rule.t)
    det = np.linalg.det(jac)
    bad = np.nonzero(np.any(det <= 0.0, axis=1))[0]
    if len(bad):
        raise InvertedElement(f"non-positive Jacobian in element {model.element_ids[bad[0]]}")
    for p in model.probes:
        model.node_index(p.node)
        if not 0 <= p.dof < NDOF:
            raise ValidationError(f"probe dof {p.dof} out of range")
    for load in model.loads:
        if load.kind == "nodal_force":
            model.node_index(load.node)
    for bc in model.bcs:
        model.node_index(bc.node)
    return model


# ---------------------------------------------------------------- JSON I/O


def _load_from_dict(item, fiber_of):
    kind = item.get("kind")
    time = TimeFunction.from_dict(item.get("time"))
    elements = tuple(int(e) for e in item.get("elements", ()))
    if kind == "surface_pressure":
        return LoadCase(
            kind, time, face=item.get("face", "top"), magnitude=float(item["magnitude"]),
            follower=bool(item.get("follower", True)), elements=elements,
        )
    if kind == "body_force":
        return LoadCase(kind, time, vector=tuple(float(v) for v in item["vector"]), elements=elements)
    if kind == "nodal_force":
        force = [float(v) for v in item.get("force", [0.0, 0.0, 0.0])]
        if len(force) not in (3, 5):
            raise ValidationError("nodal force needs 3 or 5 components")
        moment = np.array([float(v) for v in item.get("moment", (0.0, 0.0, 0.0))])
        if len(force) == 5:
            # generalized moments given in the node's reference fiber frame
            s = fiber_of(int(item["node"]))
            moment = moment + force[4] * s[:, 0] - force[3] * s[:, 1]
        moment = tuple(float(v) for v in moment)
        return LoadCase(kind, time, vector=tuple(force[:3]), node=int(item["node"]), moment=moment)
    raise ValidationError(f"unknown load kind {kind!r}")


def model_from_dict(data):
    """Build and validate a model from the parsed JSON document."""
    try:
        mat = data["material"]
        material = MaterialLaw(
            float(mat["E"]), float(mat["nu"]), float(mat["rho"]), mat.get("normal", "zero_stress")
        )
        default_h = float(data.get("default_thickness", 0.0))
        nodes = data["nodes"]
        node_ids = np.array([int(nd["id"]) for nd in nodes])
        coords = np.array([[float(nd["x"]), float(nd["y"]), float(nd.get("z", 0.0))] for nd in nodes])
        thickness = np.array([float(nd.get("thickness", default_h)) for nd in nodes])
        given = np.array(["director" in nd for nd in nodes])
        directors = np.array([nd.get("director", [0.0, 0.0, 0.0]) for nd in nodes], float)
        elems = data["elements"]
        element_ids = np.array([int(e["id"]) for e in elems])
        index = {int(n): i for i, n in enumerate(node_ids)}
        raw_conn = [e["conn"] for e in elems]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ParseError(f"malformed model: {exc!r}") from exc
    if any(len(c) != 9 for c in raw_conn):
        raise ValidationError("every element needs exactly 9 nodes")
    try:
        conn = np.array([[index[int(n)] for n in c] for c in raw_conn], dtype=int).reshape(-1, 9)
    except KeyError as exc:
        raise ValidationError(f"element references unknown node {exc.args[0]}") from exc
    if not np.all(given):
        default = compute_default_directors(coords, conn)
        directors[~given] = default[~given]
    norms = np.linalg.norm(directors, axis=1)
    if np.any(norms[given] <= 0.0):
        raise ValidationError("zero director")
    directors[given] /= norms[given, None]

    bcs = []
    for item in data.get("bcs", []):
        fix = tuple(bool(f) for f in item["fix"])
        value = tuple(float(v) for v in item.get("value", [0.0] * NDOF))
        bcs.append(BoundaryCondition(int(item["node"]), fix, value))

    def fiber_of(node_id):
        if node_id not in index:
            raise ValidationError(f"load references unknown node {node_id}")
        return geometry.fiber_basis(directors[index[node_id]])

    loads = [_load_from_dict(item, fiber_of) for item in data.get("loads", [])]
    t = data.get("time", {})
    time = TimeControls(
        dt_safety=float(t.get("dt_safety", 0.9)),
        t_end=float(t.get("t_end", np.inf)),
        max_steps=int(t.get("max_steps", 100_000)),
        damping=float(t.get("damping", 0.0)),
        dt_reeval_every=int(t.get("dt_reeval_every", 100)),
        ke_tol=float(t.get("ke_tol", 0.0)),
        dt=float(t.get("dt", 0.0)),
        snapshot_every=int(t.get("snapshot_every", 0)),
    )
    probes = [Probe(int(p["node"]), int(p["dof"]), p.get("label", "")) for p in data.get("probes", [])]
    model = Model(
        node_ids=node_ids, coords=coords, directors=directors, thickness=thickness,
        element_ids=element_ids, conn=conn, material=material, bcs=bcs, loads=loads,
        time=time, probes=probes, units=str(data.get("units", "")),
        default_thickness=default_h, meta=dict(data.get("meta", {})), director_given=given,
    )
    return validate(model)


def model_to_dict(model):
    nodes = []
    for i, nid in enumerate(model.node_ids):
        x, y, z = model.coords[i]
        item = {"id": int(nid), "x": float(x), "y": float(y), "z": float(z)}
        item["director"] = [float(v) for v in model.directors[i]]
        item["thickness"] = float(model.thickness[i])
        nodes.append(item)
    elements = [
        {"id": int(eid), "conn": [int(model.node_ids[j]) for j in row]}
        for eid, row in zip(model.element_ids, model.conn)
    ]
    out = {
        "units": model.units,
        "nodes": nodes,
        "elements": elements,
        "material": model.material.to_dict(),
        "default_thickness": model.default_thickness,
        "bcs": [
            {"node": bc.node, "fix": list(bc.fix), **({"value": list(bc.value)} if any(bc.value) else {})}
            for bc in model.bcs
        ],
        "loads": [load.to_dict() for load in model.loads],
        "time": model.time.to_dict(),
        "probes": [{"node": p.node, "dof": p.dof, **({"label": p.label} if p.label else {})} for p in model.probes],
    }
    if model.meta:
        out["meta"] = model.meta
    return out


def load_model(path):
    """Read, parse and validate a model file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    return model_from_dict(data)


def save_model(model, path):
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1))
