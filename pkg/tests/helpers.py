"""Model builders shared by the test modules."""

import numpy as np

from cbshell import geometry
from cbshell.kinematics import update_director
from cbshell.mesh import model_from_dict

# lattice offsets of the 9 element nodes (corner, midside, center order)
_LOCAL = [(0, 0), (2, 0), (2, 2), (0, 2), (1, 0), (2, 1), (1, 2), (0, 1), (1, 1)]


def plate_dict(m=1, n=1, a=1.0, b=1.0, h=0.1, E=1000.0, nu=0.3, rho=1.0, warp=None):
    """Flat rectangular m x n mesh on [0,a]x[0,b] as a model document.

    ``warp`` maps (x, y) to z to build curved variants.
    """
    nx, ny = 2 * m + 1, 2 * n + 1
    nodes = []
    for j in range(ny):
        for i in range(nx):
            x, y = a * i / (nx - 1), b * j / (ny - 1)
            z = 0.0 if warp is None else float(warp(x, y))
            nodes.append({"id": j * nx + i + 1, "x": x, "y": y, "z": z})
    elements = []
    for ej in range(n):
        for ei in range(m):
            conn = [(2 * ej + dj) * nx + 2 * ei + di + 1 for di, dj in _LOCAL]
            elements.append({"id": ej * m + ei + 1, "conn": conn})
    return {
        "nodes": nodes, "elements": elements, "default_thickness": h,
        "material": {"E": E, "nu": nu, "rho": rho},
    }


def plate(**kw):
    extra = {k: kw.pop(k) for k in ("bcs", "loads", "probes", "time") if k in kw}
    doc = plate_dict(**kw)
    doc.update(extra)
    return model_from_dict(doc)


def node_id(doc_or_model, x, y):
    """Id of the node at (x, y) in a plate document or model."""
    if isinstance(doc_or_model, dict):
        for nd in doc_or_model["nodes"]:
            if abs(nd["x"] - x) < 1e-12 and abs(nd["y"] - y) < 1e-12:
                return nd["id"]
        raise KeyError((x, y))
    c = doc_or_model.coords
    i = int(np.argmin(np.hypot(c[:, 0] - x, c[:, 1] - y)))
    return int(doc_or_model.node_ids[i])


def random_rotation(rng):
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_element(rng):
    x = np.zeros((9, 3))
    x[:, :2] = geometry.NODE_RS * rng.uniform(0.8, 1.5, 2) + rng.uniform(-0.1, 0.1, (9, 2))
    x[:, 2] = 0.1 * rng.standard_normal() * x[:, 0] ** 2 + 0.05 * rng.standard_normal() * x[:, 1]
    h = rng.uniform(0.05, 0.3, 9)
    d = np.tile([0.0, 0.0, 1.0], (9, 1)) + 0.1 * rng.standard_normal((9, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return x, h, d


def perturbed(x, h, d, du):
    inc = du.reshape(9, 5)
    fib = geometry.fiber_basis(d)
    new_d, _ = update_director(d, fib, inc[:, 3], inc[:, 4])
    return x + inc[:, :3], h, new_d


def patch_model(a=2.0, h=0.1, E=1000.0, nu=0.3, sigma=0.01):
    doc = plate_dict(a=a, b=a, h=h, E=E, nu=nu)
    bcs, loads = [], []
    for nd in doc["nodes"]:
        origin = nd["x"] == 0.0 and nd["y"] == 0.0
        bcs.append({"node": nd["id"], "fix": [nd["x"] == 0.0, origin, True, True, True]})
        if nd["x"] == a:
            w = {0.0: 1 / 6, a / 2: 4 / 6, a: 1 / 6}[nd["y"]]
            loads.append({"kind": "nodal_force", "node": nd["id"], "force": [sigma * h * a * w, 0, 0]})
    doc.update(bcs=bcs, loads=loads)
    return model_from_dict(doc)


ACCEPTANCE_LINES = []


def record(number, ok, detail):
    """Print and keep one pass/fail line for an acceptance criterion."""
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok
