"""Element geometry of the 9-node shell.

Shape functions, the 3x3x2 quadrature rule, the continuum position map,
Jacobians and the two local frames (lamina and fiber).

Node ordering on the parent square::

    4 --- 7 --- 3
    |           |
    8     9     6
    |           |
    1 --- 5 --- 2

Corners 1-4 sit at (-1,-1), (1,-1), (1,1), (-1,1); the midside nodes follow
in the same counterclockwise order and node 9 is the center. Python arrays
use the same order, zero-based.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTangent, InvertedElement

NODE_RS = np.array(
    [
        [-1.0, -1.0],
        [1.0, -1.0],
        [1.0, 1.0],
        [-1.0, 1.0],
        [0.0, -1.0],
        [1.0, 0.0],
        [0.0, 1.0],
        [-1.0, 0.0],
        [0.0, 0.0],
    ]
)

# which corner nodes bound each midside node, used by mesh generators
EDGES = ((0, 4, 1), (1, 5, 2), (2, 6, 3), (3, 7, 0))

GAUSS3 = (np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)]), np.array([5.0, 8.0, 5.0]) / 9.0)
GAUSS2 = (np.array([-1.0, 1.0]) / np.sqrt(3.0), np.array([1.0, 1.0]))

T_BAR = 0.0  # the mid-surface is the reference surface


def _lagrange3(x):
    """Quadratic Lagrange basis on nodes -1, 0, 1 and its derivative."""
    x = np.asarray(x, dtype=float)
    val = np.stack([0.5 * x * (x - 1.0), 1.0 - x * x, 0.5 * x * (x + 1.0)], axis=-1)
    der = np.stack([x - 0.5, -2.0 * x, x + 0.5], axis=-1)
    return val, der


# index of each node's 1D factor (0 -> -1, 1 -> 0, 2 -> +1)
_IR = np.array([0, 2, 2, 0, 1, 2, 1, 0, 1])
_IS = np.array([0, 0, 2, 2, 0, 1, 2, 1, 1])


def shape_functions(r, s):
    """Biquadratic Lagrange shape functions.

    Accepts scalars or arrays of equal shape. Returns ``(N, dN_dr, dN_ds)``
    with a trailing axis of length 9.
    """
    lr, dlr = _lagrange3(r)
    ls, dls = _lagrange3(s)
    n = lr[..., _IR] * ls[..., _IS]
    dn_dr = dlr[..., _IR] * ls[..., _IS]
    dn_ds = lr[..., _IR] * dls[..., _IS]
    return n, dn_dr, dn_ds


@dataclass(frozen=True)
class QuadratureRule:
    """Tensor-product Gauss rule on the parent cube."""

    r: np.ndarray
    s: np.ndarray
    t: np.ndarray
    weight: np.ndarray

    @property
    def npoints(self):
        return len(self.weight)


def gauss_rule(n_inplane=3, n_thickness=2):
    """In-plane n x n Gauss-Legendre times through-thickness Gauss."""
    ga, wa = np.polynomial.legendre.leggauss(n_inplane)
    gt, wt = np.polynomial.legendre.leggauss(n_thickness)
    rr, ss, tt = np.meshgrid(ga, ga, gt, indexing="ij")
    w = (wa[:, None, None] * wa[None, :, None] * wt[None, None, :]).ravel()
    return QuadratureRule(rr.ravel(), ss.ravel(), tt.ravel(), w)


FULL_RULE = gauss_rule(3, 2)


def interpolate_position(x, h, d, r, s, t):
    """Position at parent point (r, s, t) from nodal data of one configuration.

    ``x`` (9,3) mid-surface nodes, ``h`` (9,) fiber lengths, ``d`` (9,3)
    unit directors.
    """
    n, _, _ = shape_functions(r, s)
    x = np.asarray(x, dtype=float)
    fib = np.asarray(h, dtype=float)[:, None] * np.asarray(d, dtype=float)
    return n @ x + 0.5 * (t - T_BAR) * (n @ fib)


def position_derivatives(x, h, d, n, dn_dr, dn_ds, t):
    """Jacobians ``J[..., k, j] = d y_j / d xi_k`` for batched elements.

    ``x`` (ne,9,3), ``h`` (ne,9), ``d`` (ne,9,3); shape function tables
    (np,9) and ``t`` (np,). Returns (ne, np, 3, 3).
    """
    fib = 0.5 * h[..., None] * d
    tt = (t - T_BAR)[None, :, None]
    xr = np.einsum("pa,eai->epi", dn_dr, x)
    xs = np.einsum("pa,eai->epi", dn_ds, x)
    fr = np.einsum("pa,eai->epi", dn_dr, fib)
    fs = np.einsum("pa,eai->epi", dn_ds, fib)
    ft = np.einsum("pa,eai->epi", n, fib)
    return np.stack([xr + tt * fr, xs + tt * fs, ft], axis=-2)


def jacobian(x, h, d, r, s, t, check=True):
    """Jacobian of the position map at one parent point.

    Rows are the derivatives of the position with respect to r, s and t.
    """
    n, dr, ds = shape_functions(np.atleast_1d(r), np.atleast_1d(s))
    j = position_derivatives(
        np.asarray(x, float)[None], np.asarray(h, float)[None], np.asarray(d, float)[None],
        n, dr, ds, np.atleast_1d(float(t)),
    )[0, 0]
    if check:
        det = np.linalg.det(j)
        scale = np.max(np.abs(j))
        if not det > 1e-12 * scale**3:
            raise InvertedElement(f"Jacobian determinant {det:.3e} is not positive")
    return j


def _normalize(v, what="vector"):
    nv = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(nv <= 1e-300):
        raise DegenerateTangent(f"zero-length {what}")
    return v / nv


def lamina_basis_from_tangents(y_r, y_s):
    """Lamina frame from the two surface tangents (works on batches).

    Returns ``q`` with rows e1, e2, e3 (shape (..., 3, 3)). The in-plane
    pair is placed symmetrically about the bisector of the tangents so that
    e1 makes the same angle with e_r as e2 makes with e_s.
    """
    e_r = _normalize(np.asarray(y_r, float), "r tangent")
    e_s = _normalize(np.asarray(y_s, float), "s tangent")
    c = np.cross(e_r, e_s)
    nc = np.linalg.norm(c, axis=-1, keepdims=True)
    if np.any(nc < 1e-12):
        raise DegenerateTangent("lamina tangents are parallel")
    e3 = c / nc
    e_a = _normalize(0.5 * (e_r + e_s), "bisector")
    e_b = _normalize(np.cross(e3, e_a), "bisector normal")
    e1 = (e_a - e_b) / np.sqrt(2.0)
    e2 = (e_a + e_b) / np.sqrt(2.0)
    return np.stack([e1, e2, e3], axis=-2)


def lamina_basis(x, h, d, r, s, t=0.0):
    """Lamina frame of one element at a parent point; returns ``q`` (3,3)."""
    j = jacobian(x, h, d, r, s, t, check=False)
    return lamina_basis_from_tangents(j[0], j[1])


def fiber_basis(director):
    """Fiber frame attached to a unit director (batched over leading axes).

    Returns ``s`` whose columns are e1, e2, e3 with e3 equal to the
    director. The auxiliary global axis is picked from the magnitudes of the
    director components; ties keep the earlier choice.
    """
    y = np.asarray(director, dtype=float)
    b = np.abs(y)
    j = np.zeros(y.shape[:-1], dtype=int)
    b3 = b[..., 2].copy()
    first = b[..., 0] > b3
    b3 = np.where(first, b[..., 0], b3)
    j = np.where(first, 1, j)
    j = np.where(b[..., 1] > b3, 2, j)
    axis = np.eye(3)[j]
    e2 = np.cross(y, axis)
    e2 /= np.linalg.norm(e2, axis=-1, keepdims=True)
    e1 = np.cross(e2, y)
    return np.stack([e1, e2, y], axis=-1)


def transform_r(q, s):
    """Composite transformation ``[r] = [q][s]`` (fiber to lamina)."""
    return np.asarray(q, float) @ np.asarray(s, float)
