"""Shell kinematics: director update, lamina strain measures, B-matrix and
fiber-length update.

Single-point functions mirror the textbook definitions; the ``*_batch``
variants evaluate whole meshes at once and are what the solver uses.
"""

import numpy as np

from . import geometry
from .errors import DegenerateDirector, NonPositiveThickness
from .numerics import batched_inverse, mat3_inverse

NDOF = 5  # u1, u2, u3, theta1, theta2 per node
NEN = 9
VOIGT_REDUCED = ("e11", "e22", "g12", "g13", "g23")


def update_director(director, fiber, theta1, theta2, tol=1e-8):
    """Radial-return update of nodal directors.

    ``fiber`` is the fiber frame at the start of the increment (columns
    e1, e2, e3). Returns the new unit director and the director
    displacement ``new - old``. Works on single nodes or batches.
    """
    y = np.asarray(director, dtype=float)
    s = np.asarray(fiber, dtype=float)
    th1 = np.asarray(theta1, dtype=float)[..., None]
    th2 = np.asarray(theta2, dtype=float)[..., None]
    trial = -s[..., :, 0] * th1 - s[..., :, 1] * th2
    moved = y + trial
    norm = np.linalg.norm(moved, axis=-1, keepdims=True)
    if np.any(norm < tol):
        raise DegenerateDirector("director increment close to a half turn")
    new = moved / norm
    return new, new - y


def deformation_gradient_lamina(j_ref_lamina, j_cur_lamina):
    """``F = J_cur^T J_ref^-T`` with both Jacobians in lamina components."""
    j_ref_inv = mat3_inverse(j_ref_lamina)
    mat3_inverse(j_cur_lamina)  # singularity check on the current map
    return np.asarray(j_cur_lamina, float).T @ j_ref_inv.T


def almansi_strain(f):
    """Euler-Almansi strain ``(I - F^-T F^-1) / 2``."""
    finv = mat3_inverse(f)
    e = 0.5 * (np.eye(3) - finv.T @ finv)
    return 0.5 * (e + e.T)


def almansi_from_inverse(finv):
    """Batched Almansi strain from ``F^-1``, shape (..., 3, 3)."""
    e = 0.5 * (np.eye(3) - np.swapaxes(finv, -1, -2) @ finv)
    return 0.5 * (e + np.swapaxes(e, -1, -2))


def tensor_to_reduced(e):
    """Reduced Voigt vector (e11, e22, 2e12, 2e13, 2e23) of a strain tensor."""
    return np.stack(
        [e[..., 0, 0], e[..., 1, 1], 2.0 * e[..., 0, 1], 2.0 * e[..., 0, 2], 2.0 * e[..., 1, 2]],
        axis=-1,
    )


def reduced_to_tensor(eps_red, e33):
    """Inverse of :func:`tensor_to_reduced` with a supplied normal strain."""
    e = np.empty(np.shape(eps_red)[:-1] + (3, 3))
    e[..., 0, 0] = eps_red[..., 0]
    e[..., 1, 1] = eps_red[..., 1]
    e[..., 2, 2] = e33
    e[..., 0, 1] = e[..., 1, 0] = 0.5 * eps_red[..., 2]
    e[..., 0, 2] = e[..., 2, 0] = 0.5 * eps_red[..., 3]
    e[..., 1, 2] = e[..., 2, 1] = 0.5 * eps_red[..., 4]
    return e


def _strain_of(v, w):
    """Reduced strain produced by a displacement gradient ``v w^T``."""
    return np.stack(
        [
            v[..., 0] * w[..., 0],
            v[..., 1] * w[..., 1],
            v[..., 0] * w[..., 1] + v[..., 1] * w[..., 0],
            v[..., 0] * w[..., 2] + v[..., 2] * w[..., 0],
            v[..., 1] * w[..., 2] + v[..., 2] * w[..., 1],
        ],
        axis=-1,
    )


def b_matrix_batch(q_jinv, q, n, dn_dr, dn_ds, t, h, e1f, e2f):
    """Reduced lamina strain-displacement matrices.

    ``q_jinv`` is ``q J^-1`` at each point (ne,np,3,3), ``q`` the lamina
    frame there. Nodal data ``h`` (ne,9) and fiber axes ``e1f``/``e2f``
    (ne,9,3) are current values. Returns (ne, np, 5, 45).
    """
    ne, npt = q.shape[:2]
    tt = (t - geometry.T_BAR)[:, None]
    zeros = np.zeros_like(dn_dr)
    grad_u = np.stack([dn_dr, dn_ds, zeros], axis=-1)  # (np,9,3)
    grad_th = np.stack([tt * dn_dr, tt * dn_ds, n], axis=-1)
    w_u = np.einsum("epij,paj->epai", q_jinv, grad_u)  # (ne,np,9,3)
    w_th = np.einsum("epij,paj->epai", q_jinv, grad_th)
    # translation DOF m moves along global axis m: lamina components q[:, m]
    v_u = np.swapaxes(q, -1, -2)  # (ne,np,m,3)
    g1 = -0.5 * h[..., None] * e1f  # (ne,9,3)
    g2 = -0.5 * h[..., None] * e2f
    v_t1 = np.einsum("epij,eaj->epai", q, g1)
    v_t2 = np.einsum("epij,eaj->epai", q, g2)
    b = np.empty((ne, npt, NEN, NDOF, 5))
    b[:, :, :, 0:3, :] = _strain_of(v_u[:, :, None, :, :], w_u[:, :, :, None, :])
    b[:, :, :, 3, :] = _strain_of(v_t1, w_th)
    b[:, :, :, 4, :] = _strain_of(v_t2, w_th)
    return np.moveaxis(b, -1, 2).reshape(ne, npt, 5, NEN * NDOF)


def b_matrix_lamina(x, h, d, r, s, t):
    """Reduced strain-displacement matrix (5x45) of one element at one point.

    ``x``, ``h``, ``d`` are current nodal positions, fiber lengths and
    directors; fiber axes follow from the directors.
    """
    x = np.asarray(x, float)
    h = np.asarray(h, float)
    d = np.asarray(d, float)
    n, dr, ds = shape_functions_at(r, s)
    tt = np.atleast_1d(float(t))
    jac = geometry.position_derivatives(x[None], h[None], d[None], n, dr, ds, tt)
    q = geometry.lamina_basis_from_tangents(jac[..., 0, :], jac[..., 1, :])
    jinv = batched_inverse(jac)
    fb = geometry.fiber_basis(d)
    b = b_matrix_batch(q @ jinv, q, n, dr, ds, tt, h[None], fb[None, :, :, 0], fb[None, :, :, 1])
    return b[0, 0]


def shape_functions_at(r, s):
    return geometry.shape_functions(np.atleast_1d(float(r)), np.atleast_1d(float(s)))


def lamina_strain(x0, h0, d0, x, h, d, r, s, t):
    """Almansi strain tensor in current lamina components at one point."""
    j0 = geometry.jacobian(x0, h0, d0, r, s, t, check=False)
    j1 = geometry.jacobian(x, h, d, r, s, t, check=False)
    q0 = geometry.lamina_basis_from_tangents(j0[0], j0[1])
    q1 = geometry.lamina_basis_from_tangents(j1[0], j1[1])
    f = deformation_gradient_lamina(j0 @ q0.T, j1 @ q1.T)
    return almansi_strain(f)


def fiber_strain_average(eps_global, directors, conn, nnodes):
    """Project column-averaged strains on the directors and average per node.

    ``eps_global`` (ne,9,3,3) holds each element's through-fiber mean strain
    at its nodes. Shared nodes receive the equal-weight mean of the
    adjacent elements.
    """
    d = directors[conn]  # (ne,9,3)
    proj = np.einsum("eai,eaij,eaj->ea", d, eps_global, d)
    total = np.zeros(nnodes)
    count = np.zeros(nnodes)
    np.add.at(total, conn, proj)
    np.add.at(count, conn, 1.0)
    return total / np.maximum(count, 1.0)


def update_fiber_lengths(h_ref, fiber_strain):
    """``h = h_ref (1 + eps_f)`` with a positivity check."""
    factor = 1.0 + np.asarray(fiber_strain, float)
    if np.any(factor <= 0.0):
        raise NonPositiveThickness("fiber strain below -1")
    return np.asarray(h_ref, float) * factor
