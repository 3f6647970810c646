"""Small dense linear algebra used throughout the solver."""

import numpy as np

from .errors import NoConvergence, SingularMatrix

DET_RTOL = 1e-14
EIG_TOL = 1e-8
EIG_MAX_ITER = 10_000


def _det_tolerance(m):
    scale = np.max(np.abs(m))
    return DET_RTOL * scale**3


def mat3_inverse(m):
    """Inverse of a 3x3 matrix by the adjugate formula.

    Raises SingularMatrix when ``|det(m)|`` is below a tolerance scaled by
    the cube of the largest entry, so results do not depend on length units.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    cof = np.empty((3, 3))
    cof[0, 0] = m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
    cof[0, 1] = m[1, 2] * m[2, 0] - m[1, 0] * m[2, 2]
    cof[0, 2] = m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]
    cof[1, 0] = m[0, 2] * m[2, 1] - m[0, 1] * m[2, 2]
    cof[1, 1] = m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
    cof[1, 2] = m[0, 1] * m[2, 0] - m[0, 0] * m[2, 1]
    cof[2, 0] = m[0, 1] * m[1, 2] - m[0, 2] * m[1, 1]
    cof[2, 1] = m[0, 2] * m[1, 0] - m[0, 0] * m[1, 2]
    cof[2, 2] = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    det = m[0, 0] * cof[0, 0] + m[0, 1] * cof[0, 1] + m[0, 2] * cof[0, 2]
    if not abs(det) > _det_tolerance(m):
        raise SingularMatrix(f"determinant {det:.3e} below tolerance")
    return cof.T / det


def batched_inverse(m):
    """Inverse of a stack of 3x3 matrices, shape ``(..., 3, 3)``."""
    m = np.asarray(m, dtype=float)
    det = np.linalg.det(m)
    scale = np.max(np.abs(m), axis=(-2, -1))
    if np.any(~(np.abs(det) > DET_RTOL * scale**3)):
        raise SingularMatrix("singular 3x3 matrix in batch")
    return np.linalg.inv(m)


def max_eigenvalue(a, tol=EIG_TOL, max_iterations=EIG_MAX_ITER, rng=None):
    """Dominant eigenvalue of a square matrix by power iteration.

    The iteration stops when successive Rayleigh quotients agree to ``tol``
    relative. The start vector is deterministic unless ``rng`` is given.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("max_eigenvalue needs a square matrix")
    n = a.shape[0]
    if n == 0:
        return 0.0
    if n == 1:
        return float(a[0, 0])
    if rng is None:
        rng = np.random.default_rng(12345)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iterations):
        y = a @ x
        lam_new = float(x @ y)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = y / ny
        if abs(lam_new - lam) <= tol * max(abs(lam_new), 1e-300):
            # the Rayleigh quotient of the normalized iterate
            return float(x @ (a @ x))
        lam = lam_new
    raise NoConvergence(f"power iteration did not converge in {max_iterations} iterations")


def max_generalized_eigenvalue(k, m_diag, **kwargs):
    """Largest eigenvalue of ``M^-1 K`` for diagonal positive ``M``.

    Works on the symmetric similar matrix ``M^-1/2 K M^-1/2`` so the power
    iteration Rayleigh quotient is well defined.
    """
    m_diag = np.asarray(m_diag, dtype=float)
    if np.any(m_diag <= 0.0):
        raise ValueError("mass diagonal must be positive")
    s = 1.0 / np.sqrt(m_diag)
    sym = s[:, None] * np.asarray(k, dtype=float) * s[None, :]
    return max_eigenvalue(0.5 * (sym + sym.T), **kwargs)


def dense_max_eigenvalue(a):
    """QR-based reference for small matrices (tests and cross-checks)."""
    a = np.asarray(a, dtype=float)
    if a.shape[0] > 50:
        raise ValueError("dense fallback limited to 50x50")
    return float(np.max(np.linalg.eigvals(a).real))


def solve_dense(a, b):
    """Solve ``a x = b`` with partial-pivot LU; raises SingularMatrix."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularMatrix("non-finite solution")
    if np.linalg.cond(a) > 1e15:
        raise SingularMatrix("matrix is numerically singular")
    return x
