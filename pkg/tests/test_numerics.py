import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from cbshell.errors import SingularMatrix
from cbshell.numerics import (
    batched_inverse, dense_max_eigenvalue, mat3_inverse, max_eigenvalue,
    max_generalized_eigenvalue, solve_dense,
)

finite = st.floats(-10.0, 10.0, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(arrays(float, (3, 3), elements=finite))
def test_mat3_inverse_matches_lapack(m):
    with np.errstate(all="ignore"):
        if not abs(np.linalg.det(m)) >= 1e-3:
            return
    np.testing.assert_allclose(mat3_inverse(m) @ m, np.eye(3), atol=1e-8)


def test_mat3_inverse_unit_invariant():
    m = np.diag([1e-6, 2e-6, 3e-6])
    np.testing.assert_allclose(mat3_inverse(m), np.diag(1.0 / np.diag(m)))


def test_singular_raises():
    with pytest.raises(SingularMatrix):
        mat3_inverse(np.ones((3, 3)))
    with pytest.raises(SingularMatrix):
        batched_inverse(np.zeros((2, 3, 3)))


def test_batched_inverse():
    rng = np.random.default_rng(0)
    m = rng.standard_normal((5, 4, 3, 3)) + 3 * np.eye(3)
    np.testing.assert_allclose(batched_inverse(m) @ m, np.broadcast_to(np.eye(3), m.shape), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 20), st.integers(0, 10_000))
def test_power_iteration_matches_eigh(n, seed):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.sort(rng.uniform(0.1, 1.0, n))
    lam[-1] = 2.0  # keep a spectral gap so the iteration settles quickly
    a = q @ np.diag(lam) @ q.T
    assert max_eigenvalue(a) == pytest.approx(2.0, rel=1e-8)
    assert dense_max_eigenvalue(a) == pytest.approx(2.0, rel=1e-12)


def test_generalized_eigenvalue():
    k = np.array([[2.0, -1.0], [-1.0, 2.0]])
    m = np.array([1.0, 4.0])
    ref = np.max(np.linalg.eigvals(np.diag(1 / m) @ k).real)
    assert max_generalized_eigenvalue(k, m) == pytest.approx(ref, rel=1e-8)
    with pytest.raises(ValueError):
        max_generalized_eigenvalue(k, np.array([1.0, 0.0]))


def test_solve_dense():
    a = np.array([[4.0, 1.0], [1.0, 3.0]])
    np.testing.assert_allclose(a @ solve_dense(a, [1.0, 2.0]), [1.0, 2.0])
    with pytest.raises(SingularMatrix):
        solve_dense(np.ones((2, 2)), [1.0, 1.0])
