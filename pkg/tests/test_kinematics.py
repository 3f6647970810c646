import numpy as np
import pytest

from cbshell import geometry
from cbshell.errors import DegenerateDirector, NonPositiveThickness
from cbshell.kinematics import (
    almansi_strain, b_matrix_lamina, deformation_gradient_lamina, lamina_strain, reduced_to_tensor,
    tensor_to_reduced, update_director, update_fiber_lengths,
)
from cbshell.solver import Assembler, initial_state

from helpers import perturbed, plate, random_element, random_rotation


def test_voigt_round_trip():
    rng = np.random.default_rng(1)
    e = rng.standard_normal((3, 3))
    e = e + e.T
    np.testing.assert_allclose(reduced_to_tensor(tensor_to_reduced(e), e[2, 2]), e)


def test_almansi_of_uniaxial_stretch():
    lam = 1.2
    f = np.diag([lam, 1.0, 1.0])
    assert almansi_strain(f)[0, 0] == pytest.approx(0.5 * (1 - 1 / lam**2))
    jr = np.diag([2.0, 1.0, 0.5])
    np.testing.assert_allclose(deformation_gradient_lamina(jr, jr @ f), f.T, atol=1e-14)


def test_director_update_small_rotation():
    d = np.array([0.0, 0.0, 1.0])
    fib = geometry.fiber_basis(d)
    new, dd = update_director(d, fib, 1e-3, 0.0)
    assert np.linalg.norm(new) == pytest.approx(1.0)
    np.testing.assert_allclose(dd, -1e-3 * fib[:, 0], atol=1e-6)
    with pytest.raises(DegenerateDirector):
        update_director(d, fib, 0.0, 0.0, tol=2.0)


def test_fiber_length_positivity():
    np.testing.assert_allclose(update_fiber_lengths([2.0], [0.1]), [2.2])
    with pytest.raises(NonPositiveThickness):
        update_fiber_lengths([1.0], [-1.0])


def _curved():
    return plate(m=2, n=1, a=2.0, b=1.0, h=0.15, warp=lambda x, y: 0.2 * x * x - 0.1 * x * y)


def test_rigid_motions_give_zero_strain_and_force():
    """100 random finite rotations and translations of a curved mesh."""
    model = _curved()
    asm = Assembler(model)
    st = initial_state(model, asm)
    f_scale = None
    rng = np.random.default_rng(7)
    worst_eps, worst_f = 0.0, 0.0
    for _ in range(100):
        rot = random_rotation(rng)
        moved = st.copy()
        moved.x = model.coords @ rot.T + rng.standard_normal(3) * 5.0
        moved.d = model.directors @ rot.T
        moved.fiber = geometry.fiber_basis(moved.d)
        kin = asm.evaluate(moved)
        worst_eps = max(worst_eps, np.max(np.abs(kin["eps"])))
        if f_scale is None:
            # force scale: a unit-strain state stressed by E
            f_scale = model.material.E * asm.volume
        worst_f = max(worst_f, np.max(np.abs(asm.internal_force(moved, kin=kin))) / f_scale)
    assert worst_eps <= 1e-8
    assert worst_f <= 1e-8


def test_b_matrix_matches_finite_differences():
    """B du against central differences of the Almansi strain, 100 cases."""
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        x, h, d = random_element(rng)
        r, s = rng.uniform(-1, 1, 2)
        t = rng.choice([-1, 1]) / np.sqrt(3)
        du = rng.standard_normal(45)
        du[3::5] *= 0.5
        du[4::5] *= 0.5
        eps = 1e-6
        plus = lamina_strain(x, h, d, *perturbed(x, h, d, eps * du), r, s, t)
        minus = lamina_strain(x, h, d, *perturbed(x, h, d, -eps * du), r, s, t)
        fd = (tensor_to_reduced(plus) - tensor_to_reduced(minus)) / (2 * eps)
        b = b_matrix_lamina(x, h, d, r, s, t)
        worst = max(worst, np.linalg.norm(b @ du - fd) / np.linalg.norm(fd))
    assert worst <= 1e-6
