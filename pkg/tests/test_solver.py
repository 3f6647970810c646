import numpy as np
import pytest

from cbshell import geometry
from cbshell.errors import NonFiniteState
from cbshell.kinematics import update_director
from cbshell.benchmarks import experiment1, solve_static
from cbshell.mesh import TimeControls, model_from_dict
from cbshell.solver import (
    Assembler, critical_time_step, initial_state, load_ramp_end, run, step, stress_at,
)

from helpers import node_id, patch_model, plate, plate_dict


def _deform(state, rng, amp=0.02):
    out = state.copy()
    out.x = state.x + amp * rng.standard_normal(state.x.shape)
    d = state.d + amp * rng.standard_normal(state.d.shape)
    out.d = d / np.linalg.norm(d, axis=1, keepdims=True)
    out.fiber = geometry.fiber_basis(out.d)
    out.h = state.h * (1 + amp * rng.standard_normal(len(state.h)))
    return out


def test_mass_conservation():
    a, b, h, rho = 2.0, 1.5, 0.1, 2.5
    model = plate(m=3, n=2, a=a, b=b, h=h, rho=rho, warp=lambda x, y: 0.1 * x * y)
    asm = Assembler(model)
    st = initial_state(model, asm)
    rng = np.random.default_rng(5)
    total = rho * asm.volume
    for state in [st] + [_deform(st, rng) for _ in range(5)]:
        m = asm.lumped_mass(state).reshape(-1, 5)
        for k in range(3):
            assert m[:, k].sum() == pytest.approx(total, rel=1e-10)
        assert np.all(m[:, 3:] > 0)
    flat = Assembler(plate(m=3, n=2, a=a, b=b, h=h, rho=rho))
    assert flat.volume == pytest.approx(a * b * h, rel=1e-12)


def test_rotary_scale_touches_only_rotations():
    model = plate(m=2, n=2)
    st = initial_state(model)
    m1 = Assembler(model).lumped_mass(st).reshape(-1, 5)
    m7 = Assembler(model, rotary_scale=7.0).lumped_mass(st).reshape(-1, 5)
    np.testing.assert_allclose(m7[:, :3], m1[:, :3])
    np.testing.assert_allclose(m7[:, 3:], 7 * m1[:, 3:])


def _dt(model):
    asm = Assembler(model)
    return critical_time_step(asm, initial_state(model, asm), TimeControls(dt_safety=1.0))


@pytest.mark.parametrize("factor", [4.0, 9.0])
def test_time_step_homogeneity(factor):
    base = dict(m=2, n=1, a=2.0, h=0.2, E=1000.0, rho=3.0)
    dt0 = _dt(plate(**base))
    stiff = _dt(plate(**{**base, "E": factor * 1000.0}))
    heavy = _dt(plate(**{**base, "rho": factor * 3.0}))
    assert stiff == pytest.approx(dt0 / np.sqrt(factor), rel=1e-7)
    assert heavy == pytest.approx(dt0 * np.sqrt(factor), rel=1e-7)


def test_internal_forces_balance():
    model = plate(m=2, n=2, a=2.0, b=1.0, warp=lambda x, y: 0.2 * x * x)
    asm = Assembler(model)
    rng = np.random.default_rng(9)
    st = initial_state(model, asm)
    for _ in range(10):
        f = asm.internal_force(_deform(st, rng)).reshape(-1, 5)
        scale = np.max(np.abs(f[:, :3]))
        assert scale > 0
        assert np.all(np.abs(f[:, :3].sum(axis=0)) <= 1e-9 * scale)


def test_tangent_stiffness_matches_force_derivative():
    model = plate(m=1, n=1, warp=lambda x, y: 0.1 * x * y)
    asm = Assembler(model)
    st = initial_state(model, asm)
    dofs = asm.edofs[0]
    k = np.zeros((model.ndof, model.ndof))
    k[np.ix_(dofs, dofs)] = asm.tangent_stiffness(st)[0]
    rng = np.random.default_rng(4)
    du = rng.standard_normal(model.ndof)
    eps = 1e-7

    def force(sign):
        s = st.copy()
        inc = (sign * eps * du).reshape(9, 5)
        s.x = st.x + inc[:, :3]
        s.d, _ = update_director(st.d, st.fiber, inc[:, 3], inc[:, 4])
        return asm.internal_force(s)

    fd = (force(1) - force(-1)) / (2 * eps)
    # at the stress-free reference the geometric stiffness vanishes
    np.testing.assert_allclose(k @ du, fd, rtol=1e-5, atol=1e-6 * np.max(np.abs(fd)))
    np.testing.assert_allclose(k, k.T)


def test_momentum_of_free_element_under_constant_force():
    doc = plate_dict(rho=2.0)
    force = np.array([3.0, -1.0, 2.0])
    doc["loads"] = [{"kind": "nodal_force", "node": node_id(doc, 0.5, 0.5), "force": list(force)}]
    model = model_from_dict(doc)
    asm = Assembler(model)
    st = initial_state(model, asm)
    ctl = TimeControls(dt_reeval_every=0)
    st.dt = critical_time_step(asm, st, ctl)
    n = 50
    for _ in range(n):
        step(st, asm, ctl)
    p = (st.mass * st.v).reshape(-1, 5)[:, :3].sum(axis=0)
    np.testing.assert_allclose(p, force * (n - 0.5) * st.dt, rtol=1e-9)


def test_external_force_resultants():
    a, h, rho, p = 2.0, 0.1, 4.0, 3.0
    doc = plate_dict(m=2, n=2, a=a, b=a, h=h, rho=rho)
    doc["loads"] = [{"kind": "surface_pressure", "face": "top", "magnitude": p}]
    model = model_from_dict(doc)
    asm = Assembler(model)
    f = asm.external_force(initial_state(model, asm), 0.0).reshape(-1, 5)
    np.testing.assert_allclose(f[:, :3].sum(axis=0), [0, 0, -p * a * a], atol=1e-12)
    doc["loads"] = [{"kind": "body_force", "vector": [0, 0, -9.0]}]
    model = model_from_dict(doc)
    asm = Assembler(model)
    f = asm.external_force(initial_state(model, asm), 0.0).reshape(-1, 5)
    assert f[:, 2].sum() == pytest.approx(-9.0 * rho * a * a * h)


def test_patch_constant_stress():
    a, E, nu, sigma = 2.0, 1000.0, 0.3, 0.01
    sol = solve_static(patch_model(a=a, E=E, nu=nu, sigma=sigma), ke_tol=1e-16)
    st, asm = sol.state, sol.assembler
    free = asm.dofmap.free
    f_ext = asm.external_force(st, st.time)
    resid = (f_ext - asm.internal_force(st))[free]
    assert np.linalg.norm(resid) <= 1e-6 * np.linalg.norm(f_ext[free])
    for r, s, t in [(-0.7, 0.2, 0.5), (0.9, -0.9, -0.5), (0.0, 0.0, 0.0)]:
        sig = stress_at(asm, st, 0, r, s, t)
        assert sig[0, 0] == pytest.approx(sigma, rel=1e-4)
        assert abs(sig[1, 1]) <= 1e-4 * sigma and abs(sig[0, 1]) <= 1e-4 * sigma
    u = st.u.reshape(-1, 5)
    far = sol.model.node_index(node_id(sol.model, a, a))
    assert u[far, 0] == pytest.approx(sigma * a / E, rel=1e-4)
    assert u[far, 1] == pytest.approx(-nu * sigma * a / E, rel=1e-4)


def test_energy_balance_undamped():
    model = experiment1("2x2")
    asm = Assembler(model)
    st = initial_state(model, asm)
    ctl = TimeControls(dt_reeval_every=0)
    st.dt = critical_time_step(asm, st, ctl)
    work, peak, drift = 0.0, 0.0, 0.0
    for _ in range(1000):
        f0, u0 = asm.external_force(st, st.time), st.u.copy()
        step(st, asm, ctl)
        work += 0.5 * (f0 + asm.external_force(st, st.time)) @ (st.u - u0)
        peak = max(peak, abs(work))
        drift = max(drift, abs(st.kinetic_energy() + asm.strain_energy(st) - work))
    assert drift <= 0.01 * peak


def test_stability_bracket_quick():
    model = experiment1("1x1")
    asm = Assembler(model)
    st0 = initial_state(model, asm)
    dtc = critical_time_step(asm, st0, TimeControls(dt_safety=1.0))
    ok = initial_state(model, asm)
    ok.dt = 0.9 * dtc
    for _ in range(2000):
        step(ok, asm, TimeControls())
    bad = initial_state(model, asm)
    bad.dt = 1.5 * dtc
    with pytest.raises(NonFiniteState):
        for _ in range(500):
            step(bad, asm, TimeControls())


def test_run_stop_reasons_and_probes():
    model = experiment1("1x1")
    res = run(model, TimeControls(max_steps=25, dt_reeval_every=10))
    assert res.stop_reason == "max_steps" and len(res.probe("center_w")) == 26
    assert res.loops == 25 * model.nelements
    res = run(model, TimeControls(t_end=5 * res.dt_history[0], dt_reeval_every=0))
    assert res.stop_reason == "t_end"
    with pytest.raises(NonFiniteState):
        run(model, TimeControls(dt=1e-3, max_steps=200))


def test_prescribed_displacement_applied():
    doc = plate_dict()
    doc["bcs"] = [{"node": 1, "fix": [1, 1, 1, 1, 1], "value": [0.01, 0, 0, 0, 0]}]
    model = model_from_dict(doc)
    st = initial_state(model)
    assert st.x[0, 0] == pytest.approx(0.01)


def test_load_ramp_end():
    doc = plate_dict()
    doc["loads"] = [{"kind": "body_force", "vector": [0, 0, 1], "time": {"type": "ramp", "t_ramp": 0.3}}]
    assert load_ramp_end(model_from_dict(doc)) == 0.3
