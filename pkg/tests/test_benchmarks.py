import numpy as np
import pytest

from cbshell import benchmarks as B
from cbshell.errors import UnknownExperiment, ValidationError
from cbshell.mesh import model_from_dict, model_to_dict
from cbshell.solver import initial_state


@pytest.mark.parametrize(
    "exp, nodes, elements, probes",
    [(1, 25, 4, ["center_w"]), (2, 33, 5, ["tip_w", "tip_u"]), (3, 21, 3, ["tip_u", "tip_w"]),
     (4, 169, 36, ["free_edge_w"]), (5, 51, 8, ["tip_x", "tip_y"]), (6, 35, 6, ["u_r_inner"])],
)
def test_default_meshes(exp, nodes, elements, probes):
    m = B.generate_benchmark_mesh(exp)
    assert (m.nnodes, m.nelements) == (nodes, elements)
    assert [p.name for p in m.probes] == probes
    again = model_from_dict(model_to_dict(m))
    np.testing.assert_allclose(again.coords, m.coords)


def test_refinement_and_errors():
    assert B.generate_benchmark_mesh(1, "3x3").nelements == 9
    assert B.generate_benchmark_mesh(4, [2, 2]).nelements == 4
    with pytest.raises(UnknownExperiment):
        B.generate_benchmark_mesh(7)
    with pytest.raises(ValidationError):
        B.generate_benchmark_mesh(1, "3by3")


def test_exp3_meshes_share_ends():
    for mesh in B.EXP3_MESHES:
        m = B.experiment3(mesh)
        assert m.coords[:, 0].min() == 0.0 and m.coords[:, 0].max() == pytest.approx(1.0)
        tip = m.node_index(m.meta["tip_node"])
        assert m.coords[tip, 0] == pytest.approx(1.0)
    irr = B.experiment3("irregular3")
    assert len(np.unique(np.round(irr.coords[:, 0], 12))) > len(np.unique(np.round(B.experiment3("regular3").coords[:, 0], 12)))


def test_cylinder_geometry():
    m = B.experiment6()
    r = np.hypot(m.coords[:, 0], m.coords[:, 1])
    assert r.min() == pytest.approx(3.0) and r.max() == pytest.approx(9.0)
    np.testing.assert_allclose(m.directors, np.tile([0, 0, -1.0], (m.nnodes, 1)))
    assert B.experiment6(nu=0.4999).material.nu == 0.4999


def test_twisted_beam_root_and_tip():
    m = B.experiment5()
    z = m.coords[:, 2]
    root, tip = m.coords[z == z.min()], m.coords[z == z.max()]
    assert np.ptp(root[:, 0]) == pytest.approx(0.0, abs=1e-12)
    assert np.ptp(tip[:, 1]) == pytest.approx(0.0, abs=1e-12)
    assert np.ptp(root[:, 1]) == pytest.approx(1.1)


def test_dt_report_rows():
    rows = B.dt_report(B.experiment1("1x1"))
    assert len(rows) == 1
    r = rows[0]
    assert r["ratio"] == pytest.approx(r["dt_eig"] / r["dt_classical"])
    assert B.classical_time_step(2.0, B.experiment1().material) == pytest.approx(
        2.0 / np.sqrt(70e9 / (2700 * 0.91)))


def test_relaxation_scale_is_mass_only():
    m = B.experiment4("2x2")
    assert B.relaxation_rotary_scale(m) > 1.0
    assert B.relaxation_rotary_scale(B.experiment6()) >= 1.0


def test_exp1_single_element_frozen():
    """Regression value for the 1-element quarter plate, static limit."""
    row = B.run_experiment1("1x1")[0]
    assert row.error_percent == pytest.approx(-6.96, abs=0.05)
    assert row.protocol == "static" and row.steps > 0 and row.loops == row.steps


def test_static_matches_linear_solve():
    """Dynamic relaxation reproduces the direct linear solve at small load."""
    model = B.experiment4("2x2")
    sol = B.solve_static(model)
    asm, st = sol.assembler, sol.state
    free = asm.dofmap.free
    k = B.assemble_stiffness(asm, initial_state(model, asm))[np.ix_(free, free)]
    u = np.zeros(model.ndof)
    u[free] = np.linalg.solve(k, asm.external_force(st, np.inf)[free])
    lin = u[5 * model.node_index(model.probes[0].node) + 2]
    assert sol.result.probe("free_edge_w")[-1] == pytest.approx(lin, rel=2e-3)
