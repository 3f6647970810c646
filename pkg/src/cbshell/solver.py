"""Force and mass assembly, critical time step and explicit integration.

All element work is vectorized over elements and quadrature points. The
strain measure is the Almansi strain of the current configuration relative
to the initial one, both expressed in their own lamina frames; the force is
evaluated in the current configuration with the current Jacobian (updated
Lagrangian). Fiber lengths follow one step behind the other kinematic
quantities.
"""

from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import NonFiniteState, NonPositiveLumpedMass
from .kinematics import (
    NDOF,
    NEN,
    almansi_from_inverse,
    b_matrix_batch,
    fiber_strain_average,
    reduced_to_tensor,
    tensor_to_reduced,
    update_director,
    update_fiber_lengths,
)
from .mesh import FACES, build_dof_map
from .numerics import max_generalized_eigenvalue

_COL_T = np.array([-1.0, 1.0]) / np.sqrt(3.0)


def _dof_indices(conn):
    return (NDOF * conn[:, :, None] + np.arange(NDOF)).reshape(len(conn), NEN * NDOF)


class Assembler:
    """Precomputed quadrature tables and reference data for one model."""

    def __init__(self, model, rule=geometry.FULL_RULE, rotary_scale=1.0):
        self.model = model
        self.rotary_scale = float(rotary_scale)
        self.rule = rule
        self.material = model.material
        self.dofmap = build_dof_map(model)
        self.edofs = _dof_indices(model.conn)
        self.tab = geometry.shape_functions(rule.r, rule.s)
        # nodal columns for the fiber-length update: each node's (r, s) at two t
        rs = np.repeat(geometry.NODE_RS, 2, axis=0)
        self.col_t = np.tile(_COL_T, NEN)
        self.col_tab = geometry.shape_functions(rs[:, 0], rs[:, 1])
        # face rule for surface loads
        g, w = np.polynomial.legendre.leggauss(3)
        fr, fs = np.meshgrid(g, g, indexing="ij")
        self.face_w = np.outer(w, w).ravel()
        self.face_tab = geometry.shape_functions(fr.ravel(), fs.ravel())

        x, h, d = model.element_arrays()
        self.h0 = model.thickness.copy()
        n, dr, ds = self.tab
        j0 = geometry.position_derivatives(x, h, d, n, dr, ds, rule.t)
        q0 = geometry.lamina_basis_from_tangents(j0[..., 0, :], j0[..., 1, :])
        self.det0 = np.linalg.det(j0)
        self.a0 = q0 @ np.swapaxes(j0, -1, -2)  # F^-1 = a0 (q J^-1)^T
        self.rhojw = self.material.rho * self.det0 * rule.weight
        n, dr, ds = self.col_tab
        jc = geometry.position_derivatives(x, h, d, n, dr, ds, self.col_t)
        qc = geometry.lamina_basis_from_tangents(jc[..., 0, :], jc[..., 1, :])
        self.a0_col = qc @ np.swapaxes(jc, -1, -2)
        self.volume = float(self.rhojw.sum() / self.material.rho)
        self.element_volume = self.rhojw.sum(axis=1) / self.material.rho
        self._ref_face = {}
        self._prepare_loads()

    # ------------------------------------------------------------ kinematics

    def _element_state(self, state, elements=None):
        conn = self.model.conn if elements is None else self.model.conn[elements]
        return state.x[conn], state.h[conn], state.d[conn], state.fiber[conn]

    def evaluate(self, state, elements=None, need_b=True):
        """Kinematic and stress quantities at all quadrature points."""
        sel = slice(None) if elements is None else elements
        x, h, d, fib = self._element_state(state, elements)
        n, dr, ds = self.tab
        jac = geometry.position_derivatives(x, h, d, n, dr, ds, self.rule.t)
        q = geometry.lamina_basis_from_tangents(jac[..., 0, :], jac[..., 1, :])
        jinv = np.linalg.inv(jac)
        det = np.linalg.det(jac)
        qj = q @ jinv
        finv = self.a0[sel] @ np.swapaxes(qj, -1, -2)
        eps = tensor_to_reduced(almansi_from_inverse(finv))
        sig = self.material.stress(eps)
        out = {"det": det, "eps": eps, "sig": sig, "q": q}
        if need_b:
            out["B"] = b_matrix_batch(qj, q, n, dr, ds, self.rule.t, h, fib[..., 0], fib[..., 1])
        return out

    def column_strains(self, state):
        """Through-fiber mean strain (global components) at every element node."""
        x, h, d, _ = self._element_state(state)
        n, dr, ds = self.col_tab
        jac = geometry.position_derivatives(x, h, d, n, dr, ds, self.col_t)
        q = geometry.lamina_basis_from_tangents(jac[..., 0, :], jac[..., 1, :])
        qj = q @ np.linalg.inv(jac)
        finv = self.a0_col @ np.swapaxes(qj, -1, -2)
        eps_l = almansi_from_inverse(finv)
        red = tensor_to_reduced(eps_l)
        e33 = self.material.normal_strain(red)
        eps_l = reduced_to_tensor(red, e33)
        eps_g = np.swapaxes(q, -1, -2) @ eps_l @ q
        ne = len(x)
        return eps_g.reshape(ne, NEN, 2, 3, 3).mean(axis=2)

    def fiber_lengths(self, state):
        eps = self.column_strains(state)
        ef = fiber_strain_average(eps, state.d, self.model.conn, self.model.nnodes)
        return update_fiber_lengths(self.h0, ef)

    # ------------------------------------------------------------ element arrays

    def internal_force_elements(self, state, elements=None, kin=None):
        kin = self.evaluate(state, elements) if kin is None else kin
        wdet = kin["det"] * self.rule.weight
        return np.einsum("epij,epi,ep->ej", kin["B"], kin["sig"], wdet)

    def internal_force(self, state, kin=None):
        fe = self.internal_force_elements(state, kin=kin)
        f = np.zeros(self.model.ndof)
        np.add.at(f, self.edofs, fe)
        return f

    def strain_energy(self, state, kin=None):
        kin = self.evaluate(state, need_b=False) if kin is None else kin
        dens = 0.5 * np.einsum("epi,epi->ep", kin["eps"], kin["sig"])
        return float(np.sum(dens * kin["det"] * self.rule.weight))

    def tangent_stiffness(self, state, elements=None):
        """Material stiffness ``sum B^T C~ B J w`` per element (ne,45,45)."""
        kin = self.evaluate(state, elements)
        b = kin["B"]
        wdet = kin["det"] * self.rule.weight
        cb = np.einsum("ij,epjk->epik", self.material.C_red, b)
        k = np.einsum("epij,epik,ep->ejk", b, cb, wdet)
        return 0.5 * (k + np.swapaxes(k, -1, -2))

    def consistent_mass(self, state, elements=None):
        """Consistent mass matrices (ne,45,45) with the full interpolation."""
        sel = slice(None) if elements is None else elements
        _, h, _, fib = self._element_state(state, elements)
        n = self.tab[0]
        t = self.rule.t
        ne = len(h)
        nmat = np.zeros((ne, len(t), 3, NEN, NDOF))
        for i in range(3):
            nmat[:, :, i, :, i] = n[None]
        g = -0.5 * h[:, None, :, None] * (t[None, :, None, None] * n[None, :, :, None])
        # rotational columns: -(t/2) h_a N_a e_beta^f
        nmat[:, :, :, :, 3] = np.einsum("epa,eai->epia", g[..., 0], fib[..., 0])
        nmat[:, :, :, :, 4] = np.einsum("epa,eai->epia", g[..., 0], fib[..., 1])
        nmat = nmat.reshape(ne, len(t), 3, NEN * NDOF)
        return np.einsum("epij,epik,ep->ejk", nmat, nmat, self.rhojw[sel])

    def lumped_mass_elements(self, state, elements=None):
        """Row-sum lumped masses per element (ne,45).

        Rows are summed within each DOF family (translation components,
        theta1, theta2) so the translational totals equal the element mass
        exactly. A non-positive rotational entry switches that element's
        rotational block to diagonal scaling. ``rotary_scale`` multiplies
        the rotational entries (fictitious inertia for dynamic relaxation).
        """
        mc = self.consistent_mass(state, elements)
        fam = np.tile([0, 0, 0, 1, 2], NEN)
        comp = np.tile([0, 1, 2, 3, 4], NEN)
        same = (comp[:, None] == comp[None, :]) & (fam[:, None] == fam[None, :])
        lumped = np.einsum("ejk,jk->ej", mc, same.astype(float))
        rot = fam > 0
        bad = np.any(lumped[:, rot] <= 0.0, axis=1)
        if np.any(bad):
            diag = np.einsum("ejj->ej", mc)
            for e in np.nonzero(bad)[0]:
                trans_total = lumped[e, ~rot].sum()
                scale = trans_total / diag[e, ~rot].sum()
                lumped[e, rot] = diag[e, rot] * scale
                if np.any(lumped[e, rot] <= 0.0):
                    raise NonPositiveLumpedMass(f"element {self.model.element_ids[e]}")
        lumped[:, rot] *= self.rotary_scale
        return lumped

    def lumped_mass(self, state):
        me = self.lumped_mass_elements(state)
        m = np.zeros(self.model.ndof)
        np.add.at(m, self.edofs, me)
        return m

    # ------------------------------------------------------------ loads

    def _prepare_loads(self):
        self.nodal_loads = []
        for load in self.model.loads:
            if load.kind == "nodal_force":
                i = self.model.node_index(load.node)
                self.nodal_loads.append((i, np.array(load.vector), np.array(load.moment), load.time))

    def _element_selection(self, load):
        if not load.elements:
            return None
        ids = {int(e): k for k, e in enumerate(self.model.element_ids)}
        return np.array([ids[int(e)] for e in load.elements])

    def _face_vectors(self, x, h, d, tface):
        n, dr, ds = self.face_tab
        tt = np.full(len(self.face_w), tface)
        jac = geometry.position_derivatives(x, h, d, n, dr, ds, tt)
        return np.cross(jac[..., 0, :], jac[..., 1, :])  # J_s times unit normal

    def _scatter_element_force(self, f, elements, traction_w, n, tvals, h, fib):
        """Add ``N^T traction`` for tractions (ne,np,3) already weighted."""
        trans = np.einsum("pa,epi->eai", n, traction_w)
        g = -0.5 * h[:, None, :] * (tvals[None, :, None] * n[None])  # (ne,np,9)
        th1 = np.einsum("epa,eai,epi->ea", g, fib[..., 0], traction_w)
        th2 = np.einsum("epa,eai,epi->ea", g, fib[..., 1], traction_w)
        fe = np.concatenate([trans, th1[..., None], th2[..., None]], axis=-1).reshape(len(h), -1)
        edofs = self.edofs if elements is None else self.edofs[elements]
        np.add.at(f, edofs, fe)

    def external_force(self, state, t):
        f = np.zeros(self.model.ndof)
        for k, load in enumerate(self.model.loads):
            scale = load.time(t)
            if scale == 0.0:
                continue
            if load.kind == "surface_pressure":
                sel = self._element_selection(load)
                x, h, d, fib = self._element_state(state, sel)
                tface = FACES[load.face]
                if load.follower:
                    area = self._face_vectors(x, h, d, tface)
                else:
                    if k not in self._ref_face:
                        x0, h0, d0 = self.model.element_arrays(sel)
                        self._ref_face[k] = self._face_vectors(x0, h0, d0, tface)
                    area = self._ref_face[k]
                # pressure pushes against the outward normal of the face
                traction = -tface * load.magnitude * scale * area * self.face_w[None, :, None]
                tvals = np.full(len(self.face_w), tface)
                self._scatter_element_force(f, sel, traction, self.face_tab[0], tvals, h, fib)
            elif load.kind == "body_force":
                sel = self._element_selection(load)
                _, h, _, fib = self._element_state(state, sel)
                rhojw = self.rhojw if sel is None else self.rhojw[sel]
                vec = np.asarray(load.vector) * scale
                traction = rhojw[..., None] * vec
                self._scatter_element_force(f, sel, traction, self.tab[0], self.rule.t, h, fib)
        for i, force, moment, tf in self.nodal_loads:
            scale = tf(t)
            if scale == 0.0:
                continue
            base = NDOF * i
            f[base : base + 3] += scale * force
            s = state.fiber[i]
            f[base + 3] += -scale * moment @ s[:, 1]
            f[base + 4] += scale * moment @ s[:, 0]
        return f

    # ------------------------------------------------------------ time step

    def element_time_steps(self, state, elements=None):
        """Stable step ``2 / sqrt(lambda_max(M^-1 K))`` of each element alone."""
        idx = np.arange(self.model.nelements) if elements is None else np.atleast_1d(elements)
        k = self.tangent_stiffness(state, idx)
        m = self.lumped_mass_elements(state, idx)
        free = ~self.dofmap.fixed[self.edofs[idx]]
        out = np.empty(len(idx))
        for i in range(len(idx)):
            f = free[i]
            if not np.any(f):
                out[i] = np.inf
                continue
            lam = max_generalized_eigenvalue(k[i][np.ix_(f, f)], m[i][f])
            out[i] = 2.0 / np.sqrt(lam) if lam > 0.0 else np.inf
        return out


@dataclass
class SimState:
    """Mutable solution state of an explicit run."""

    x: np.ndarray
    d: np.ndarray
    h: np.ndarray
    fiber: np.ndarray
    u: np.ndarray
    v: np.ndarray
    a: np.ndarray
    mass: np.ndarray
    time: float = 0.0
    step: int = 0
    loops: int = 0
    dt: float = 0.0
    dt_prev: float = 0.0
    element_dt: np.ndarray = None
    worst_element: int = 0
    f_ext: np.ndarray = None
    w_ext: float = 0.0
    w_damp: float = 0.0
    ke_peak: float = 0.0
    energy_scale: float = 0.0
    history: dict = field(default_factory=dict)

    def copy(self):
        out = SimState(**{k: (v.copy() if isinstance(v, np.ndarray) else v) for k, v in self.__dict__.items()})
        out.history = {k: list(v) for k, v in self.history.items()}
        return out

    def kinetic_energy(self):
        return 0.5 * float(np.sum(self.mass * self.v**2))


def initial_state(model, assembler=None):
    asm = Assembler(model) if assembler is None else assembler
    n = model.nnodes
    x = model.coords.copy()
    d = model.directors.copy()
    state = SimState(
        x=x, d=d, h=model.thickness.copy(), fiber=geometry.fiber_basis(d),
        u=np.zeros(model.ndof), v=np.zeros(model.ndof), a=np.zeros(model.ndof),
        mass=np.zeros(model.ndof),
    )
    pres = asm.dofmap.prescribed
    if np.any(pres != 0.0):
        _apply_increment(state, pres.copy(), asm)
        state.u = pres.copy()
    state.mass = asm.lumped_mass(state)
    free = asm.dofmap.free
    if np.any(state.mass[free] <= 0.0):
        raise NonPositiveLumpedMass("non-positive lumped mass on a free DOF")
    state.mass[~free] = np.maximum(state.mass[~free], 1e-300)
    del n
    return state


def _apply_increment(state, du, asm):
    """Move nodes and rotate directors by a DOF increment."""
    inc = du.reshape(-1, NDOF)
    state.x = state.x + inc[:, :3]
    if np.any(inc[:, 3:]):
        new_d, _ = update_director(state.d, state.fiber, inc[:, 3], inc[:, 4])
        state.d = new_d


def critical_time_step(assembler, state, controls, elements=None):
    """Safety-scaled critical step; updates the per-element record."""
    if elements is None or state.element_dt is None:
        state.element_dt = assembler.element_time_steps(state)
    else:
        state.element_dt[elements] = assembler.element_time_steps(state, elements)
    state.worst_element = int(np.argmin(state.element_dt))
    return controls.dt_safety * float(state.element_dt[state.worst_element])


def _rotate_rotational_velocity(v, old_fiber, new_fiber):
    vr = v.reshape(-1, NDOF)
    omega = vr[:, 4:5] * old_fiber[:, :, 0] - vr[:, 3:4] * old_fiber[:, :, 1]
    vr[:, 3] = -np.einsum("ni,ni->n", omega, new_fiber[:, :, 1])
    vr[:, 4] = np.einsum("ni,ni->n", omega, new_fiber[:, :, 0])


def step(state, assembler, controls, dt=None, kin=None):
    """Advance one central-difference step in place; returns the state.

    Velocities live at half steps. Damping is mass proportional and treated
    with the centered average of the bracketing half-step velocities.
    """
    asm = assembler
    free = asm.dofmap.free
    if dt is None:
        dt = state.dt
    kin = asm.evaluate(state) if kin is None else kin
    f_int = asm.internal_force(state, kin=kin)
    f_ext = asm.external_force(state, state.time)
    h_next = asm.fiber_lengths(state)
    state.loops += asm.model.nelements

    c = controls.damping
    dt_mid = dt if state.step == 0 else 0.5 * (state.dt_prev + dt)
    if state.step == 0:
        dt_mid = 0.5 * dt
    r = (f_ext - f_int) / state.mass
    v_old = state.v
    v_new = ((1.0 - 0.5 * c * dt_mid) * v_old + dt_mid * r) / (1.0 + 0.5 * c * dt_mid)
    v_new[~free] = 0.0
    state.a = np.where(free, (v_new - v_old) / dt_mid, 0.0)
    v_center = 0.5 * (v_old + v_new)

    # energy bookkeeping with the displacement increment of the last step
    if state.f_ext is not None and state.step > 0:
        du_prev = state.history.get("_du")
        if du_prev is not None:
            state.w_ext += 0.5 * float((state.f_ext + f_ext) @ du_prev)
    state.w_damp += float(c * dt_mid * np.sum(state.mass * v_center**2))
    state.f_ext = f_ext

    du = dt * v_new
    old_fiber = state.fiber
    _apply_increment(state, du, asm)
    state.h = h_next
    state.fiber = geometry.fiber_basis(state.d)
    _rotate_rotational_velocity(v_new, old_fiber, state.fiber)
    state.v = v_new
    state.u = state.u + du
    state.history["_du"] = du
    state.dt_prev = dt
    state.time += dt
    state.step += 1

    ke = state.kinetic_energy()
    state.ke_peak = max(state.ke_peak, ke)
    # the work of the step just taken is not booked yet; include it here
    state.energy_scale = max(state.energy_scale, abs(state.w_ext), abs(state.w_ext + f_ext @ du))
    bad = not (np.all(np.isfinite(state.v)) and np.all(np.isfinite(state.x)))
    if not bad and state.energy_scale > 0.0 and ke > 1e6 * state.energy_scale:
        bad = True
    if bad:
        raise NonFiniteState(f"solution diverged at step {state.step}", state.step, state.time)
    return state


@dataclass
class RunResult:
    state: object
    times: np.ndarray
    steps: np.ndarray
    probes: dict
    loops: int
    dt_history: list
    converged: bool = False
    stop_reason: str = ""

    def probe(self, name):
        return np.asarray(self.probes[name])


def load_ramp_end(model):
    t_full = 0.0
    for load in model.loads:
        if load.time.kind == "ramp":
            t_full = max(t_full, load.time.t_ramp)
    return t_full


def run(model, controls=None, probes=None, assembler=None, state=None, callback=None,
        snapshot=None):
    """Integrate a model with explicit central differences.

    ``probes`` is a list of :class:`~cbshell.mesh.Probe` (defaults to the
    model's). When ``controls.ke_tol`` is positive the run stops as soon as
    the loads are fully applied and the kinetic energy has decayed below
    ``ke_tol`` times its peak.
    """
    controls = model.time if controls is None else controls
    probes = model.probes if probes is None else probes
    asm = Assembler(model) if assembler is None else assembler
    state = initial_state(model, asm) if state is None else state
    if controls.dt > 0.0:
        dt = controls.dt
        if state.element_dt is None:
            state.element_dt = np.full(model.nelements, dt)
    else:
        dt = critical_time_step(asm, state, controls)
    state.dt = dt
    idx = [NDOF * model.node_index(p.node) + p.dof for p in probes]
    names = [p.name for p in probes]
    rec = {name: [float(state.u[i])] for name, i in zip(names, idx)}
    times, steps = [state.time], [state.step]
    dt_hist = [dt]
    t_full = load_ramp_end(model)
    converged, reason = False, "max_steps"
    start_step = state.step
    while state.step - start_step < controls.max_steps:
        if state.time >= controls.t_end - 1e-12 * max(dt, 1e-300):
            reason = "t_end"
            break
        every = controls.dt_reeval_every
        if controls.dt <= 0.0 and every > 0 and state.step > 0 and state.step % every == 0:
            state.mass = asm.lumped_mass(state)
            state.mass[~asm.dofmap.free] = np.maximum(state.mass[~asm.dofmap.free], 1e-300)
            dt = critical_time_step(asm, state, controls, elements=[state.worst_element])
            state.dt = dt
            dt_hist.append(dt)
        step(state, asm, controls)
        for name, i in zip(names, idx):
            rec[name].append(float(state.u[i]))
        times.append(state.time)
        steps.append(state.step)
        if snapshot is not None and controls.snapshot_every and state.step % controls.snapshot_every == 0:
            snapshot(state)
        if callback is not None and callback(state) is False:
            reason = "callback"
            break
        if controls.ke_tol > 0.0 and state.time >= t_full and state.step > 10:
            if state.kinetic_energy() <= controls.ke_tol * state.ke_peak:
                converged, reason = True, "relaxed"
                break
    return RunResult(
        state=state, times=np.array(times), steps=np.array(steps),
        probes={k: np.array(v) for k, v in rec.items()}, loops=state.loops,
        dt_history=dt_hist, converged=converged, stop_reason=reason,
    )


# ---------------------------------------------------------------- post-processing


def stress_at(assembler, state, element, r, s, t=0.0):
    """Cauchy stress tensor in global components at a parent point."""
    asm = assembler
    x, h, d, _ = asm._element_state(state, [element])
    x0, h0, d0 = asm.model.element_arrays([element])
    tab = geometry.shape_functions(np.atleast_1d(float(r)), np.atleast_1d(float(s)))
    tt = np.atleast_1d(float(t))
    j0 = geometry.position_derivatives(x0, h0, d0, *tab, tt)
    q0 = geometry.lamina_basis_from_tangents(j0[..., 0, :], j0[..., 1, :])
    j1 = geometry.position_derivatives(x, h, d, *tab, tt)
    q1 = geometry.lamina_basis_from_tangents(j1[..., 0, :], j1[..., 1, :])
    finv = (q0 @ np.swapaxes(j0, -1, -2)) @ np.swapaxes(q1 @ np.linalg.inv(j1), -1, -2)
    red = tensor_to_reduced(almansi_from_inverse(finv))
    mat = asm.material
    sig_red = mat.stress(red)[0, 0]
    full = np.zeros(6)
    full[[0, 1, 3, 4, 5]] = sig_red
    if mat.normal == "zero_strain":
        full[2] = mat.C[2, [0, 1, 3, 4, 5]] @ red[0, 0]
    sl = np.array(
        [[full[0], full[3], full[4]], [full[3], full[1], full[5]], [full[4], full[5], full[2]]]
    )
    q = q1[0, 0]
    return q.T @ sl @ q


def nodal_stress(assembler, state, node_index):
    """Mid-surface stress at a node averaged over the elements sharing it."""
    conn = assembler.model.conn
    acc = np.zeros((3, 3))
    count = 0
    for e, a in zip(*np.nonzero(conn == node_index)):
        r, s = geometry.NODE_RS[a]
        acc += stress_at(assembler, state, e, r, s, 0.0)
        count += 1
    return acc / max(count, 1)
