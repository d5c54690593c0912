"""Planar articulated rigid-body dynamics with a fixed-step integrator.

All operations are pure functions of (model, state): multiple simulations
can run concurrently with no shared mutable state.  The integrator is
semi-implicit Euler (qdot += h*qddot, then q += h*qdot) at h = 0.2 ms,
50 substeps per 10 ms control step — fixed-step for bit-exact determinism.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import engine
from .errors import SimulationDiverged
from .model import ModelDefinition

SUBSTEP_H = 2e-4          # s
SUBSTEPS_PER_CONTROL = 50
CONTROL_DT = SUBSTEP_H * SUBSTEPS_PER_CONTROL   # 10 ms


@dataclass
class SimState:
    """Generalized coordinates, velocities, muscle states, and the clock."""

    q: np.ndarray             # ndof
    qdot: np.ndarray          # ndof
    activations: np.ndarray   # per muscle, in [0, 1]
    fiber_lengths: np.ndarray  # per muscle, m; meaningful in compliant mode
    time: float = 0.0

    def copy(self) -> "SimState":
        return SimState(self.q.copy(), self.qdot.copy(),
                        self.activations.copy(), self.fiber_lengths.copy(),
                        self.time)


def initial_state(model: ModelDefinition, pose: str = "reference",
                  activation: float | None = None) -> SimState:
    """State at a named model pose with uniform activations."""
    q = np.array(model.pose(pose), dtype=float)
    a = model.baseline_activation if activation is None else activation
    nm = len(model.muscles)
    state = SimState(q=q, qdot=np.zeros_like(q),
                     activations=np.full(nm, float(a)),
                     fiber_lengths=np.zeros(nm))
    kin = forward_kinematics(model, state)
    pm = engine.pack(model)
    L, _, _ = engine.muscle_geometry(pm.parent, pm.dof, kin._cs, kin._sn,
                                     kin._porg, kin._axisp, pm.mu_npts,
                                     pm.mu_body, pm.mu_pt, state.qdot, pm.ndof)
    state.fiber_lengths = (L - pm.mu_lslack) / pm.mu_cospenn
    return state


@dataclass
class Kinematics:
    """World-frame poses and velocities of bodies and named stations."""

    body_position: dict[str, tuple[float, float]]
    body_orientation: dict[str, float]
    body_linear_velocity: dict[str, tuple[float, float]]
    body_angular_velocity: dict[str, float]
    stations: dict[str, tuple[float, float]]
    station_velocities: dict[str, tuple[float, float]]
    com_position: tuple[float, float]
    com_velocity: tuple[float, float]
    sphere_positions: dict[str, tuple[float, float]]
    sphere_velocities: dict[str, tuple[float, float]]
    # Internal kernel arrays, kept for downstream force computations.
    _cs: np.ndarray = field(repr=False, default=None)
    _sn: np.ndarray = field(repr=False, default=None)
    _w: np.ndarray = field(repr=False, default=None)
    _porg: np.ndarray = field(repr=False, default=None)
    _vorg: np.ndarray = field(repr=False, default=None)
    _axisp: np.ndarray = field(repr=False, default=None)


def forward_kinematics(model: ModelDefinition, state: SimState) -> Kinematics:
    """Exact chain composition from the pelvis outward."""
    pm = engine.pack(model)
    cs, sn, phi, w, porg, vorg, axisp, pcom, vcom, a0com = engine.fk(
        pm.parent, pm.dof, pm.anchor_p, pm.anchor_c, pm.com,
        state.q, state.qdot)

    def world_point(b, pt):
        return (porg[b, 0] + cs[b] * pt[0] - sn[b] * pt[1],
                porg[b, 1] + sn[b] * pt[0] + cs[b] * pt[1])

    def world_velocity(b, pw):
        return (vorg[b, 0] - w[b] * (pw[1] - porg[b, 1]),
                vorg[b, 1] + w[b] * (pw[0] - porg[b, 0]))

    body_position = {}
    body_orientation = {}
    body_linear_velocity = {}
    body_angular_velocity = {}
    for name, i in pm.body_index.items():
        body_position[name] = (porg[i, 0], porg[i, 1])
        body_orientation[name] = phi[i]
        body_linear_velocity[name] = (vorg[i, 0], vorg[i, 1])
        body_angular_velocity[name] = w[i]

    stations = {}
    station_velocities = {}
    for k, name in enumerate(pm.station_names):
        pw = world_point(pm.st_body[k], pm.st_pt[k])
        stations[name] = pw
        station_velocities[name] = world_velocity(pm.st_body[k], pw)

    sphere_positions = {}
    sphere_velocities = {}
    for k, sid in enumerate(pm.sphere_ids):
        pw = world_point(pm.sp_body[k], pm.sp_center[k])
        sphere_positions[sid] = pw
        sphere_velocities[sid] = world_velocity(pm.sp_body[k], pw)

    total = pm.mass.sum()
    com_position = (float(pm.mass @ pcom[:, 0] / total),
                    float(pm.mass @ pcom[:, 1] / total))
    com_velocity = (float(pm.mass @ vcom[:, 0] / total),
                    float(pm.mass @ vcom[:, 1] / total))

    return Kinematics(
        body_position=body_position,
        body_orientation=body_orientation,
        body_linear_velocity=body_linear_velocity,
        body_angular_velocity=body_angular_velocity,
        stations=stations,
        station_velocities=station_velocities,
        com_position=com_position,
        com_velocity=com_velocity,
        sphere_positions=sphere_positions,
        sphere_velocities=sphere_velocities,
        _cs=cs, _sn=sn, _w=w, _porg=porg, _vorg=vorg, _axisp=axisp,
    )


@dataclass
class GeneralizedForces:
    """Per-source generalized force breakdown; tau is their sum."""

    muscle: np.ndarray
    ligament: np.ndarray
    contact: np.ndarray
    gravity: np.ndarray
    damping: np.ndarray

    @property
    def tau(self) -> np.ndarray:
        return (self.muscle + self.ligament + self.contact + self.gravity
                + self.damping)

    @classmethod
    def zero(cls, ndof: int) -> "GeneralizedForces":
        z = lambda: np.zeros(ndof)
        return cls(z(), z(), z(), z(), z())


def mass_matrix(model: ModelDefinition, state: SimState) -> np.ndarray:
    """Symmetric positive-definite joint-space inertia matrix."""
    pm = engine.pack(model)
    cs, sn, phi, w, porg, vorg, axisp, pcom, vcom, a0com = engine.fk(
        pm.parent, pm.dof, pm.anchor_p, pm.anchor_c, pm.com,
        state.q, state.qdot)
    M, _, _ = engine.mass_bias_gravity(pm.parent, pm.dof, pm.mass, pm.inertia,
                                       axisp, pcom, a0com, pm.gravity, pm.ndof)
    return M


def bias_forces(model: ModelDefinition, state: SimState) -> np.ndarray:
    """Coriolis/centrifugal bias (gravity is a GeneralizedForces source)."""
    pm = engine.pack(model)
    cs, sn, phi, w, porg, vorg, axisp, pcom, vcom, a0com = engine.fk(
        pm.parent, pm.dof, pm.anchor_p, pm.anchor_c, pm.com,
        state.q, state.qdot)
    _, bias, _ = engine.mass_bias_gravity(pm.parent, pm.dof, pm.mass,
                                          pm.inertia, axisp, pcom, a0com,
                                          pm.gravity, pm.ndof)
    return bias


def mtu_length_and_jacobian(model: ModelDefinition, kin: Kinematics,
                            muscle_name: str):
    """(path length, dL/dq) of one muscle's attachment polyline."""
    pm = engine.pack(model)
    mi = pm.muscle_names.index(muscle_name)
    L, dL, _ = engine.muscle_geometry(pm.parent, pm.dof, kin._cs, kin._sn,
                                      kin._porg, kin._axisp, pm.mu_npts,
                                      pm.mu_body, pm.mu_pt,
                                      np.zeros(pm.ndof), pm.ndof)
    return float(L[mi]), dL[mi]


def compute_forces(model: ModelDefinition, state: SimState,
                   course=None, fmax_override: np.ndarray | None = None
                   ) -> GeneralizedForces:
    """Assemble the full per-source force breakdown at one state."""
    pm = engine.pack(model)
    cs, sn, phi, w, porg, vorg, axisp, pcom, vcom, a0com = engine.fk(
        pm.parent, pm.dof, pm.anchor_p, pm.anchor_c, pm.com,
        state.q, state.qdot)
    _, _, tau_g = engine.mass_bias_gravity(pm.parent, pm.dof, pm.mass,
                                           pm.inertia, axisp, pcom, a0com,
                                           pm.gravity, pm.ndof)
    L, dL, Ldot = engine.muscle_geometry(pm.parent, pm.dof, cs, sn, porg,
                                         axisp, pm.mu_npts, pm.mu_body,
                                         pm.mu_pt, state.qdot, pm.ndof)
    fmax = pm.mu_fmax if fmax_override is None else fmax_override
    telem = np.zeros(engine.T_SIZE)
    fiber = np.zeros(len(pm.muscle_names))
    tau_m = engine.muscle_tau(fmax, pm.mu_lopt, pm.mu_lslack, pm.mu_cospenn,
                              pm.mu_vmax, pm.tendon_mode, pm.tendon_k,
                              state.activations, L, dL, Ldot, pm.ndof,
                              fiber, telem)
    tau_l, _ = engine.ligament_tau(pm.lig_dof, pm.lig_lo, pm.lig_hi,
                                   pm.lig_scale, pm.lig_rate, state.q, pm.ndof)
    tau_d = np.zeros(pm.ndof)
    tau_d[3:] = -pm.damping * state.qdot[3:]
    obs_x, obs_y, obs_r = _course_arrays(course)
    sphere_f = np.zeros((len(pm.sphere_ids), 2))
    tau_c = engine.contact_tau(pm.parent, pm.dof, cs, sn, w, porg, vorg,
                               axisp, pm.sp_body, pm.sp_center, pm.sp_radius,
                               pm.ck, pm.cn, pm.cc, pm.cmu, pm.cvref,
                               obs_x, obs_y, obs_r, pm.ndof, sphere_f, telem)
    return GeneralizedForces(muscle=tau_m, ligament=tau_l, contact=tau_c,
                             gravity=tau_g, damping=tau_d)


def forward_dynamics(model: ModelDefinition, state: SimState, tau,
                     locked_dofs=()) -> np.ndarray:
    """Solve M(q) qddot = tau - bias(q, qdot) for the free coordinates.

    ``tau`` is a GeneralizedForces or a plain ndof vector.  Locked
    coordinates get qddot = 0 and drop out of the solve.
    """
    if isinstance(tau, GeneralizedForces):
        tau = tau.tau
    M = mass_matrix(model, state)
    bias = bias_forces(model, state)
    ndof = M.shape[0]
    qdd = np.zeros(ndof)
    free = np.array([i for i in range(ndof) if i not in set(locked_dofs)])
    qdd[free] = np.linalg.solve(M[np.ix_(free, free)], (tau - bias)[free])
    return qdd


@dataclass
class StepTelemetry:
    """Accumulated measurements over one control window."""

    ligament_integral: float              # window integral of sqrt(L)
    sphere_forces: dict[str, tuple[float, float]]   # window-average, N
    body_vertical_force: dict[str, float]           # window-average per body
    max_penetration: float
    fiber_clamp_count: int
    tendon_fallback_count: int


def _course_arrays(course):
    if course is None or not getattr(course, "obstacles", ()):
        e = np.zeros(0)
        return e, e, e
    arr = np.array([(o[0], o[1], o[2]) for o in course.obstacles], dtype=float)
    return (np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1]),
            np.ascontiguousarray(arr[:, 2]))


def _raise_divergence(pm, code):
    ndof = pm.ndof
    if code < ndof:
        name = f"q[{code}] ({pm.dof_names[code]})"
    else:
        name = f"qdot[{code - ndof}] ({pm.dof_names[code - ndof]})"
    raise SimulationDiverged(name, engine.DIVERGENCE_LIMIT)


def _run(model, state, excitations, h, nsub, course, fmax_override):
    pm = engine.pack(model)
    exc = np.clip(np.asarray(excitations, dtype=float), 0.0, 1.0)
    obs_x, obs_y, obs_r = _course_arrays(course)
    fmax = pm.mu_fmax if fmax_override is None else fmax_override
    out = state.copy()
    sphere_f = np.zeros((len(pm.sphere_ids), 2))
    telem = np.zeros(engine.T_SIZE)
    code = engine.run_window(
        pm.parent, pm.dof, pm.anchor_p, pm.anchor_c, pm.mass, pm.inertia,
        pm.com, pm.mu_npts, pm.mu_body, pm.mu_pt, fmax, pm.mu_lopt,
        pm.mu_lslack, pm.mu_cospenn, pm.mu_vmax, pm.tendon_mode, pm.tendon_k,
        pm.lig_dof, pm.lig_lo, pm.lig_hi, pm.lig_scale, pm.lig_rate,
        pm.sp_body, pm.sp_center, pm.sp_radius,
        pm.ck, pm.cn, pm.cc, pm.cmu, pm.cvref, obs_x, obs_y, obs_r,
        pm.gravity, pm.tau_act, pm.tau_deact, pm.damping,
        out.q, out.qdot, out.activations, out.fiber_lengths,
        exc, h, nsub, sphere_f, telem)
    out.time = state.time + h * nsub
    if code >= 0:
        _raise_divergence(pm, code)
    sphere_avg = sphere_f / nsub
    forces = {sid: (float(sphere_avg[k, 0]), float(sphere_avg[k, 1]))
              for k, sid in enumerate(pm.sphere_ids)}
    body_fy: dict[str, float] = {}
    for k, sid in enumerate(pm.sphere_ids):
        bname = pm.body_order[pm.sp_body[k]]
        body_fy[bname] = body_fy.get(bname, 0.0) + float(sphere_avg[k, 1])
    telemetry = StepTelemetry(
        ligament_integral=float(telem[engine.T_LIG_INTEGRAL]),
        sphere_forces=forces,
        body_vertical_force=body_fy,
        max_penetration=float(telem[engine.T_MAX_PEN]),
        fiber_clamp_count=int(telem[engine.T_CLAMP]),
        tendon_fallback_count=int(telem[engine.T_FALLBACK]),
    )
    return out, telemetry


def integrate_substep(model: ModelDefinition, state: SimState, excitations,
                      h: float = SUBSTEP_H, course=None) -> SimState:
    """One deterministic semi-implicit Euler substep."""
    if h <= 0:
        raise ValueError("h must be positive")
    out, _ = _run(model, state, excitations, h, 1, course, None)
    return out


def advance_control_step(model: ModelDefinition, state: SimState, excitations,
                         course=None, fmax_override=None,
                         ) -> tuple[SimState, StepTelemetry]:
    """One 10 ms control window: excitations held over 50 substeps."""
    return _run(model, state, excitations, SUBSTEP_H, SUBSTEPS_PER_CONTROL,
                course, fmax_override)
