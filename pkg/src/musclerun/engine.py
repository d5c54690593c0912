"""Numeric core: packed model arrays and jitted simulation kernels.

The public dynamics API wraps these kernels; everything here operates on
flat numpy arrays so the whole 50-substep control window runs inside one
jitted call.  Coordinate layout: q[0:2] pelvis translation, q[2] pelvis
rotation, q[3:] revolute joint angles in joint-declaration order.

Dynamics formulation: per-body Newton-Euler projected through analytic
center-of-mass Jacobians.  M(q) = sum_b J_b^T diag(m, m, I) J_b; the
velocity bias is the zero-acceleration COM acceleration pushed through the
same Jacobians (planar, so there is no gyroscopic torque term).
"""

from __future__ import annotations

import math

import numpy as np

from ._jit import njit
from .muscle import (activation_step, rigid_tendon_force, tendon_curve_force,
                     tendon_equilibrium_fiber)
from .contact import hunt_crossley_normal, friction_tangential, ligament_torque
from .model import GROUND, PLANAR_FREE, ModelDefinition

DIVERGENCE_LIMIT = 1e6

# telem slots
T_LIG_INTEGRAL = 0
T_MAX_PEN = 1
T_CLAMP = 2
T_FALLBACK = 3
T_SIZE = 4


class PackedModel:
    """ModelDefinition flattened into kernel-ready arrays."""

    def __init__(self, model: ModelDefinition):
        self.model = model
        root_joint = next(j for j in model.joints if j.kind == PLANAR_FREE)
        revolutes = model.revolute_joints
        self.ndof = 3 + len(revolutes)

        # Topological body order (root first).
        joint_by_child = {j.child: j for j in model.joints}
        order = [root_joint.child]
        remaining = [b.name for b in model.bodies if b.name != root_joint.child]
        while remaining:
            progressed = False
            for name in list(remaining):
                if joint_by_child[name].parent in order:
                    order.append(name)
                    remaining.remove(name)
                    progressed = True
            if not progressed:          # validated earlier; defensive
                raise ValueError("disconnected body graph")
        self.body_order = order
        self.body_index = {name: i for i, name in enumerate(order)}
        nb = len(order)

        dof_of_joint = {root_joint.name: 2}
        for i, j in enumerate(revolutes):
            dof_of_joint[j.name] = 3 + i
        self.dof_of_joint = dof_of_joint
        self.dof_names = ["pelvis_x", "pelvis_y", "pelvis_rot"] + [
            j.name for j in revolutes]

        self.parent = np.full(nb, -1, dtype=np.int64)
        self.dof = np.zeros(nb, dtype=np.int64)
        self.anchor_p = np.zeros((nb, 2))
        self.anchor_c = np.zeros((nb, 2))
        self.mass = np.zeros(nb)
        self.inertia = np.zeros(nb)
        self.com = np.zeros((nb, 2))
        for name in order:
            i = self.body_index[name]
            b = model.body(name)
            self.mass[i] = b.mass
            self.inertia[i] = b.inertia_zz
            self.com[i] = b.com_offset
            j = joint_by_child[name]
            self.dof[i] = dof_of_joint[j.name]
            self.parent[i] = (-1 if j.parent == GROUND
                              else self.body_index[j.parent])
            self.anchor_p[i] = j.anchor_parent
            self.anchor_c[i] = j.anchor_child

        # Muscles.
        nm = len(model.muscles)
        maxpts = max((len(mu.path) for mu in model.muscles), default=2)
        self.muscle_names = [mu.name for mu in model.muscles]
        self.mu_npts = np.zeros(nm, dtype=np.int64)
        self.mu_body = np.zeros((nm, maxpts), dtype=np.int64)
        self.mu_pt = np.zeros((nm, maxpts, 2))
        self.mu_fmax = np.zeros(nm)
        self.mu_lopt = np.zeros(nm)
        self.mu_lslack = np.zeros(nm)
        self.mu_cospenn = np.zeros(nm)
        self.mu_vmax = np.zeros(nm)
        for k, mu in enumerate(model.muscles):
            self.mu_npts[k] = len(mu.path)
            for p, pp in enumerate(mu.path):
                self.mu_body[k, p] = self.body_index[pp.body]
                self.mu_pt[k, p] = pp.point
            self.mu_fmax[k] = mu.f_max_iso
            self.mu_lopt[k] = mu.optimal_fiber_length
            self.mu_lslack[k] = mu.tendon_slack_length
            self.mu_cospenn[k] = math.cos(mu.pennation_angle_at_optimal)
            self.mu_vmax[k] = mu.max_contraction_velocity
        self.tendon_mode = 1 if model.tendon_mode == "compliant" else 0
        self.tendon_k = model.tendon_stiffness_scale

        # Ligaments, aligned to dof indices.
        nl = len(model.ligaments)
        self.lig_dof = np.zeros(nl, dtype=np.int64)
        self.lig_lo = np.zeros(nl)
        self.lig_hi = np.zeros(nl)
        self.lig_scale = np.zeros(nl)
        self.lig_rate = np.zeros(nl)
        for k, lig in enumerate(model.ligaments):
            self.lig_dof[k] = dof_of_joint[lig.joint]
            self.lig_lo[k] = lig.engage_angle_lo
            self.lig_hi[k] = lig.engage_angle_hi
            self.lig_scale[k] = lig.stiffness_scale
            self.lig_rate[k] = lig.exponent_rate

        # Contact spheres.
        ns = len(model.contact_spheres)
        self.sphere_ids = [s.id for s in model.contact_spheres]
        self.sp_body = np.zeros(ns, dtype=np.int64)
        self.sp_center = np.zeros((ns, 2))
        self.sp_radius = np.zeros(ns)
        for k, s in enumerate(model.contact_spheres):
            self.sp_body[k] = self.body_index[s.body]
            self.sp_center[k] = s.center
            self.sp_radius[k] = s.radius

        cp = model.contact_params
        self.ck, self.cn = cp.stiffness, cp.exponent
        self.cc, self.cmu, self.cvref = cp.dissipation, cp.friction, cp.v_ref
        self.gravity = model.gravity
        self.tau_act, self.tau_deact = model.tau_act, model.tau_deact
        self.damping = model.joint_damping

        # Stations.
        self.station_names = [name for name, _ in model.stations]
        nst = len(self.station_names)
        self.st_body = np.zeros(nst, dtype=np.int64)
        self.st_pt = np.zeros((nst, 2))
        for k, (_, st) in enumerate(model.stations):
            self.st_body[k] = self.body_index[st.body]
            self.st_pt[k] = st.point


_packed_cache: dict = {}


def pack(model: ModelDefinition) -> PackedModel:
    pm = _packed_cache.get(model)
    if pm is None:
        pm = PackedModel(model)
        _packed_cache[model] = pm
    return pm


# ---------------------------------------------------------------------------
# Kernels


@njit
def fk(parent, dof, anchor_p, anchor_c, com, q, qd):
    """Forward pass: per-body pose, velocity, and zero-qdd acceleration.

    Returns (cs, sn, w, porg, vorg, axisp, pcom, vcom, a0com); axisp is the
    world point each body's dof rotates about.
    """
    nb = parent.shape[0]
    cs = np.empty(nb)
    sn = np.empty(nb)
    phi = np.empty(nb)
    w = np.empty(nb)
    porg = np.empty((nb, 2))
    vorg = np.empty((nb, 2))
    a0 = np.empty((nb, 2))
    axisp = np.empty((nb, 2))
    pcom = np.empty((nb, 2))
    vcom = np.empty((nb, 2))
    a0com = np.empty((nb, 2))
    for i in range(nb):
        p = parent[i]
        if p < 0:
            phi[i] = q[2]
            w[i] = qd[2]
            cs[i] = math.cos(phi[i])
            sn[i] = math.sin(phi[i])
            porg[i, 0] = q[0]
            porg[i, 1] = q[1]
            vorg[i, 0] = qd[0]
            vorg[i, 1] = qd[1]
            a0[i, 0] = 0.0
            a0[i, 1] = 0.0
            axisp[i, 0] = porg[i, 0]
            axisp[i, 1] = porg[i, 1]
        else:
            phi[i] = phi[p] + q[dof[i]]
            w[i] = w[p] + qd[dof[i]]
            cs[i] = math.cos(phi[i])
            sn[i] = math.sin(phi[i])
            apx = cs[p] * anchor_p[i, 0] - sn[p] * anchor_p[i, 1]
            apy = sn[p] * anchor_p[i, 0] + cs[p] * anchor_p[i, 1]
            acx = cs[i] * anchor_c[i, 0] - sn[i] * anchor_c[i, 1]
            acy = sn[i] * anchor_c[i, 0] + cs[i] * anchor_c[i, 1]
            porg[i, 0] = porg[p, 0] + apx - acx
            porg[i, 1] = porg[p, 1] + apy - acy
            vorg[i, 0] = vorg[p, 0] - w[p] * apy + w[i] * acy
            vorg[i, 1] = vorg[p, 1] + w[p] * apx - w[i] * acx
            a0[i, 0] = a0[p, 0] - w[p] * w[p] * apx + w[i] * w[i] * acx
            a0[i, 1] = a0[p, 1] - w[p] * w[p] * apy + w[i] * w[i] * acy
            axisp[i, 0] = porg[i, 0] + acx
            axisp[i, 1] = porg[i, 1] + acy
        rcx = cs[i] * com[i, 0] - sn[i] * com[i, 1]
        rcy = sn[i] * com[i, 0] + cs[i] * com[i, 1]
        pcom[i, 0] = porg[i, 0] + rcx
        pcom[i, 1] = porg[i, 1] + rcy
        vcom[i, 0] = vorg[i, 0] - w[i] * rcy
        vcom[i, 1] = vorg[i, 1] + w[i] * rcx
        a0com[i, 0] = a0[i, 0] - w[i] * w[i] * rcx
        a0com[i, 1] = a0[i, 1] - w[i] * w[i] * rcy
    return cs, sn, phi, w, porg, vorg, axisp, pcom, vcom, a0com


@njit
def point_jacobian(parent, dof, axisp, body, px, py, J):
    """Fill the 2 x ndof world Jacobian of point (px, py) on ``body``."""
    J[:, :] = 0.0
    J[0, 0] = 1.0
    J[1, 1] = 1.0
    a = body
    while a >= 0:
        d = dof[a]
        J[0, d] -= py - axisp[a, 1]
        J[1, d] += px - axisp[a, 0]
        a = parent[a]


@njit
def mass_bias_gravity(parent, dof, mass, inertia, axisp, pcom, a0com, g, ndof):
    """Joint-space inertia matrix, velocity bias, and gravity forces."""
    nb = parent.shape[0]
    M = np.zeros((ndof, ndof))
    bias = np.zeros(ndof)
    tau_g = np.zeros(ndof)
    J = np.empty((2, ndof))
    Ja = np.empty(ndof)
    for b in range(nb):
        point_jacobian(parent, dof, axisp, b, pcom[b, 0], pcom[b, 1], J)
        Ja[:] = 0.0
        a = b
        while a >= 0:
            Ja[dof[a]] = 1.0
            a = parent[a]
        m = mass[b]
        I = inertia[b]
        for k1 in range(ndof):
            jx = J[0, k1]
            jy = J[1, k1]
            ja = Ja[k1]
            if jx == 0.0 and jy == 0.0 and ja == 0.0:
                continue
            for k2 in range(k1, ndof):
                M[k1, k2] += m * (jx * J[0, k2] + jy * J[1, k2]) + I * ja * Ja[k2]
            bias[k1] += m * (jx * a0com[b, 0] + jy * a0com[b, 1])
            tau_g[k1] -= m * g * jy
    for k1 in range(ndof):
        for k2 in range(k1 + 1, ndof):
            M[k2, k1] = M[k1, k2]
    return M, bias, tau_g


@njit
def muscle_geometry(parent, dof, cs, sn, porg, axisp,
                    mu_npts, mu_body, mu_pt, qd, ndof):
    """Path length, dL/dq, and lengthening rate for every muscle."""
    nm = mu_npts.shape[0]
    L = np.zeros(nm)
    dL = np.zeros((nm, ndof))
    Ldot = np.zeros(nm)
    Jprev = np.empty((2, ndof))
    Jcur = np.empty((2, ndof))
    for mi in range(nm):
        ppx = 0.0
        ppy = 0.0
        for p in range(mu_npts[mi]):
            b = mu_body[mi, p]
            lx = mu_pt[mi, p, 0]
            ly = mu_pt[mi, p, 1]
            wx = porg[b, 0] + cs[b] * lx - sn[b] * ly
            wy = porg[b, 1] + sn[b] * lx + cs[b] * ly
            point_jacobian(parent, dof, axisp, b, wx, wy, Jcur)
            if p > 0:
                sx = wx - ppx
                sy = wy - ppy
                seg = math.sqrt(sx * sx + sy * sy)
                if seg > 1e-12:
                    ux = sx / seg
                    uy = sy / seg
                    L[mi] += seg
                    for k in range(ndof):
                        dL[mi, k] += (ux * (Jcur[0, k] - Jprev[0, k])
                                      + uy * (Jcur[1, k] - Jprev[1, k]))
            ppx = wx
            ppy = wy
            Jprev[:, :] = Jcur
        for k in range(ndof):
            Ldot[mi] += dL[mi, k] * qd[k]
    return L, dL, Ldot


@njit
def muscle_tau(mu_fmax, mu_lopt, mu_lslack, mu_cospenn, mu_vmax,
               tendon_mode, tendon_k, act, L, dL, Ldot, ndof,
               fiber_out, telem):
    """Generalized muscle forces: tau = sum_m -dL/dq * F_tendon."""
    nm = mu_fmax.shape[0]
    tau = np.zeros(ndof)
    for mi in range(nm):
        if tendon_mode == 0:
            f_m, f_t, clamped = rigid_tendon_force(
                mu_fmax[mi], mu_lopt[mi], mu_lslack[mi], mu_cospenn[mi],
                mu_vmax[mi], L[mi], Ldot[mi], act[mi])
            if clamped:
                telem[T_CLAMP] += 1.0
            fiber_out[mi] = (L[mi] - mu_lslack[mi]) / mu_cospenn[mi]
        else:
            fiber, converged = tendon_equilibrium_fiber(
                mu_fmax[mi], mu_lopt[mi], mu_lslack[mi], mu_cospenn[mi],
                tendon_k, L[mi], act[mi])
            if not converged:
                telem[T_FALLBACK] += 1.0
            fiber_out[mi] = fiber
            f_t = tendon_curve_force(mu_fmax[mi], mu_lslack[mi], tendon_k,
                                     L[mi] - fiber * mu_cospenn[mi])
        for k in range(ndof):
            tau[k] -= dL[mi, k] * f_t
    return tau


@njit
def ligament_tau(lig_dof, lig_lo, lig_hi, lig_scale, lig_rate, q, ndof):
    """(tau_ligament, L) where L is the sum of squared ligament torques."""
    tau = np.zeros(ndof)
    load = 0.0
    for k in range(lig_dof.shape[0]):
        t = ligament_torque(q[lig_dof[k]], lig_lo[k], lig_hi[k],
                            lig_scale[k], lig_rate[k])
        tau[lig_dof[k]] += t
        load += t * t
    return tau, load


@njit
def contact_tau(parent, dof, cs, sn, w, porg, vorg, axisp,
                sp_body, sp_center, sp_radius,
                ck, cn, cc, cmu, cvref, obs_x, obs_y, obs_r,
                ndof, sphere_f, telem):
    """Generalized contact forces; accumulates per-sphere force and max
    penetration into the telemetry arrays."""
    ns = sp_body.shape[0]
    tau = np.zeros(ndof)
    J = np.empty((2, ndof))
    for si in range(ns):
        b = sp_body[si]
        lx = sp_center[si, 0]
        ly = sp_center[si, 1]
        pcx = porg[b, 0] + cs[b] * lx - sn[b] * ly
        pcy = porg[b, 1] + sn[b] * lx + cs[b] * ly
        vcx = vorg[b, 0] - w[b] * (pcy - porg[b, 1])
        vcy = vorg[b, 1] + w[b] * (pcx - porg[b, 0])
        r = sp_radius[si]
        # Ground half-plane y <= 0.
        pen = r - pcy
        if pen > 0.0:
            if pen > telem[T_MAX_PEN]:
                telem[T_MAX_PEN] = pen
            fn = hunt_crossley_normal(pen, -vcy, ck, cn, cc)
            if fn > 0.0:
                px = pcx
                py = pcy - r
                vtx = vcx - w[b] * (py - pcy)
                ft = friction_tangential(fn, vtx, cmu, cvref)
                point_jacobian(parent, dof, axisp, b, px, py, J)
                for k in range(ndof):
                    tau[k] += J[0, k] * ft + J[1, k] * fn
                sphere_f[si, 0] += ft
                sphere_f[si, 1] += fn
        # Obstacles.
        for oi in range(obs_x.shape[0]):
            dx = pcx - obs_x[oi]
            dy = pcy - obs_y[oi]
            dist = math.sqrt(dx * dx + dy * dy)
            pen = r + obs_r[oi] - dist
            if pen <= 0.0 or dist == 0.0:
                continue
            if pen > telem[T_MAX_PEN]:
                telem[T_MAX_PEN] = pen
            nx = dx / dist
            ny = dy / dist
            fn = hunt_crossley_normal(pen, -(vcx * nx + vcy * ny), ck, cn, cc)
            if fn <= 0.0:
                continue
            px = pcx - nx * (r - 0.5 * pen)
            py = pcy - ny * (r - 0.5 * pen)
            vpx = vcx - w[b] * (py - pcy)
            vpy = vcy + w[b] * (px - pcx)
            vt = -vpx * ny + vpy * nx
            ft = friction_tangential(fn, vt, cmu, cvref)
            fx = fn * nx - ft * ny
            fy = fn * ny + ft * nx
            point_jacobian(parent, dof, axisp, b, px, py, J)
            for k in range(ndof):
                tau[k] += J[0, k] * fx + J[1, k] * fy
            sphere_f[si, 0] += fx
            sphere_f[si, 1] += fy
    return tau


@njit
def divergence_code(q, qd):
    """-1 when finite and bounded; else index (q: i, qd: ndof + i)."""
    ndof = q.shape[0]
    for i in range(ndof):
        v = q[i]
        if not (-DIVERGENCE_LIMIT < v < DIVERGENCE_LIMIT):
            return i
    for i in range(ndof):
        v = qd[i]
        if not (-DIVERGENCE_LIMIT < v < DIVERGENCE_LIMIT):
            return ndof + i
    return -1


@njit
def run_window(parent, dof, anchor_p, anchor_c, mass, inertia, com,
               mu_npts, mu_body, mu_pt, mu_fmax, mu_lopt, mu_lslack,
               mu_cospenn, mu_vmax, tendon_mode, tendon_k,
               lig_dof, lig_lo, lig_hi, lig_scale, lig_rate,
               sp_body, sp_center, sp_radius,
               ck, cn, cc, cmu, cvref, obs_x, obs_y, obs_r,
               g, tau_act, tau_deact, damping,
               q, qd, act, fiber, exc, h, nsub, sphere_f, telem):
    """Advance ``nsub`` semi-implicit Euler substeps of size h in place.

    Per substep: exact activation update, force assembly at the current
    state, qdot += h*qddot, q += h*qdot.  The ligament-load integral uses
    the per-substep rectangle rule.  Returns a divergence code (-1 = ok).
    """
    ndof = q.shape[0]
    nm = mu_fmax.shape[0]
    for _ in range(nsub):
        for mi in range(nm):
            act[mi] = activation_step(act[mi], exc[mi], h, tau_act, tau_deact)
        cs, sn, phi, w, porg, vorg, axisp, pcom, vcom, a0com = fk(
            parent, dof, anchor_p, anchor_c, com, q, qd)
        M, bias, tau = mass_bias_gravity(parent, dof, mass, inertia, axisp,
                                         pcom, a0com, g, ndof)
        L, dL, Ldot = muscle_geometry(parent, dof, cs, sn, porg, axisp,
                                      mu_npts, mu_body, mu_pt, qd, ndof)
        tau += muscle_tau(mu_fmax, mu_lopt, mu_lslack, mu_cospenn, mu_vmax,
                          tendon_mode, tendon_k, act, L, dL, Ldot, ndof,
                          fiber, telem)
        tau_l, load = ligament_tau(lig_dof, lig_lo, lig_hi, lig_scale,
                                   lig_rate, q, ndof)
        tau += tau_l
        telem[T_LIG_INTEGRAL] += math.sqrt(load) * h
        for k in range(3, ndof):
            tau[k] -= damping * qd[k]
        tau += contact_tau(parent, dof, cs, sn, w, porg, vorg, axisp,
                           sp_body, sp_center, sp_radius,
                           ck, cn, cc, cmu, cvref, obs_x, obs_y, obs_r,
                           ndof, sphere_f, telem)
        qdd = np.linalg.solve(M, tau - bias)
        for k in range(ndof):
            qd[k] += h * qdd[k]
        for k in range(ndof):
            q[k] += h * qd[k]
        code = divergence_code(q, qd)
        if code >= 0:
            return code
    return -1
