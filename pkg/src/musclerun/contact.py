"""Compliant contact and ligament torques.

Normal contact force follows Hunt-Crossley: ``k * x^n * (1 + 1.5*c*xdot)``
in penetration depth x, floored at zero so contact never pulls.  Tangential
friction is regularized viscous (``-mu * F_n * tanh(v_t / v_ref)``) for
smoothness under explicit integration.  Ligaments are rotational springs
that engage exponentially beyond a per-joint angle band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .model import ContactParams, LigamentDef


@njit
def hunt_crossley_normal(x: float, xdot: float, k: float, n: float,
                         c: float) -> float:
    """Normal force for penetration depth x and penetration rate xdot."""
    if x <= 0.0:
        return 0.0
    f = k * x ** n * (1.0 + 1.5 * c * xdot)
    return f if f > 0.0 else 0.0


@njit
def friction_tangential(f_normal: float, v_t: float, mu: float,
                        v_ref: float) -> float:
    return -mu * f_normal * math.tanh(v_t / v_ref)


@njit
def ligament_torque(theta: float, lo: float, hi: float, scale: float,
                    rate: float) -> float:
    """Restoring torque outside the engagement band [lo, hi]; zero inside."""
    if theta > hi:
        return -scale * (math.exp(rate * (theta - hi)) - 1.0)
    if theta < lo:
        return scale * (math.exp(rate * (lo - theta)) - 1.0)
    return 0.0


def ligament_torque_def(theta: float, lig: LigamentDef) -> float:
    return ligament_torque(theta, lig.engage_angle_lo, lig.engage_angle_hi,
                           lig.stiffness_scale, lig.exponent_rate)


def ligament_load(torques) -> float:
    """Instantaneous ligament load L: sum of squared ligament torques."""
    t = np.asarray(torques, dtype=float)
    return float(np.dot(t, t))


@dataclass(frozen=True)
class ContactSample:
    """One penetrating (sphere, counterpart) pair."""

    sphere_id: str
    counterpart: str               # "ground" or "obstacle[i]"
    depth: float                   # m
    depth_rate: float              # m/s, positive = penetrating deeper
    force: tuple[float, float]     # N, world frame, acting on the sphere body
    point: tuple[float, float]     # m, world frame application point


def collide(model, kin, course, params: ContactParams) -> list[ContactSample]:
    """Contact samples for every model sphere against ground and obstacles.

    ``kin`` is the Kinematics of the current state; ``course`` may be None
    or an ObstacleCourse.  Ground is the half-plane y <= 0.
    """
    samples = []
    obstacles = () if course is None else course.obstacles
    for sphere in model.contact_spheres:
        cx, cy = kin.sphere_positions[sphere.id]
        vx, vy = kin.sphere_velocities[sphere.id]
        # Ground.
        depth = sphere.radius - cy
        if depth > 0.0:
            rate = -vy
            fn = hunt_crossley_normal(depth, rate, params.stiffness,
                                      params.exponent, params.dissipation)
            if fn > 0.0:
                body = model.body(sphere.body)
                w = kin.body_angular_velocity[sphere.body]
                px, py = cx, cy - sphere.radius
                # Velocity of the material point at the contact location.
                vt = vx - w * (py - cy)
                ft = friction_tangential(fn, vt, params.friction, params.v_ref)
                samples.append(ContactSample(
                    sphere_id=sphere.id, counterpart="ground", depth=depth,
                    depth_rate=rate, force=(ft, fn), point=(px, py)))
        # Obstacle spheres (fixed to the ground).
        for i, (ox, oy, orad) in enumerate(obstacles):
            dx, dy = cx - ox, cy - oy
            dist = math.hypot(dx, dy)
            depth = sphere.radius + orad - dist
            if depth <= 0.0 or dist == 0.0:
                continue
            nx, ny = dx / dist, dy / dist
            rate = -(vx * nx + vy * ny)
            fn = hunt_crossley_normal(depth, rate, params.stiffness,
                                      params.exponent, params.dissipation)
            if fn <= 0.0:
                continue
            w = kin.body_angular_velocity[sphere.body]
            px = cx - nx * (sphere.radius - 0.5 * depth)
            py = cy - ny * (sphere.radius - 0.5 * depth)
            vpx = vx - w * (py - cy)
            vpy = vy + w * (px - cx)
            vt = -vpx * ny + vpy * nx   # tangential component
            ft = friction_tangential(fn, vt, params.friction, params.v_ref)
            samples.append(ContactSample(
                sphere_id=sphere.id, counterpart=f"obstacle[{i}]", depth=depth,
                depth_rate=rate,
                force=(fn * nx - ft * ny, fn * ny + ft * nx),
                point=(px, py)))
    return samples
