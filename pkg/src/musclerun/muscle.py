"""Hill-type musculotendon force generation.

Force in each musculotendon unit depends on its length, shortening
velocity, and activation level; activation lags the excitation signal
through first-order dynamics.  Curve shapes follow the usual Thelen-style
parametrization:

* active force-length: Gaussian ``exp(-(l-1)^2 / gamma)``, gamma = 0.45,
* passive force-length: exponential toe region, k_pe = 4, eps0 = 0.6,
* force-velocity: Hill hyperbola on shortening, smooth saturation at
  ``F_LEN = 1.4`` when lengthening, slope-matched at zero velocity.

Lengths are normalized by optimal fiber length, velocities by
``max_contraction_velocity * optimal_fiber_length``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._jit import njit

GAMMA = 0.45          # active force-length shape
K_PE = 4.0            # passive exponential shape
EPS0 = 0.6            # passive strain at F_max_iso
F_LEN = 1.4           # eccentric force plateau
A_F = 0.25            # Hill hyperbola shape factor on shortening
V_MAX_DEFAULT = 10.0  # optimal lengths per second

# Lengthening branch (f_len*v + K_ECC)/(v + K_ECC) slope-matched to the
# shortening branch at v = 0: both have slope 1 + 1/A_F there.
K_ECC = (F_LEN - 1.0) / (1.0 + 1.0 / A_F)

MIN_FIBER_FRACTION = 0.01   # clamp floor for degenerate fiber lengths


@njit
def f_active(l_norm: float) -> float:
    return math.exp(-(l_norm - 1.0) ** 2 / GAMMA)


@njit
def f_passive(l_norm: float) -> float:
    if l_norm <= 1.0:
        return 0.0
    return (math.exp(K_PE * (l_norm - 1.0) / EPS0) - 1.0) / (math.exp(K_PE) - 1.0)


@njit
def f_velocity(v_norm: float) -> float:
    """Force-velocity multiplier; v_norm < 0 is shortening."""
    if v_norm <= -1.0:
        return 0.0
    if v_norm <= 0.0:
        return (1.0 + v_norm) / (1.0 - v_norm / A_F)
    return (F_LEN * v_norm + K_ECC) / (v_norm + K_ECC)


@njit
def activation_step(a: float, e: float, h: float, tau_act: float,
                    tau_deact: float) -> float:
    """Exact first-order update of activation toward excitation over h."""
    tau = tau_act if e > a else tau_deact
    return e + (a - e) * math.exp(-h / tau)


@njit
def rigid_tendon_force(f_max_iso: float, l_opt: float, l_slack: float,
                       cos_penn: float, v_max: float, mtu_length: float,
                       mtu_velocity: float, a: float):
    """(F_muscle, F_tendon, clamped) with an inextensible tendon."""
    fiber = (mtu_length - l_slack) / cos_penn
    clamped = False
    if fiber < MIN_FIBER_FRACTION * l_opt:
        fiber = MIN_FIBER_FRACTION * l_opt
        clamped = True
    l_norm = fiber / l_opt
    v_norm = (mtu_velocity / cos_penn) / (v_max * l_opt)
    f_muscle = f_max_iso * (a * f_active(l_norm) * f_velocity(v_norm)
                            + f_passive(l_norm))
    f_tendon = f_muscle * cos_penn
    if f_tendon < 0.0:
        f_tendon = 0.0
    return f_muscle, f_tendon, clamped


@njit
def tendon_curve_force(f_max_iso: float, l_slack: float, stiffness_scale: float,
                       tendon_length: float) -> float:
    """Linear tendon beyond slack: stiffness_scale * F_max_iso per slack."""
    strain = (tendon_length - l_slack) / l_slack
    if strain <= 0.0:
        return 0.0
    return stiffness_scale * f_max_iso * strain


@njit
def tendon_equilibrium_fiber(f_max_iso: float, l_opt: float, l_slack: float,
                             cos_penn: float, stiffness_scale: float,
                             mtu_length: float, a: float):
    """(fiber_length, converged) solving the static tendon force balance.

    Bisection on fiber length until the tendon-curve force matches the
    muscle force projected through the pennation angle, to 1e-6 * F_max_iso
    within 100 iterations.  A non-bracketed root falls back to the
    rigid-tendon fiber length with converged = False.
    """
    def residual(fiber):
        l_norm = fiber / l_opt
        f_m = f_max_iso * (a * f_active(l_norm) + f_passive(l_norm))
        f_t = tendon_curve_force(f_max_iso, l_slack, stiffness_scale,
                                 mtu_length - fiber * cos_penn)
        return f_t - f_m * cos_penn

    lo = MIN_FIBER_FRACTION * l_opt
    hi = 2.5 * l_opt
    r_lo = residual(lo)
    r_hi = residual(hi)
    if r_lo == 0.0:
        return lo, True
    if r_hi == 0.0:
        return hi, True
    if r_lo * r_hi > 0.0:
        fiber = (mtu_length - l_slack) / cos_penn
        if fiber < lo:
            fiber = lo
        return fiber, False
    tol = 1e-6 * f_max_iso
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        r_mid = residual(mid)
        if abs(r_mid) < tol:
            return mid, True
        if r_lo * r_mid < 0.0:
            hi = mid
        else:
            lo = mid
            r_lo = r_mid
    return 0.5 * (lo + hi), True


@dataclass(frozen=True)
class MuscleCurves:
    """Normalized force curves; the default instance matches the constants
    above and is what the engine uses."""

    gamma: float = GAMMA
    k_pe: float = K_PE
    eps0: float = EPS0
    f_len: float = F_LEN
    a_f: float = A_F

    def f_active(self, l_norm: float) -> float:
        return math.exp(-(l_norm - 1.0) ** 2 / self.gamma)

    def f_passive(self, l_norm: float) -> float:
        if l_norm <= 1.0:
            return 0.0
        return ((math.exp(self.k_pe * (l_norm - 1.0) / self.eps0) - 1.0)
                / (math.exp(self.k_pe) - 1.0))

    def f_velocity(self, v_norm: float) -> float:
        if v_norm <= -1.0:
            return 0.0
        if v_norm <= 0.0:
            return (1.0 + v_norm) / (1.0 - v_norm / self.a_f)
        k = (self.f_len - 1.0) / (1.0 + 1.0 / self.a_f)
        return (self.f_len * v_norm + k) / (v_norm + k)


DEFAULT_CURVES = MuscleCurves()


@dataclass
class MuscleState:
    """Per-muscle state at one instant."""

    activation: float
    mtu_length: float
    mtu_velocity: float
    fiber_length: float = 0.0    # compliant mode only


def muscle_force(md, s: MuscleState, curves: MuscleCurves = DEFAULT_CURVES):
    """(F_muscle, F_tendon) for a MuscleDef in the given state, rigid tendon.

    Uses the curve parameters from ``curves``; degenerate fiber lengths
    (below 1% of optimal) are clamped.
    """
    cos_penn = math.cos(md.pennation_angle_at_optimal)
    fiber = (s.mtu_length - md.tendon_slack_length) / cos_penn
    fiber = max(fiber, MIN_FIBER_FRACTION * md.optimal_fiber_length)
    l_norm = fiber / md.optimal_fiber_length
    v_norm = ((s.mtu_velocity / cos_penn)
              / (md.max_contraction_velocity * md.optimal_fiber_length))
    f_muscle = md.f_max_iso * (
        s.activation * curves.f_active(l_norm) * curves.f_velocity(v_norm)
        + curves.f_passive(l_norm))
    f_tendon = max(f_muscle * cos_penn, 0.0)
    return f_muscle, f_tendon


def solve_tendon_equilibrium(md, mtu_length: float, a: float,
                             curves: MuscleCurves = DEFAULT_CURVES,
                             stiffness_scale: float = 30.0) -> float:
    """Fiber length satisfying the static muscle-tendon force balance."""
    fiber, _ = tendon_equilibrium_fiber(
        md.f_max_iso, md.optimal_fiber_length, md.tendon_slack_length,
        math.cos(md.pennation_angle_at_optimal), stiffness_scale,
        mtu_length, a)
    return fiber
