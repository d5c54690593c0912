import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from musclerun import muscle
from musclerun.model import default_model
from musclerun.muscle import (A_F, F_LEN, GAMMA, K_ECC, MuscleState,
                              activation_step, f_active, f_passive,
                              f_velocity, muscle_force, rigid_tendon_force,
                              solve_tendon_equilibrium, tendon_curve_force)


def test_active_peak_is_one():
    assert f_active(1.0) == 1.0


def test_active_gaussian_shape():
    for l in (0.6, 0.9, 1.2, 1.5):
        assert f_active(l) == pytest.approx(math.exp(-(l - 1) ** 2 / 0.45))


def test_passive_zero_at_or_below_optimal():
    for l in (0.3, 0.8, 1.0):
        assert f_passive(l) == 0.0


def test_passive_reaches_one_at_max_strain():
    # By construction the passive curve carries F_max_iso at strain eps0.
    assert f_passive(1.6) == pytest.approx(1.0, abs=1e-12)


def test_velocity_isometric_is_one():
    assert f_velocity(0.0) == 1.0


def test_velocity_zero_at_max_shortening():
    assert f_velocity(-1.0) == 0.0
    assert f_velocity(-1.5) == 0.0


def test_velocity_eccentric_plateau():
    assert f_velocity(1e9) == pytest.approx(F_LEN, rel=1e-6)
    for v in (0.1, 1.0, 10.0):
        assert 1.0 < f_velocity(v) < F_LEN


def test_velocity_slope_continuous_at_zero():
    h = 1e-7
    left = (f_velocity(0.0) - f_velocity(-h)) / h
    right = (f_velocity(h) - f_velocity(0.0)) / h
    assert left == pytest.approx(1.0 + 1.0 / A_F, rel=1e-5)
    assert right == pytest.approx(left, rel=1e-5)


@given(st.floats(min_value=-3, max_value=3))
def test_velocity_monotone_nondecreasing(v):
    assert f_velocity(v + 1e-6) >= f_velocity(v) - 1e-12


@given(st.floats(min_value=0.01, max_value=3.0))
def test_curves_nonnegative(l):
    assert f_active(l) >= 0.0
    assert f_passive(l) >= 0.0


@given(st.floats(min_value=0, max_value=1), st.floats(min_value=0, max_value=1))
def test_activation_exact_exponential(a, e):
    h = 0.0002
    tau = 0.01 if e > a else 0.04
    expected = e + (a - e) * math.exp(-h / tau)
    assert activation_step(a, e, h, 0.01, 0.04) == pytest.approx(
        expected, abs=1e-12)


@given(st.floats(min_value=0, max_value=1))
def test_activation_fixed_point(a):
    assert activation_step(a, a, 0.0002, 0.01, 0.04) == pytest.approx(a)


def test_activation_stays_in_unit_interval():
    a = 0.0
    for _ in range(1000):
        a = activation_step(a, 1.0, 0.0002, 0.01, 0.04)
        assert 0.0 <= a <= 1.0
    assert a == pytest.approx(1.0, abs=1e-4)


def test_tendon_projection_identity_random_states():
    # F_tendon = F_muscle * cos(alpha) across 1000 random states.
    rng = np.random.default_rng(3)
    model = default_model()
    muscles = model.muscles
    for _ in range(1000):
        md = muscles[rng.integers(len(muscles))]
        s = MuscleState(
            activation=rng.uniform(0, 1),
            mtu_length=md.tendon_slack_length
            + rng.uniform(0.2, 1.8) * md.optimal_fiber_length,
            mtu_velocity=rng.uniform(-2, 2))
        f_m, f_t = muscle_force(md, s)
        expected = f_m * math.cos(md.pennation_angle_at_optimal)
        assert f_t == pytest.approx(max(expected, 0.0), abs=1e-12)


def test_rigid_tendon_matches_reference_path():
    md = default_model().muscle("vasti_r")
    cos_penn = math.cos(md.pennation_angle_at_optimal)
    s = MuscleState(activation=0.3,
                    mtu_length=md.tendon_slack_length
                    + 1.1 * md.optimal_fiber_length * cos_penn,
                    mtu_velocity=-0.05)
    f_m, f_t = muscle_force(md, s)
    f_m2, f_t2, clamped = rigid_tendon_force(
        md.f_max_iso, md.optimal_fiber_length, md.tendon_slack_length,
        cos_penn, md.max_contraction_velocity, s.mtu_length,
        s.mtu_velocity, s.activation)
    assert not clamped
    assert f_m2 == pytest.approx(f_m, abs=1e-12)
    assert f_t2 == pytest.approx(f_t, abs=1e-12)


def test_fiber_clamp_floor():
    md = default_model().muscle("soleus_r")
    f_m, f_t, clamped = rigid_tendon_force(
        md.f_max_iso, md.optimal_fiber_length, md.tendon_slack_length,
        math.cos(md.pennation_angle_at_optimal),
        md.max_contraction_velocity,
        0.5 * md.tendon_slack_length, 0.0, 0.5)
    assert clamped
    assert f_t >= 0.0


def test_zero_activation_slack_fiber_no_force():
    md = default_model().muscle("glut_max_r")
    s = MuscleState(activation=0.0,
                    mtu_length=md.tendon_slack_length
                    + 0.9 * md.optimal_fiber_length,
                    mtu_velocity=0.0)
    f_m, f_t = muscle_force(md, s)
    assert f_m == 0.0 and f_t == 0.0


def test_tendon_equilibrium_balances_forces():
    model = default_model()
    for name in ("soleus_r", "hamstrings_l", "rect_fem_r"):
        md = model.muscle(name)
        cos_penn = math.cos(md.pennation_angle_at_optimal)
        mtu = md.tendon_slack_length + 1.05 * md.optimal_fiber_length * cos_penn
        for a in (0.05, 0.4, 0.9):
            fiber = solve_tendon_equilibrium(md, mtu, a)
            l_norm = fiber / md.optimal_fiber_length
            f_m = md.f_max_iso * (a * f_active(l_norm) + f_passive(l_norm))
            f_t = tendon_curve_force(
                md.f_max_iso, md.tendon_slack_length,
                model.tendon_stiffness_scale, mtu - fiber * cos_penn)
            assert f_t == pytest.approx(f_m * cos_penn,
                                        abs=2e-6 * md.f_max_iso)


def test_tendon_curve_slack_region_zero():
    assert tendon_curve_force(1000.0, 0.25, 30.0, 0.2) == 0.0
    assert tendon_curve_force(1000.0, 0.25, 30.0, 0.25) == 0.0
    assert tendon_curve_force(1000.0, 0.25, 30.0, 0.26) > 0.0
