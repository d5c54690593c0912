import pathlib

import numpy as np
import pytest

from musclerun import analysis
from musclerun.analysis import (CYCLE_POINTS, band_agreement,
                                detect_foot_strikes, read_band_csv,
                                segment_and_average, write_summary_csv)
from musclerun.errors import AnalysisError
from musclerun.model import default_model
from musclerun.trajlog import TrajectoryLog, read_log

DATA = pathlib.Path(__file__).parent / "data"
BW = default_model().total_mass * default_model().gravity


def make_log(time, q, f_r, f_l):
    n = len(time)
    return TrajectoryLog(
        meta={}, time=np.asarray(time, dtype=float),
        q=np.asarray(q, dtype=float), qdot=np.zeros((n, 9)),
        activations=np.zeros((n, 18)), excitations=np.zeros((n, 18)),
        foot_fy=np.column_stack([f_r, f_l]), reward_inc=np.zeros(n))


def test_no_force_no_strikes():
    t = np.arange(100) * 0.01
    assert len(detect_foot_strikes(t, np.zeros(100), BW)) == 0


def test_square_wave_strikes_every_rising_edge():
    # 0.2 s on / 0.3 s off at 100 Hz.
    t = np.arange(500) * 0.01
    force = np.where((t % 0.5) < 0.2, 0.5 * BW, 0.0)
    strikes = detect_foot_strikes(t, force, BW)
    np.testing.assert_allclose(strikes, [0.0, 0.5, 1.0, 1.5, 2.0, 2.5,
                                         3.0, 3.5, 4.0, 4.5])


def test_threshold_is_five_percent_body_weight():
    t = np.arange(10) * 0.01
    below = np.full(10, 0.049 * BW)
    assert len(detect_foot_strikes(t, below, BW)) == 0
    above = np.concatenate([np.zeros(5), np.full(5, 0.051 * BW)])
    assert len(detect_foot_strikes(t, above, BW)) == 1


def test_chatter_within_refractory_suppressed():
    # A dip shorter than 50 ms must not produce a second strike.
    t = np.arange(100) * 0.01
    force = np.full(100, 0.5 * BW)
    force[:10] = 0.0
    force[40] = 0.0             # single-sample dropout at t = 0.40
    strikes = detect_foot_strikes(t, force, BW)
    np.testing.assert_allclose(strikes, [0.10])


def test_gap_longer_than_refractory_counts():
    t = np.arange(100) * 0.01
    force = np.zeros(100)
    force[10:30] = 0.5 * BW
    force[40:60] = 0.5 * BW     # 0.10 s below before this edge
    strikes = detect_foot_strikes(t, force, BW)
    np.testing.assert_allclose(strikes, [0.10, 0.40])


def _periodic_log(period_steps=50, n=800, wobble=None):
    dt = 0.01
    t = (np.arange(n) + 1) * dt
    phase = (np.arange(n) % period_steps) / period_steps
    cycle = (np.arange(n) // period_steps)
    q = np.zeros((n, 9))
    q[:, 3] = 0.5 * np.sin(2 * np.pi * phase)
    if wobble is not None:
        q[:, 3] += wobble[cycle]
    q[:, 4] = -0.8 * np.abs(np.sin(np.pi * phase))
    f = np.where(phase < 0.4, 0.6 * BW, 0.0)
    return make_log(t, q, f, f)


def _exact_log(n_cycles, period=1.0, start=1.0, wobble=None):
    """Periodic log whose samples coincide exactly with the 101-point
    resampling grid of every cycle (100 samples per cycle)."""
    k = np.arange(100)
    hip_arr = 0.5 * np.sin(2 * np.pi * k / 100)
    knee_arr = -0.8 * np.abs(np.sin(np.pi * k / 100))
    force_arr = np.where(k < 40, 0.6 * BW, 0.0)
    times, hips, knees, forces = [], [], [], []
    for c in range(n_cycles):
        t0 = start + c * period
        seg = np.linspace(t0, t0 + period, 101)[:-1]
        w = 0.0 if wobble is None else wobble[c]
        times.append(seg)
        hips.append(hip_arr + w)
        knees.append(knee_arr)
        forces.append(force_arr)
    # Closing endpoint: the start of a further cycle.
    times.append([start + n_cycles * period])
    w = 0.0 if wobble is None else wobble[-1]
    hips.append([hip_arr[0] + w])
    knees.append([knee_arr[0]])
    forces.append([force_arr[0]])
    t = np.concatenate(times)
    n = len(t)
    q = np.zeros((n, 9))
    q[:, 3] = np.concatenate(hips)
    q[:, 4] = np.concatenate(knees)
    f = np.concatenate(forces)
    return make_log(t, q, f, f)


def test_exactly_periodic_zero_sd():
    # Period 1.25 s puts exactly four cycles in the 5 s window; with a
    # power-of-two cycle count the per-point mean is computed exactly.
    log = _exact_log(n_cycles=8, period=1.25)
    s = segment_and_average(log, BW, "r", "hip")
    assert s.n_cycles == 4
    assert np.all(s.sd == 0.0)
    # The mean equals one period of the (degree-scaled) input.
    assert s.mean[0] == pytest.approx(0.0, abs=1e-12)
    assert np.max(s.mean) == pytest.approx(np.degrees(0.5), rel=1e-3)


def test_knee_export_flexion_positive():
    log = _exact_log(n_cycles=8)
    s = segment_and_average(log, BW, "r", "knee")
    # Knee flexion is negative in coordinates, positive in the export.
    assert np.max(s.mean) > 40.0
    assert np.min(s.mean) >= -1e-9


def test_two_cycle_statistics():
    # Exactly two cycles in the window, offset by a constant:
    # mean halfway between them, sd = |delta| / sqrt(2) (sample sd).
    delta = np.radians(2.0)
    log = _exact_log(n_cycles=4, period=2.5, start=0.0,
                     wobble=[0.0, 0.0, 0.0, delta])
    s = segment_and_average(log, BW, "r", "hip")
    assert s.n_cycles == 2
    base = np.degrees(0.5 * np.sin(2 * np.pi * 50 / 100))
    assert s.mean[50] == pytest.approx(base + np.degrees(delta) / 2,
                                       abs=1e-9)
    assert s.sd[50] == pytest.approx(np.degrees(delta) / np.sqrt(2.0),
                                     abs=1e-9)


def test_insufficient_strikes_error():
    t = (np.arange(700) + 1) * 0.01
    force = np.zeros(700)
    force[10:30] = 0.6 * BW     # a single strike, early in the log
    log = make_log(t, np.zeros((700, 9)), force, force)
    with pytest.raises(AnalysisError):
        segment_and_average(log, BW, "r", "hip")


def test_segmentation_uses_only_last_five_seconds():
    # Strikes before the window must not contribute cycles.
    log = _periodic_log(period_steps=50, n=800)
    strikes = detect_foot_strikes(log.time, log.foot_fy[:, 0], BW)
    in_window = strikes[strikes >= log.time[-1] - 5.0]
    s = segment_and_average(log, BW, "r", "hip")
    assert s.n_cycles == len(in_window) - 1


def test_time_shift_invariance():
    log = _periodic_log()
    shifted = make_log(log.time + 123.0, log.q, log.foot_fy[:, 0],
                       log.foot_fy[:, 1])
    a = segment_and_average(log, BW, "r", "hip")
    b = segment_and_average(shifted, BW, "r", "hip")
    np.testing.assert_allclose(a.mean, b.mean, atol=1e-9)
    np.testing.assert_allclose(a.sd, b.sd, atol=1e-9)


def test_independent_resampler_oracle():
    """Cycle resampling matches a hand-written linear interpolator."""
    log = _periodic_log(period_steps=47, n=800)   # strikes off the grid
    strikes = detect_foot_strikes(log.time, log.foot_fy[:, 0], BW)
    strikes = strikes[strikes >= log.time[-1] - 5.0]
    s = segment_and_average(log, BW, "r", "hip")
    angle = np.degrees(log.q[:, 3])
    cycles = []
    for k in range(len(strikes) - 1):
        t0, t1 = strikes[k], strikes[k + 1]
        samples = []
        for p in range(CYCLE_POINTS):
            ts = t0 + (t1 - t0) * p / (CYCLE_POINTS - 1)
            j = int(np.searchsorted(log.time, ts, side="right")) - 1
            j = min(max(j, 0), len(log.time) - 2)
            w = (ts - log.time[j]) / (log.time[j + 1] - log.time[j])
            samples.append((1 - w) * angle[j] + w * angle[j + 1])
        cycles.append(samples)
    cycles = np.array(cycles)
    np.testing.assert_allclose(s.mean, cycles.mean(axis=0), atol=1e-9)
    np.testing.assert_allclose(s.sd, cycles.std(axis=0, ddof=1), atol=1e-9)


def test_band_agreement_identities():
    log = _periodic_log(wobble=0.01 * np.sin(np.arange(16)))
    s = segment_and_average(log, BW, "r", "hip")
    assert band_agreement(s, s.mean) == 1.0
    far = s.mean + 2.0 * s.sd + 1.0
    assert band_agreement(s, far) == 0.0


def test_band_agreement_monotone():
    log = _periodic_log(wobble=0.01 * np.sin(np.arange(16)))
    s = segment_and_average(log, BW, "r", "hip")
    ref = s.mean + 3.0 * s.sd + 0.5
    closer = s.mean + 0.5 * (ref - s.mean)
    assert band_agreement(s, closer) >= band_agreement(s, ref)


def test_summary_csv_roundtrip(tmp_path):
    log = _periodic_log(wobble=0.01 * np.sin(np.arange(16)))
    s = segment_and_average(log, BW, "r", "hip")
    path = tmp_path / "summary.csv"
    write_summary_csv(path, [s])
    cols = read_band_csv(path)
    np.testing.assert_array_equal(cols["percent"], s.percent)
    np.testing.assert_array_equal(cols["r_hip_mean"], s.mean)
    np.testing.assert_array_equal(cols["r_hip_sd"], s.sd)


def test_golden_running_log_reproduces_golden_cycle():
    log = read_log(DATA / "gait_log.csv")
    golden = read_band_csv(DATA / "gait_cycle_golden.csv")
    for side in ("r", "l"):
        for joint in ("hip", "knee", "ankle"):
            s = segment_and_average(log, BW, side, joint)
            np.testing.assert_allclose(
                s.mean, golden[f"{side}_{joint}_mean"], atol=1e-9)
            np.testing.assert_allclose(
                s.sd, golden[f"{side}_{joint}_sd"], atol=1e-9)
