"""Gait analysis over trajectory logs: strike detection, cycle averaging.

Works from the trajectory-log format produced by the episode runner.
Foot strikes are rising edges of the vertical foot contact force through
5% of body weight, with a 50 ms refractory period.  Cycles from the last
five seconds of the episode are linearly resampled to 101 points
(0..100% of the gait cycle) and summarised pointwise as mean and sample
standard deviation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AnalysisError
from .trajlog import TrajectoryLog

STRIKE_THRESHOLD_FRACTION = 0.05
REFRACTORY_S = 0.050
WINDOW_S = 5.0
CYCLE_POINTS = 101

# Joint-angle columns of the q block, by side.
_JOINT_COLS = {"r": {"hip": 3, "knee": 4, "ankle": 5},
               "l": {"hip": 6, "knee": 7, "ankle": 8}}

# Export convention: degrees, flexion positive.  Knee flexion is negative
# in the simulation's coordinates, so it is negated on the way out.
_JOINT_SIGN = {"hip": 1.0, "knee": -1.0, "ankle": 1.0}


def detect_foot_strikes(time: np.ndarray, force: np.ndarray,
                        body_weight: float) -> np.ndarray:
    """Times where the vertical foot force rises through 5% body weight.

    A strike is a sample at or above threshold whose predecessor is below
    it, counted only when the force stayed below threshold for at least
    50 ms beforehand (suppresses contact chatter).  The signal is treated
    as below threshold before the log starts.
    """
    time = np.asarray(time, dtype=float)
    force = np.asarray(force, dtype=float)
    if time.shape != force.shape:
        raise AnalysisError("time and force must have the same length")
    thr = STRIKE_THRESHOLD_FRACTION * body_weight
    above = force >= thr
    strikes = []
    last_above_t = -np.inf
    for i in range(len(time)):
        if above[i]:
            if (i == 0 or not above[i - 1]) and \
                    time[i] - last_above_t >= REFRACTORY_S:
                strikes.append(time[i])
            last_above_t = time[i]
    return np.array(strikes)


@dataclass(frozen=True)
class GaitSummary:
    """Pointwise cycle statistics for one joint angle of one side."""

    side: str
    joint: str
    n_cycles: int
    percent: np.ndarray    # (101,) 0..100
    mean: np.ndarray       # (101,) degrees, flexion positive
    sd: np.ndarray         # (101,) sample standard deviation, degrees


def _resample_cycle(time, values, t0, t1):
    ts = np.linspace(t0, t1, CYCLE_POINTS)
    return np.interp(ts, time, values)


def segment_and_average(log: TrajectoryLog, body_weight: float,
                        side: str, joint: str) -> GaitSummary:
    """Average the last-5-s gait cycles of one joint angle.

    Angles are reported in degrees with flexion positive.  Raises
    AnalysisError when fewer than two strikes land in the window
    (no complete cycle to average).
    """
    if side not in _JOINT_COLS or joint not in _JOINT_COLS[side]:
        raise AnalysisError(f"unknown side/joint {side!r}/{joint!r}")
    if len(log) == 0:
        raise AnalysisError("empty trajectory log")
    t = log.time
    force = log.foot_fy[:, 0 if side == "r" else 1]
    strikes = detect_foot_strikes(t, force, body_weight)
    t_end = t[-1]
    window_start = t_end - WINDOW_S
    strikes = strikes[strikes >= window_start]
    if len(strikes) < 2:
        raise AnalysisError(
            f"need at least 2 foot strikes in the final {WINDOW_S:g} s, "
            f"found {len(strikes)}")
    angle = (np.degrees(log.q[:, _JOINT_COLS[side][joint]])
             * _JOINT_SIGN[joint])
    cycles = np.array([
        _resample_cycle(t, angle, strikes[k], strikes[k + 1])
        for k in range(len(strikes) - 1)
    ])
    mean = cycles.mean(axis=0)
    sd = (cycles.std(axis=0, ddof=1) if len(cycles) > 1
          else np.zeros(CYCLE_POINTS))
    return GaitSummary(side=side, joint=joint, n_cycles=len(cycles),
                       percent=np.linspace(0.0, 100.0, CYCLE_POINTS),
                       mean=mean, sd=sd)


def band_agreement(summary: GaitSummary, reference: np.ndarray) -> float:
    """Fraction of cycle points where the reference curve lies inside the
    summary's mean +/- 2 sd band (inclusive)."""
    reference = np.asarray(reference, dtype=float)
    if reference.shape != summary.mean.shape:
        raise AnalysisError(
            f"reference must have {CYCLE_POINTS} points, "
            f"got {reference.shape}")
    lo = summary.mean - 2.0 * summary.sd
    hi = summary.mean + 2.0 * summary.sd
    inside = (reference >= lo) & (reference <= hi)
    return float(inside.mean())


def write_summary_csv(path, summaries: list[GaitSummary]) -> None:
    """CSV: percent column plus mean/sd column pair per summary."""
    header = ["percent"]
    cols = [summaries[0].percent if summaries else
            np.linspace(0.0, 100.0, CYCLE_POINTS)]
    for s in summaries:
        header += [f"{s.side}_{s.joint}_mean", f"{s.side}_{s.joint}_sd"]
        cols += [s.mean, s.sd]
    data = np.column_stack(cols)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in data:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_band_csv(path) -> dict[str, np.ndarray]:
    """Parse a summary CSV back into {column_name: values}."""
    with open(path) as fh:
        header = fh.readline().rstrip("\n").split(",")
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    if not rows:
        raise AnalysisError(f"{path}: no data rows")
    data = np.array(rows, dtype=float)
    return {name: data[:, i] for i, name in enumerate(header)}
