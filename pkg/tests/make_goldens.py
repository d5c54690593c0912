"""Regenerates the golden files under tests/data/.

Run from the repository root:  python3 tests/make_goldens.py
"""

import json
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from musclerun import analysis, dynamics
from musclerun.environment import EpisodeConfig, generate_obstacles
from musclerun.model import default_model
from musclerun.trajlog import LogWriter, model_hash, read_log

DATA = pathlib.Path(__file__).parent / "data"


def synthetic_gait_log(path):
    """A deterministic 8 s 'running' log with a 0.55 s stride: periodic
    joint angles plus a small per-cycle wobble so the sd band is nonzero."""
    model = default_model()
    bw = model.total_mass * model.gravity
    dt = 0.01
    T = 0.55
    n = 800
    meta = {"seed": 0, "difficulty": 0, "max_obstacles": 0, "lam": 1e-7,
            "model_hash": model_hash(model), "substep_h": 2e-4,
            "substeps_per_control": 50, "synthetic": True}
    with LogWriter(path, meta) as w:
        for i in range(n):
            t = (i + 1) * dt
            phase = (t / T) % 1.0
            cycle = int(t / T)
            wob = 0.02 * np.sin(1.7 * cycle)
            q = np.zeros(9)
            q[0] = 2.8 * t
            q[1] = 0.92 + 0.03 * np.sin(2 * np.pi * phase)
            q[3] = 0.45 * np.sin(2 * np.pi * phase) + wob          # hip_r
            q[4] = -0.75 * abs(np.sin(np.pi * phase)) - 0.05 + wob  # knee_r
            q[5] = 0.20 * np.sin(2 * np.pi * phase + 0.8)           # ankle_r
            q[6] = 0.45 * np.sin(2 * np.pi * phase + np.pi)
            q[7] = -0.75 * abs(np.sin(np.pi * phase + np.pi / 2)) - 0.05
            q[8] = 0.20 * np.sin(2 * np.pi * phase + 0.8 + np.pi)
            qd = np.zeros(9)
            act = np.full(18, 0.3)
            exc = np.full(18, 0.3)
            # Stance for ~45% of the cycle starting at the strike.
            f_r = 1.4 * bw if phase < 0.45 else 0.0
            f_l = 1.4 * bw if (phase + 0.5) % 1.0 < 0.45 else 0.0
            w.write_step(t, q, qd, act, exc, f_r, f_l, 0.028)


def main():
    DATA.mkdir(exist_ok=True)

    # Seeded obstacle course golden.
    course = generate_obstacles(EpisodeConfig(seed=42, difficulty=2))
    (DATA / "course_seed42.json").write_text(json.dumps({
        "seed": 42, "difficulty": 2,
        "obstacles": [list(ob) for ob in course.obstacles],
        "psoas_scale_l": course.psoas_scale_l,
        "psoas_scale_r": course.psoas_scale_r,
    }, indent=2, sort_keys=True) + "\n")

    # Reference-pose musculotendon lengths.
    model = default_model()
    st = dynamics.initial_state(model)
    kin = dynamics.forward_kinematics(model, st)
    lengths = {}
    for mu in model.muscles:
        L, _ = dynamics.mtu_length_and_jacobian(model, kin, mu.name)
        lengths[mu.name] = L
    (DATA / "reference_mtu_lengths.json").write_text(
        json.dumps(lengths, indent=2, sort_keys=True) + "\n")

    # Synthetic gait log and its representative-cycle summary.
    synthetic_gait_log(DATA / "gait_log.csv")
    log = read_log(DATA / "gait_log.csv")
    bw = model.total_mass * model.gravity
    summaries = [analysis.segment_and_average(log, bw, side, joint)
                 for side in ("r", "l") for joint in ("hip", "knee", "ankle")]
    analysis.write_summary_csv(DATA / "gait_cycle_golden.csv", summaries)
    print("goldens written to", DATA)


if __name__ == "__main__":
    main()
