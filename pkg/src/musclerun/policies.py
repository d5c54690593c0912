"""Policy sources for episode runs and a logging episode runner."""

from __future__ import annotations

import numpy as np

from . import dynamics, trajlog
from .environment import ACTION_SIZE, EpisodeConfig, EpisodeResult, RunEnv
from .model import ModelDefinition


class ZeroPolicy:
    def __call__(self, obs) -> np.ndarray:
        return np.zeros(ACTION_SIZE)


class ConstantPolicy:
    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, obs) -> np.ndarray:
        return np.full(ACTION_SIZE, self.value)


class ScriptedPolicy:
    """Plays back one line of 18 comma-separated excitations per step.

    Short scripts are zero-padded to episode end.
    """

    def __init__(self, actions: np.ndarray):
        actions = np.asarray(actions, dtype=float)
        if actions.ndim != 2 or actions.shape[1] != ACTION_SIZE:
            raise ValueError(f"scripted actions must be (n, {ACTION_SIZE})")
        self.actions = actions
        self._i = 0

    @classmethod
    def from_file(cls, path) -> "ScriptedPolicy":
        rows = []
        with open(path) as fh:
            for ln, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                vals = [float(v) for v in line.split(",")]
                if len(vals) != ACTION_SIZE:
                    raise ValueError(
                        f"{path}:{ln}: expected {ACTION_SIZE} values, "
                        f"got {len(vals)}")
                rows.append(vals)
        return cls(np.array(rows).reshape(-1, ACTION_SIZE))

    def reset(self):
        self._i = 0

    def __call__(self, obs) -> np.ndarray:
        if self._i < len(self.actions):
            a = self.actions[self._i]
        else:
            a = np.zeros(ACTION_SIZE)
        self._i += 1
        return a


def run_episode(policy, cfg: EpisodeConfig,
                model: ModelDefinition | None = None,
                lam: float | None = None,
                log_path=None) -> EpisodeResult:
    """Run one full episode, optionally streaming a trajectory log."""
    env = RunEnv(model=model) if lam is None else RunEnv(model=model, lam=lam)
    if hasattr(policy, "reset"):
        policy.reset()
    obs = env.reset(difficulty=cfg.difficulty, seed=cfg.seed,
                    max_obstacles=cfg.max_obstacles)
    writer = None
    if log_path is not None:
        meta = {
            "seed": cfg.seed,
            "difficulty": cfg.difficulty,
            "max_obstacles": cfg.max_obstacles,
            "lam": env.lam,
            "model_hash": trajlog.model_hash(env.model),
            "substep_h": dynamics.SUBSTEP_H,
            "substeps_per_control": dynamics.SUBSTEPS_PER_CONTROL,
        }
        writer = trajlog.LogWriter(log_path, meta)
    try:
        done = False
        while not done:
            action = policy(obs)
            obs, reward, done, info = env.step(action)
            if writer is not None and "excitations" in info:
                st = env.state
                fy = info["foot_vertical_force"]
                writer.write_step(st.time, st.q, st.qdot, st.activations,
                                  info["excitations"], fy["r"], fy["l"],
                                  reward)
    finally:
        if writer is not None:
            writer.close()
    return env.result()
