"""The running environment: seeded courses, reset/step loop, reward.

An episode is at most 1000 control steps of 10 ms (10 simulated seconds).
Reward is the pelvis forward displacement minus a small penalty for
ligament overuse: ``X(T) - lambda * integral sqrt(L(t)) dt`` with
lambda = 1e-7 (kept at the competition's value; override via ``lam``).
The episode terminates early when the pelvis drops below 0.65 m.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass

import numpy as np

from . import dynamics
from .errors import EpisodeProtocolError
from .errors import SimulationDiverged
from .model import ModelDefinition, default_model
from .rng import SplitMix64

MAX_SEED = 2 ** 63 - 1
LAMBDA_DEFAULT = 1e-7
FALL_HEIGHT = 0.65
MAX_STEPS = 1000
NO_OBSTACLE_DISTANCE = 100.0

OBSERVATION_LAYOUT = (
    "pelvis_rot", "pelvis_x", "pelvis_y",
    "pelvis_rot_vel", "pelvis_vx", "pelvis_vy",
    "hip_r", "knee_r", "ankle_r", "hip_l", "knee_l", "ankle_l",
    "hip_r_vel", "knee_r_vel", "ankle_r_vel",
    "hip_l_vel", "knee_l_vel", "ankle_l_vel",
    "com_x", "com_y", "com_vx", "com_vy",
    "head_x", "head_y", "pelvis_station_x", "pelvis_station_y",
    "torso_x", "torso_y", "toes_l_x", "toes_l_y", "toes_r_x", "toes_r_y",
    "talus_l_x", "talus_l_y", "talus_r_x", "talus_r_y",
    "psoas_scale_r", "psoas_scale_l",
    "next_obstacle_dx", "next_obstacle_y", "next_obstacle_r",
)
OBSERVATION_SIZE = len(OBSERVATION_LAYOUT)
ACTION_SIZE = 18

_STATION_SLOTS = ("head", "pelvis", "torso", "toes_l", "toes_r",
                  "talus_l", "talus_r")


@dataclass(frozen=True)
class EpisodeConfig:
    seed: int
    difficulty: int = 0
    max_obstacles: int = 3

    def __post_init__(self):
        if not (0 <= self.seed <= MAX_SEED):
            raise ValueError(f"seed must be in [0, 2^63 - 1], got {self.seed}")
        if self.difficulty not in (0, 1, 2):
            raise ValueError(f"difficulty must be 0, 1, or 2, got {self.difficulty}")
        if self.max_obstacles < 0:
            raise ValueError("max_obstacles must be non-negative")


@dataclass(frozen=True)
class ObstacleCourse:
    """Ground-fixed obstacle spheres plus per-episode muscle weakness."""

    obstacles: tuple[tuple[float, float, float], ...]   # (x, y, r)
    psoas_scale_l: float = 1.0
    psoas_scale_r: float = 1.0


def generate_obstacles(cfg: EpisodeConfig) -> ObstacleCourse:
    """Seeded course: difficulty 0 is empty; otherwise the first three
    obstacle positions are i.i.d. U(1, 5) sorted ascending, later ones
    follow at U(2, 4) gaps; each gets a vertical offset U(-0.25, 0.25) and
    radius 0.05 + Exp(mean 0.05).  Difficulty 2 additionally draws psoas
    strength scales U(0.5, 1.0), left then right.  Draw order is fixed:
    positions, then per-obstacle (y, r), then scales.
    """
    if cfg.difficulty == 0 or cfg.max_obstacles == 0:
        return ObstacleCourse(obstacles=())
    rng = SplitMix64(cfg.seed)
    n = cfg.max_obstacles
    xs = sorted(rng.uniform(1.0, 5.0) for _ in range(min(3, n)))
    while len(xs) < n:
        xs.append(xs[-1] + rng.uniform(2.0, 4.0))
    obstacles = []
    for x in xs:
        y = rng.uniform(-0.25, 0.25)
        r = 0.05 + rng.exponential(0.05)
        obstacles.append((x, y, r))
    scale_l = scale_r = 1.0
    if cfg.difficulty == 2:
        scale_l = rng.uniform(0.5, 1.0)
        scale_r = rng.uniform(0.5, 1.0)
    return ObstacleCourse(obstacles=tuple(obstacles),
                          psoas_scale_l=scale_l, psoas_scale_r=scale_r)


@dataclass(frozen=True)
class EpisodeResult:
    final_x: float
    ligament_integral: float
    reward: float
    steps_taken: int
    termination: str               # time_limit | fell | diverged


def observe(state: dynamics.SimState, kin: dynamics.Kinematics,
            course: ObstacleCourse) -> np.ndarray:
    """Assemble the 41-slot observation vector."""
    obs = np.empty(OBSERVATION_SIZE)
    obs[0] = state.q[2]
    obs[1] = state.q[0]
    obs[2] = state.q[1]
    obs[3] = state.qdot[2]
    obs[4] = state.qdot[0]
    obs[5] = state.qdot[1]
    obs[6:12] = state.q[3:9]
    obs[12:18] = state.qdot[3:9]
    obs[18], obs[19] = kin.com_position
    obs[20], obs[21] = kin.com_velocity
    for i, name in enumerate(_STATION_SLOTS):
        obs[22 + 2 * i], obs[23 + 2 * i] = kin.stations[name]
    obs[36] = course.psoas_scale_r
    obs[37] = course.psoas_scale_l
    pelvis_x = state.q[0]
    nxt = None
    for ob in course.obstacles:
        if ob[0] > pelvis_x:
            nxt = ob
            break
    if nxt is None:
        obs[38], obs[39], obs[40] = NO_OBSTACLE_DISTANCE, 0.0, 0.0
    else:
        obs[38] = nxt[0] - pelvis_x
        obs[39] = nxt[1]
        obs[40] = nxt[2]
    return obs


class RunEnv:
    """Single-session running environment (strict reset/step ordering)."""

    def __init__(self, model: ModelDefinition | None = None,
                 lam: float = LAMBDA_DEFAULT):
        self.model = model if model is not None else default_model()
        self.lam = lam
        self._psoas_idx_r = [i for i, mu in enumerate(self.model.muscles)
                             if mu.name == "iliopsoas_r"]
        self._psoas_idx_l = [i for i, mu in enumerate(self.model.muscles)
                             if mu.name == "iliopsoas_l"]
        self._active = False
        self._done = True
        self.cfg: EpisodeConfig | None = None
        self.course: ObstacleCourse | None = None

    def reset(self, difficulty: int = 0, seed: int | None = None,
              max_obstacles: int = 3) -> np.ndarray:
        if seed is None:
            seed = secrets.randbelow(MAX_SEED + 1)
        self.cfg = EpisodeConfig(seed=seed, difficulty=difficulty,
                                 max_obstacles=max_obstacles)
        self.course = generate_obstacles(self.cfg)
        import musclerun.engine as engine
        pm = engine.pack(self.model)
        self._fmax = pm.mu_fmax.copy()
        for i in self._psoas_idx_r:
            self._fmax[i] *= self.course.psoas_scale_r
        for i in self._psoas_idx_l:
            self._fmax[i] *= self.course.psoas_scale_l
        self.state = dynamics.initial_state(self.model)
        self._steps = 0
        self._lig_total = 0.0
        self._start_x = self.state.q[0]
        self._termination = None
        self._active = True
        self._done = False
        self.last_info = {
            "seed": seed,
            "difficulty": difficulty,
            "max_obstacles": max_obstacles,
            "observation_layout": OBSERVATION_LAYOUT,
        }
        kin = dynamics.forward_kinematics(self.model, self.state)
        return observe(self.state, kin, self.course)

    def step(self, action) -> tuple[np.ndarray, float, bool, dict]:
        if not self._active or self._done:
            raise EpisodeProtocolError("step called on an inactive episode")
        action = np.asarray(action, dtype=float)
        if action.shape != (ACTION_SIZE,):
            raise ValueError(f"action must have length {ACTION_SIZE}, "
                             f"got shape {action.shape}")
        info: dict = {}
        if not np.all(np.isfinite(action)):
            self._done = True
            self._termination = "diverged"
            kin = dynamics.forward_kinematics(self.model, self.state)
            info["termination"] = "diverged"
            return observe(self.state, kin, self.course), 0.0, True, info
        exc = np.clip(action, 0.0, 1.0)
        x_prev = self.state.q[0]
        try:
            new_state, tel = dynamics.advance_control_step(
                self.model, self.state, exc, course=self.course,
                fmax_override=self._fmax)
        except SimulationDiverged as exc_info:
            self._done = True
            self._termination = "diverged"
            kin = dynamics.forward_kinematics(self.model, self.state)
            info["termination"] = "diverged"
            info["diverged_coordinate"] = exc_info.coordinate
            return observe(self.state, kin, self.course), 0.0, True, info
        self.state = new_state
        self._steps += 1
        self._lig_total += tel.ligament_integral
        reward = ((self.state.q[0] - x_prev)
                  - self.lam * tel.ligament_integral)
        if self.state.q[1] < FALL_HEIGHT:
            self._done = True
            self._termination = "fell"
        elif self._steps >= MAX_STEPS:
            self._done = True
            self._termination = "time_limit"
        kin = dynamics.forward_kinematics(self.model, self.state)
        info["step"] = self._steps
        info["excitations"] = exc
        info["foot_vertical_force"] = {
            "r": tel.body_vertical_force.get("foot_r", 0.0),
            "l": tel.body_vertical_force.get("foot_l", 0.0),
        }
        info["ligament_integral"] = tel.ligament_integral
        info["max_penetration"] = tel.max_penetration
        if self._done:
            info["termination"] = self._termination
        return observe(self.state, kin, self.course), reward, self._done, info

    @property
    def done(self) -> bool:
        return self._done

    def result(self) -> EpisodeResult:
        if not self._active:
            raise EpisodeProtocolError("no episode has been run")
        final_x = float(self.state.q[0] - self._start_x)
        return EpisodeResult(
            final_x=final_x,
            ligament_integral=self._lig_total,
            reward=final_x - self.lam * self._lig_total,
            steps_taken=self._steps,
            termination=self._termination or "active",
        )
