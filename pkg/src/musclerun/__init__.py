"""Planar musculoskeletal running environment with remote grading."""

from .analysis import (GaitSummary, band_agreement, detect_foot_strikes,
                       segment_and_average)
from .dynamics import (CONTROL_DT, SUBSTEP_H, SUBSTEPS_PER_CONTROL,
                       GeneralizedForces, Kinematics, SimState,
                       advance_control_step, bias_forces, compute_forces,
                       forward_dynamics, forward_kinematics, initial_state,
                       integrate_substep, mass_matrix)
from .environment import (ACTION_SIZE, OBSERVATION_LAYOUT, OBSERVATION_SIZE,
                          EpisodeConfig, EpisodeResult, ObstacleCourse,
                          RunEnv, generate_obstacles, observe)
from .errors import (AnalysisError, EpisodeProtocolError, ModelError,
                     SimulationDiverged)
from .grader import (EvaluationSpec, GraderServer, LeaderboardEntry,
                     client_run, evaluate_local, leaderboard_report)
from .model import (ModelDefinition, default_model, load_default_file,
                    load_model, save_model, validate_model)
from .muscle import MuscleCurves, MuscleState, muscle_force
from .policies import (ConstantPolicy, ScriptedPolicy, ZeroPolicy,
                       run_episode)
from .rng import SplitMix64

__version__ = "1.0.0"

__all__ = [
    "ACTION_SIZE", "CONTROL_DT", "OBSERVATION_LAYOUT", "OBSERVATION_SIZE",
    "SUBSTEP_H", "SUBSTEPS_PER_CONTROL",
    "AnalysisError", "ConstantPolicy", "EpisodeConfig",
    "EpisodeProtocolError", "EpisodeResult", "EvaluationSpec",
    "GaitSummary", "GeneralizedForces", "GraderServer", "Kinematics",
    "LeaderboardEntry", "ModelDefinition", "ModelError", "MuscleCurves",
    "MuscleState", "ObstacleCourse", "RunEnv", "ScriptedPolicy",
    "SimState", "SimulationDiverged", "SplitMix64", "ZeroPolicy",
    "advance_control_step", "band_agreement", "bias_forces", "client_run",
    "compute_forces", "default_model", "detect_foot_strikes",
    "evaluate_local", "forward_dynamics", "forward_kinematics",
    "generate_obstacles", "initial_state", "integrate_substep",
    "leaderboard_report", "load_default_file", "load_model",
    "mass_matrix", "muscle_force", "observe", "run_episode", "save_model",
    "segment_and_average", "validate_model",
]
