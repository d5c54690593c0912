"""Trajectory log format: one record per control step.

Line-delimited text: a metadata line, a header naming every column, then
one comma-separated row per control step.  Floats are written as shortest
round-trip decimals, so a parsed log reproduces the simulation values
bit-for-bit.  Used by the analysis tools and by replay verification.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .model import ModelDefinition, save_model

FORMAT_TAG = "musclerun-log/1"

NQ = 9
NM = 18

COLUMNS = (
    ["time"]
    + [f"q{i}" for i in range(NQ)]
    + [f"qd{i}" for i in range(NQ)]
    + [f"act{i}" for i in range(NM)]
    + [f"exc{i}" for i in range(NM)]
    + ["foot_fy_r", "foot_fy_l", "reward_inc"]
)


def model_hash(model: ModelDefinition) -> str:
    return hashlib.sha256(save_model(model).encode()).hexdigest()[:12]


def _fmt(x: float) -> str:
    return repr(float(x))


class LogWriter:
    """Streams control-step records to a file."""

    def __init__(self, path, meta: dict):
        self.path = path
        self._fh = open(path, "w")
        self._fh.write(f"# {FORMAT_TAG} {json.dumps(meta, sort_keys=True)}\n")
        self._fh.write(",".join(COLUMNS) + "\n")

    def write_step(self, time, q, qd, act, exc, foot_fy_r, foot_fy_l,
                   reward_inc):
        row = ([_fmt(time)] + [_fmt(v) for v in q] + [_fmt(v) for v in qd]
               + [_fmt(v) for v in act] + [_fmt(v) for v in exc]
               + [_fmt(foot_fy_r), _fmt(foot_fy_l), _fmt(reward_inc)])
        self._fh.write(",".join(row) + "\n")

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


@dataclass
class TrajectoryLog:
    meta: dict
    time: np.ndarray
    q: np.ndarray            # (n, 9)
    qdot: np.ndarray         # (n, 9)
    activations: np.ndarray  # (n, 18)
    excitations: np.ndarray  # (n, 18)
    foot_fy: np.ndarray      # (n, 2) right, left
    reward_inc: np.ndarray   # (n,)

    def __len__(self):
        return len(self.time)


def read_log(path) -> TrajectoryLog:
    with open(path) as fh:
        first = fh.readline().rstrip("\n")
        if not first.startswith(f"# {FORMAT_TAG} "):
            raise ValueError(f"{path}: not a {FORMAT_TAG} file")
        meta = json.loads(first[len(FORMAT_TAG) + 3:])
        header = fh.readline().rstrip("\n").split(",")
        if header != COLUMNS:
            raise ValueError(f"{path}: unexpected column layout")
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    data = np.array(rows, dtype=float) if rows else np.zeros((0, len(COLUMNS)))
    i = 1
    q = data[:, i:i + NQ]; i += NQ
    qd = data[:, i:i + NQ]; i += NQ
    act = data[:, i:i + NM]; i += NM
    exc = data[:, i:i + NM]; i += NM
    return TrajectoryLog(
        meta=meta,
        time=data[:, 0],
        q=q, qdot=qd, activations=act, excitations=exc,
        foot_fy=data[:, i:i + 2],
        reward_inc=data[:, i + 2],
    )
