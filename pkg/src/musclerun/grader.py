"""Remote evaluation: wire protocol, grading server, client, leaderboard.

The protocol is newline-delimited JSON over TCP (one message per line,
documented byte-exactly in ``docs/protocol.md``).  Floats ride as shortest
round-trip decimals, so a policy graded remotely sees exactly the numbers
a local evaluation produces.  Every message carries a ``seq`` number,
strictly increasing per sender within a session.

Two serving modes:

* ``evaluation`` (default): the server drives the configured seed list,
  scores the client's policy, enforces the per-token daily submission
  budget, and appends one leaderboard entry per completed evaluation.
* ``env``: the client drives reset/step interactively (used by external
  bindings); no budget or leaderboard.
"""

from __future__ import annotations

import datetime
import json
import logging
import os
import socket
import socketserver
import threading
from dataclasses import dataclass, field

import numpy as np

from .environment import (ACTION_SIZE, OBSERVATION_LAYOUT, OBSERVATION_SIZE,
                          EpisodeConfig, RunEnv)
from .model import ModelDefinition

log = logging.getLogger(__name__)

PROTOCOL_VERSION = "musclerun-protocol/1"
IDLE_TIMEOUT = 60.0

ERR_BUDGET = "budget_exhausted"
ERR_PROTOCOL = "protocol_error"
ERR_TIMEOUT = "timeout"
ERR_AUTH = "auth_error"


@dataclass(frozen=True)
class EvaluationSpec:
    """Seed list and episode parameters used to grade every submission."""

    seeds: tuple[int, ...]
    difficulty: int = 2
    max_obstacles: int = 3

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("seed list must be non-empty")

    def config(self, seed: int) -> EpisodeConfig:
        return EpisodeConfig(seed=seed, difficulty=self.difficulty,
                             max_obstacles=self.max_obstacles)


# Shipped default specs mirroring the two competition rounds.
OPEN_STAGE_SPEC = EvaluationSpec(seeds=(101, 202, 303), difficulty=2,
                                 max_obstacles=3)
PLAYOFF_SPEC = EvaluationSpec(
    seeds=(9001, 9002, 9003, 9004, 9005, 9006, 9007, 9008, 9009, 9010),
    difficulty=2, max_obstacles=10)

NAMED_SPECS = {"open-stage": OPEN_STAGE_SPEC, "playoff": PLAYOFF_SPEC}


def evaluate_local(policy, spec: EvaluationSpec,
                   model: ModelDefinition | None = None,
                   lam: float | None = None):
    """(per-seed rewards, aggregate mean) for a policy, run in-process."""
    rewards = []
    for seed in spec.seeds:
        env = RunEnv(model=model) if lam is None else RunEnv(model=model, lam=lam)
        if hasattr(policy, "reset"):
            policy.reset()
        obs = env.reset(difficulty=spec.difficulty, seed=seed,
                        max_obstacles=spec.max_obstacles)
        done = False
        while not done:
            obs, reward, done, info = env.step(policy(obs))
        rewards.append(env.result().reward)
    return rewards, sum(rewards) / len(rewards)


# ---------------------------------------------------------------------------
# Leaderboard

@dataclass(frozen=True)
class LeaderboardEntry:
    token: str
    timestamp: str                # ISO 8601, UTC
    per_seed: tuple[float, ...]
    aggregate: float
    version: str = PROTOCOL_VERSION


def append_entry(path, entry: LeaderboardEntry) -> None:
    """One self-contained JSON line, flushed atomically."""
    line = json.dumps({
        "token": entry.token,
        "timestamp": entry.timestamp,
        "per_seed": list(entry.per_seed),
        "aggregate": entry.aggregate,
        "version": entry.version,
    }, sort_keys=True)
    with open(path, "a") as fh:
        fh.write(line + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def read_entries(path) -> list[LeaderboardEntry]:
    entries = []
    if not os.path.exists(path):
        return entries
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
                entries.append(LeaderboardEntry(
                    token=d["token"], timestamp=d["timestamp"],
                    per_seed=tuple(float(x) for x in d["per_seed"]),
                    aggregate=float(d["aggregate"]),
                    version=d.get("version", "?")))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                log.warning("%s:%d: skipping corrupt leaderboard line", path, ln)
    return entries


def leaderboard_report(path, top_n: int = 10) -> list[LeaderboardEntry]:
    """Best entry per token, ranked by aggregate desc, earlier ties first."""
    best: dict[str, LeaderboardEntry] = {}
    for e in read_entries(path):
        cur = best.get(e.token)
        if (cur is None or e.aggregate > cur.aggregate
                or (e.aggregate == cur.aggregate
                    and e.timestamp < cur.timestamp)):
            best[e.token] = e
    ranked = sorted(best.values(), key=lambda e: (-e.aggregate, e.timestamp))
    return ranked[:top_n]


# ---------------------------------------------------------------------------
# Budget tracking

class BudgetStore:
    """Per-token evaluations per UTC day, persisted as JSON."""

    def __init__(self, path, limit: int):
        self.path = path
        self.limit = limit
        self._lock = threading.Lock()

    def _load(self) -> dict:
        if self.path is None or not os.path.exists(self.path):
            return {}
        try:
            with open(self.path) as fh:
                return json.load(fh)
        except (json.JSONDecodeError, OSError):
            return {}

    def try_consume(self, token: str) -> bool:
        """Count one evaluation; False when the daily budget is exhausted."""
        day = datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%d")
        with self._lock:
            data = self._load()
            used = data.get(token, {}).get(day, 0)
            if used >= self.limit:
                return False
            data.setdefault(token, {})[day] = used + 1
            if self.path is not None:
                tmp = self.path + ".tmp"
                with open(tmp, "w") as fh:
                    json.dump(data, fh)
                os.replace(tmp, self.path)
            else:
                self._mem = data
            return True


class _MemBudget(BudgetStore):
    """In-memory budget (env-mode tests, no persistence)."""

    def __init__(self, limit):
        super().__init__(None, limit)
        self._data = {}

    def _load(self):
        return self._data


# ---------------------------------------------------------------------------
# Wire helpers

class ProtocolError(Exception):
    def __init__(self, message, seq=None):
        self.seq = seq
        super().__init__(message)


class _Wire:
    """Line-delimited JSON messaging with per-direction sequence numbers."""

    def __init__(self, rfile, wfile):
        self.rfile = rfile
        self.wfile = wfile
        self._send_seq = 0
        self._last_recv_seq = -1

    def send(self, kind: str, **payload):
        msg = {"kind": kind, "seq": self._send_seq, **payload}
        self._send_seq += 1
        self.wfile.write((json.dumps(msg) + "\n").encode())
        self.wfile.flush()

    def recv(self) -> dict:
        line = self.rfile.readline()
        if not line:
            raise ConnectionError("peer closed the connection")
        try:
            msg = json.loads(line.decode())
        except json.JSONDecodeError:
            raise ProtocolError("message is not valid JSON",
                                seq=self._last_recv_seq + 1)
        if not isinstance(msg, dict) or "kind" not in msg or "seq" not in msg:
            raise ProtocolError("message missing kind/seq",
                                seq=self._last_recv_seq + 1)
        if not (isinstance(msg["seq"], int) and msg["seq"] > self._last_recv_seq):
            raise ProtocolError("sequence number not strictly increasing",
                                seq=msg.get("seq"))
        self._last_recv_seq = msg["seq"]
        return msg

    def expect(self, kind: str) -> dict:
        msg = self.recv()
        if msg["kind"] != kind:
            raise ProtocolError(f"expected {kind!r}, got {msg['kind']!r}",
                                seq=msg["seq"])
        return msg


def _valid_action(values):
    return (isinstance(values, list) and len(values) == ACTION_SIZE
            and all(isinstance(v, (int, float)) for v in values))


# ---------------------------------------------------------------------------
# Server

class GraderServer(socketserver.ThreadingTCPServer):
    """Hosts one environment per session; sessions are fully isolated."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, bind_address, spec: EvaluationSpec,
                 leaderboard_path=None, budget: int = 5,
                 budget_path=None, tokens=None, mode: str = "evaluation",
                 model: ModelDefinition | None = None,
                 idle_timeout: float = IDLE_TIMEOUT):
        self.spec = spec
        self.leaderboard_path = leaderboard_path
        self.tokens = set(tokens) if tokens is not None else None
        self.mode = mode
        self.model = model
        self.idle_timeout = idle_timeout
        self.budget_store = (BudgetStore(budget_path, budget)
                             if budget_path else _MemBudget(budget))
        self._board_lock = threading.Lock()
        super().__init__(bind_address, _SessionHandler)

    @property
    def address(self):
        return self.socket.getsockname()

    def record_entry(self, entry: LeaderboardEntry):
        if self.leaderboard_path is None:
            return
        with self._board_lock:
            append_entry(self.leaderboard_path, entry)


class _SessionHandler(socketserver.StreamRequestHandler):

    def handle(self):
        server: GraderServer = self.server
        self.connection.settimeout(server.idle_timeout)
        wire = _Wire(self.rfile, self.wfile)
        try:
            hello = wire.expect("hello")
            token = str(hello.get("token", ""))
            if hello.get("version") != PROTOCOL_VERSION:
                wire.send("error", code=ERR_PROTOCOL,
                          message=f"unsupported protocol version "
                                  f"{hello.get('version')!r}")
                return
            if server.tokens is not None and token not in server.tokens:
                wire.send("error", code=ERR_AUTH,
                          message=f"unknown token {token!r}")
                return
            if server.mode == "evaluation":
                if not server.budget_store.try_consume(token):
                    wire.send("error", code=ERR_BUDGET,
                              message="daily submission budget exhausted")
                    return
                wire.send("hello", version=PROTOCOL_VERSION,
                          seeds=len(server.spec.seeds),
                          difficulty=server.spec.difficulty,
                          max_obstacles=server.spec.max_obstacles)
                self._run_evaluation(server, wire, token)
            else:
                wire.send("hello", version=PROTOCOL_VERSION, mode="env",
                          observation_layout=list(OBSERVATION_LAYOUT))
                self._run_env_session(server, wire)
        except socket.timeout:
            try:
                wire.send("error", code=ERR_TIMEOUT,
                          message=f"idle for more than "
                                  f"{server.idle_timeout:g} s")
            except OSError:
                pass
        except ProtocolError as exc:
            try:
                wire.send("error", code=ERR_PROTOCOL, message=str(exc),
                          offending_seq=exc.seq)
            except OSError:
                pass
        except (ConnectionError, OSError):
            pass

    def _run_evaluation(self, server, wire, token):
        per_seed = []
        for seed in server.spec.seeds:
            env = RunEnv(model=server.model)
            obs = env.reset(difficulty=server.spec.difficulty, seed=seed,
                            max_obstacles=server.spec.max_obstacles)
            wire.send("reset", cfg={"seed": seed,
                                    "difficulty": server.spec.difficulty,
                                    "max_obstacles": server.spec.max_obstacles},
                      observation=list(obs))
            done = False
            while not done:
                msg = wire.expect("action")
                values = msg.get("values")
                if not _valid_action(values):
                    raise ProtocolError(
                        f"action must be a list of {ACTION_SIZE} numbers",
                        seq=msg["seq"])
                obs, reward, done, info = env.step(np.array(values, dtype=float))
                wire.send("step_result", observation=list(obs), reward=reward,
                          done=done)
            result = env.result()
            per_seed.append(result.reward)
            wire.send("episode_done", seed=seed, reward=result.reward,
                      termination=result.termination)
        aggregate = sum(per_seed) / len(per_seed)
        wire.send("evaluation_done", per_seed=per_seed, aggregate=aggregate)
        server.record_entry(LeaderboardEntry(
            token=token,
            timestamp=datetime.datetime.now(datetime.timezone.utc)
            .isoformat(timespec="seconds"),
            per_seed=tuple(per_seed),
            aggregate=aggregate,
        ))

    def _run_env_session(self, server, wire):
        env = RunEnv(model=server.model)
        while True:
            try:
                msg = wire.recv()
            except ConnectionError:
                return
            if msg["kind"] == "bye":
                return
            if msg["kind"] == "reset":
                obs = env.reset(
                    difficulty=int(msg.get("difficulty", 0)),
                    seed=msg.get("seed"),
                    max_obstacles=int(msg.get("max_obstacles", 3)))
                wire.send("observation", values=list(obs),
                          seed=env.cfg.seed)
            elif msg["kind"] == "action":
                values = msg.get("values")
                if not _valid_action(values):
                    raise ProtocolError(
                        f"action must be a list of {ACTION_SIZE} numbers",
                        seq=msg["seq"])
                if env.done:
                    raise ProtocolError("step after episode end",
                                        seq=msg["seq"])
                obs, reward, done, info = env.step(np.array(values, dtype=float))
                wire.send("step_result", observation=list(obs), reward=reward,
                          done=done,
                          termination=info.get("termination"))
            else:
                raise ProtocolError(f"unexpected kind {msg['kind']!r}",
                                    seq=msg["seq"])


def serve_background(**kwargs):
    """Start a GraderServer on a daemon thread; returns (server, thread)."""
    server = GraderServer(**kwargs)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread


# ---------------------------------------------------------------------------
# Client

class GraderError(RuntimeError):
    def __init__(self, code, message):
        self.code = code
        super().__init__(f"{code}: {message}")


def _check_error(msg):
    if msg["kind"] == "error":
        raise GraderError(msg.get("code", "?"), msg.get("message", ""))
    return msg


def client_run(address, token: str, policy, timeout: float = IDLE_TIMEOUT):
    """Drive a full remote evaluation; returns (per-seed list, aggregate)."""
    host, port = address
    with socket.create_connection((host, port), timeout=timeout) as sock:
        wire = _Wire(sock.makefile("rb"), sock.makefile("wb"))
        wire.send("hello", token=token, version=PROTOCOL_VERSION)
        hello = _check_error(wire.recv())
        if hello["kind"] != "hello":
            raise GraderError(ERR_PROTOCOL, f"unexpected {hello['kind']!r}")
        n_seeds = int(hello["seeds"])
        per_seed = []
        for _ in range(n_seeds):
            msg = _check_error(wire.recv())
            if msg["kind"] != "reset":
                raise GraderError(ERR_PROTOCOL, f"expected reset, got {msg['kind']!r}")
            if hasattr(policy, "reset"):
                policy.reset()
            obs = np.array(msg["observation"], dtype=float)
            done = False
            while not done:
                action = np.asarray(policy(obs), dtype=float)
                wire.send("action", values=[float(v) for v in action])
                msg = _check_error(wire.recv())
                if msg["kind"] != "step_result":
                    raise GraderError(ERR_PROTOCOL,
                                      f"expected step_result, got {msg['kind']!r}")
                obs = np.array(msg["observation"], dtype=float)
                done = bool(msg["done"])
            msg = _check_error(wire.recv())
            if msg["kind"] != "episode_done":
                raise GraderError(ERR_PROTOCOL,
                                  f"expected episode_done, got {msg['kind']!r}")
            per_seed.append(float(msg["reward"]))
        msg = _check_error(wire.recv())
        if msg["kind"] != "evaluation_done":
            raise GraderError(ERR_PROTOCOL,
                              f"expected evaluation_done, got {msg['kind']!r}")
        return per_seed, float(msg["aggregate"])
