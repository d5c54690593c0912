"""Command-line entry points: run, bench, course, serve, submit, board,
analyze, replay."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import analysis, dynamics, grader, trajlog
from .environment import EpisodeConfig, RunEnv, generate_obstacles
from .errors import AnalysisError
from .model import default_model, load_model
from .policies import ConstantPolicy, ScriptedPolicy, ZeroPolicy, run_episode

TOKEN_ENV = "MUSCLERUN_TOKEN"


def _load_model_arg(path):
    if not path:
        return default_model()
    with open(path) as fh:
        return load_model(fh.read())


def _make_policy(args):
    if args.script:
        return ScriptedPolicy.from_file(args.script)
    if args.constant is not None:
        return ConstantPolicy(args.constant)
    return ZeroPolicy()


def _add_episode_args(p):
    p.add_argument("--seed", type=int, default=None,
                   help="course seed (default: random)")
    p.add_argument("--difficulty", type=int, default=0, choices=(0, 1, 2))
    p.add_argument("--max-obstacles", type=int, default=3)
    p.add_argument("--model", default=None, help="model definition JSON")


def _add_policy_args(p):
    p.add_argument("--script", default=None,
                   help="scripted policy file (18 comma-separated "
                        "excitations per line)")
    p.add_argument("--constant", type=float, default=None,
                   help="constant excitation for all muscles")


def cmd_run(args) -> int:
    model = _load_model_arg(args.model)
    seed = args.seed
    if seed is None:
        import secrets
        seed = secrets.randbelow(2 ** 63)
    cfg = EpisodeConfig(seed=seed, difficulty=args.difficulty,
                        max_obstacles=args.max_obstacles)
    res = run_episode(_make_policy(args), cfg, model=model,
                      log_path=args.log)
    print(json.dumps({
        "seed": seed,
        "difficulty": args.difficulty,
        "reward": res.reward,
        "final_x": res.final_x,
        "ligament_integral": res.ligament_integral,
        "steps": res.steps_taken,
        "termination": res.termination,
    }, sort_keys=True))
    return 0


def cmd_bench(args) -> int:
    model = _load_model_arg(args.model)
    env = RunEnv(model=model)
    env.reset(difficulty=args.difficulty, seed=args.seed or 0,
              max_obstacles=args.max_obstacles)
    action = np.full(18, 0.2)
    env.step(action)                       # warm the compiled kernels
    env.reset(difficulty=args.difficulty, seed=args.seed or 0,
              max_obstacles=args.max_obstacles)
    n = 0
    t0 = time.perf_counter()
    while n < args.steps:
        _, _, done, _ = env.step(action)
        n += 1
        if done:
            env.reset(difficulty=args.difficulty, seed=args.seed or 0,
                      max_obstacles=args.max_obstacles)
    elapsed = time.perf_counter() - t0
    rate = n / elapsed
    print(f"{n} control steps in {elapsed:.3f} s: {rate:.1f} steps/s "
          f"(semi-implicit Euler, h={dynamics.SUBSTEP_H:g} s, "
          f"{dynamics.SUBSTEPS_PER_CONTROL} substeps/control step)")
    return 0


def cmd_course(args) -> int:
    seed = args.seed if args.seed is not None else 0
    cfg = EpisodeConfig(seed=seed, difficulty=args.difficulty,
                        max_obstacles=args.max_obstacles)
    course = generate_obstacles(cfg)
    if not course.obstacles:
        print("no obstacles")
        return 0
    print("index,x,y,r")
    for i, (x, y, r) in enumerate(course.obstacles):
        print(f"{i},{x!r},{y!r},{r!r}")
    print(f"psoas_scale_r,{course.psoas_scale_r!r}")
    print(f"psoas_scale_l,{course.psoas_scale_l!r}")
    return 0


def cmd_serve(args) -> int:
    spec = grader.NAMED_SPECS[args.spec]
    model = _load_model_arg(args.model)
    tokens = None
    if args.tokens:
        with open(args.tokens) as fh:
            tokens = {line.strip() for line in fh if line.strip()}
    server = grader.GraderServer(
        (args.host, args.port), spec,
        leaderboard_path=args.leaderboard,
        budget=args.budget, budget_path=args.budget_file,
        tokens=tokens, mode=args.mode, model=model,
        idle_timeout=args.idle_timeout)
    host, port = server.address
    print(f"LISTENING {port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
    return 0


def cmd_submit(args) -> int:
    token = args.token or os.environ.get(TOKEN_ENV, "")
    if not token:
        print(f"error: no token (use --token or ${TOKEN_ENV})",
              file=sys.stderr)
        return 1
    policy = _make_policy(args)
    try:
        per_seed, aggregate = grader.client_run(
            (args.host, args.port), token, policy)
    except (grader.GraderError, ConnectionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({"per_seed": per_seed, "aggregate": aggregate},
                     sort_keys=True))
    return 0


def cmd_board(args) -> int:
    ranked = grader.leaderboard_report(args.leaderboard, top_n=args.top)
    for rank, e in enumerate(ranked, 1):
        print(f"{rank:3d}  {e.aggregate:12.6f}  {e.token}  {e.timestamp}")
    if not ranked:
        print("(leaderboard is empty)")
    return 0


def cmd_analyze(args) -> int:
    log = trajlog.read_log(args.log)
    model = _load_model_arg(args.model)
    bw = model.total_mass * model.gravity
    summaries = []
    try:
        for side in ("r", "l"):
            for joint in ("hip", "knee", "ankle"):
                summaries.append(analysis.segment_and_average(
                    log, bw, side, joint))
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    analysis.write_summary_csv(args.out, summaries)
    for s in summaries:
        print(f"{s.side}_{s.joint}: {s.n_cycles} cycles")
    if args.reference:
        bands = analysis.read_band_csv(args.reference)
        for s in summaries:
            key = f"{s.side}_{s.joint}_mean"
            if key in bands:
                frac = analysis.band_agreement(s, bands[key])
                print(f"{s.side}_{s.joint} band agreement: {frac:.3f}")
    return 0


def cmd_replay(args) -> int:
    """Re-run the logged excitations and verify the log reproduces."""
    log = trajlog.read_log(args.log)
    meta = log.meta
    model = _load_model_arg(args.model)
    if trajlog.model_hash(model) != meta.get("model_hash"):
        print("error: model hash mismatch with log metadata",
              file=sys.stderr)
        return 1
    cfg = EpisodeConfig(seed=meta["seed"], difficulty=meta["difficulty"],
                        max_obstacles=meta["max_obstacles"])
    policy = ScriptedPolicy(log.excitations)
    import tempfile
    with tempfile.NamedTemporaryFile(suffix=".csv", delete=False) as tmp:
        tmp_path = tmp.name
    try:
        run_episode(policy, cfg, model=model, lam=meta.get("lam"),
                    log_path=tmp_path)
        new = trajlog.read_log(tmp_path)
    finally:
        os.unlink(tmp_path)
    if len(new) != len(log):
        print(f"MISMATCH: {len(new)} steps replayed vs {len(log)} logged")
        return 1
    for name, a, b in (("q", log.q, new.q), ("qdot", log.qdot, new.qdot),
                       ("activations", log.activations, new.activations),
                       ("reward", log.reward_inc, new.reward_inc)):
        if not np.array_equal(a, b):
            bad = int(np.argwhere(a != b)[0][0])
            print(f"MISMATCH in {name} at step {bad}")
            return 1
    print(f"OK: {len(log)} steps reproduced bit-for-bit")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="musclerun",
        description="Musculoskeletal running environment tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one episode")
    _add_episode_args(p)
    _add_policy_args(p)
    p.add_argument("--log", default=None, help="write a trajectory log")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="measure control-step throughput")
    _add_episode_args(p)
    p.add_argument("--steps", type=int, default=500)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("course", help="print a seeded obstacle course")
    _add_episode_args(p)
    p.set_defaults(func=cmd_course)

    p = sub.add_parser("serve", help="run the grading server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0)
    p.add_argument("--spec", default="open-stage",
                   choices=sorted(grader.NAMED_SPECS))
    p.add_argument("--mode", default="evaluation",
                   choices=("evaluation", "env"))
    p.add_argument("--leaderboard", default=None)
    p.add_argument("--budget", type=int, default=5)
    p.add_argument("--budget-file", default=None)
    p.add_argument("--tokens", default=None,
                   help="file with one accepted token per line")
    p.add_argument("--idle-timeout", type=float, default=grader.IDLE_TIMEOUT)
    p.add_argument("--model", default=None)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("submit", help="submit a policy to a grading server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--token", default=None,
                   help=f"submission token (default ${TOKEN_ENV})")
    _add_policy_args(p)
    p.set_defaults(func=cmd_submit)

    p = sub.add_parser("board", help="print the leaderboard")
    p.add_argument("--leaderboard", required=True)
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=cmd_board)

    p = sub.add_parser("analyze", help="gait analysis of a trajectory log")
    p.add_argument("--log", required=True)
    p.add_argument("--out", required=True, help="summary CSV output")
    p.add_argument("--reference", default=None,
                   help="reference band CSV for agreement scoring")
    p.add_argument("--model", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("replay", help="verify a log reproduces bit-for-bit")
    p.add_argument("--log", required=True)
    p.add_argument("--model", default=None)
    p.set_defaults(func=cmd_replay)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
