import json
import threading

import numpy as np
import pytest

from musclerun import cli, grader
from musclerun.policies import ScriptedPolicy


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_run_zero_policy(capsys):
    code, out, err = run_cli(capsys, "run", "--seed", "5", "--difficulty", "0")
    assert code == 0
    doc = json.loads(out)
    assert doc["termination"] == "fell"
    assert doc["seed"] == 5


def test_run_repeatable(capsys):
    _, out1, _ = run_cli(capsys, "run", "--seed", "5")
    _, out2, _ = run_cli(capsys, "run", "--seed", "5")
    assert out1 == out2


def test_run_writes_log(capsys, tmp_path):
    path = tmp_path / "log.csv"
    code, out, _ = run_cli(capsys, "run", "--seed", "5", "--log", str(path))
    assert code == 0
    assert path.exists()


def test_course_difficulty_zero(capsys):
    code, out, _ = run_cli(capsys, "course", "--seed", "1",
                           "--difficulty", "0")
    assert code == 0
    assert out.strip() == "no obstacles"


def test_course_seed_42_table(capsys):
    code, out, _ = run_cli(capsys, "course", "--seed", "42",
                           "--difficulty", "2")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "index,x,y,r"
    from reference_rng import reference_course
    ref_obs, ref_l, ref_r = reference_course(42, 2)
    for i, ob in enumerate(ref_obs):
        cells = lines[1 + i].split(",")
        assert int(cells[0]) == i
        assert [float(c) for c in cells[1:]] == list(ob)
    assert lines[-2] == f"psoas_scale_r,{ref_r!r}"
    assert lines[-1] == f"psoas_scale_l,{ref_l!r}"


def test_bench_reports_settings(capsys):
    code, out, _ = run_cli(capsys, "bench", "--steps", "30", "--seed", "0")
    assert code == 0
    assert "steps/s" in out
    assert "substeps/control step" in out
    assert "h=0.0002" in out


def test_scripted_policy_file(capsys, tmp_path):
    script = tmp_path / "actions.csv"
    script.write_text("# comment\n" + ",".join(["0.5"] * 18) + "\n")
    code, out, _ = run_cli(capsys, "run", "--seed", "3",
                           "--script", str(script))
    assert code == 0
    json.loads(out)


def test_scripted_policy_wrong_width(tmp_path, capsys):
    script = tmp_path / "bad.csv"
    script.write_text("0.5,0.5\n")
    code, out, err = run_cli(capsys, "run", "--seed", "3",
                             "--script", str(script))
    assert code == 1
    assert err.strip().startswith("error:")


def test_replay_roundtrip(capsys, tmp_path):
    path = tmp_path / "log.csv"
    run_cli(capsys, "run", "--seed", "8", "--difficulty", "1",
            "--constant", "0.25", "--log", str(path))
    code, out, _ = run_cli(capsys, "replay", "--log", str(path))
    assert code == 0
    assert "bit-for-bit" in out


def test_board_empty(capsys, tmp_path):
    board = tmp_path / "b.jsonl"
    board.write_text("")
    code, out, _ = run_cli(capsys, "board", "--leaderboard", str(board))
    assert code == 0
    assert "empty" in out


def test_submit_against_server(capsys, tmp_path, monkeypatch):
    srv, _ = grader.serve_background(
        bind_address=("127.0.0.1", 0),
        spec=grader.EvaluationSpec(seeds=(7,), difficulty=0),
        leaderboard_path=str(tmp_path / "b.jsonl"))
    try:
        host, port = srv.address
        code, out, _ = run_cli(capsys, "submit", "--port", str(port),
                               "--token", "me")
        assert code == 0
        doc = json.loads(out)
        assert len(doc["per_seed"]) == 1
        code, out, _ = run_cli(capsys, "board", "--leaderboard",
                               str(tmp_path / "b.jsonl"))
        assert code == 0
        assert "me" in out
    finally:
        srv.shutdown()


def test_submit_token_from_environment(capsys, tmp_path, monkeypatch):
    srv, _ = grader.serve_background(
        bind_address=("127.0.0.1", 0),
        spec=grader.EvaluationSpec(seeds=(7,), difficulty=0))
    try:
        monkeypatch.setenv("MUSCLERUN_TOKEN", "env-token")
        host, port = srv.address
        code, out, _ = run_cli(capsys, "submit", "--port", str(port))
        assert code == 0
    finally:
        srv.shutdown()


def test_submit_without_token_fails(capsys, monkeypatch):
    monkeypatch.delenv("MUSCLERUN_TOKEN", raising=False)
    code, out, err = run_cli(capsys, "submit", "--port", "1")
    assert code == 1
    assert "token" in err


def test_analyze_insufficient_strikes(capsys, tmp_path):
    log = tmp_path / "log.csv"
    run_cli(capsys, "run", "--seed", "5", "--log", str(log))
    code, out, err = run_cli(capsys, "analyze", "--log", str(log),
                             "--out", str(tmp_path / "out.csv"))
    assert code == 1
    assert "error:" in err
