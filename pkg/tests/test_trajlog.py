import numpy as np
import pytest

from musclerun import trajlog
from musclerun.environment import EpisodeConfig
from musclerun.model import default_model
from musclerun.policies import ConstantPolicy, run_episode
from musclerun.trajlog import LogWriter, model_hash, read_log


def test_roundtrip_bit_exact(tmp_path):
    path = tmp_path / "t.csv"
    rng = np.random.default_rng(2)
    meta = {"seed": 1, "difficulty": 0}
    rows = []
    with LogWriter(path, meta) as w:
        for i in range(7):
            row = (0.01 * (i + 1), rng.standard_normal(9),
                   rng.standard_normal(9), rng.uniform(0, 1, 18),
                   rng.uniform(0, 1, 18), rng.uniform(0, 900),
                   rng.uniform(0, 900), rng.standard_normal() * 1e-3)
            w.write_step(*row)
            rows.append(row)
    log = read_log(path)
    assert log.meta == meta
    assert len(log) == 7
    for i, row in enumerate(rows):
        assert log.time[i] == row[0]
        assert np.array_equal(log.q[i], row[1])
        assert np.array_equal(log.qdot[i], row[2])
        assert np.array_equal(log.activations[i], row[3])
        assert np.array_equal(log.excitations[i], row[4])
        assert log.foot_fy[i, 0] == row[5]
        assert log.foot_fy[i, 1] == row[6]
        assert log.reward_inc[i] == row[7]


def test_rejects_foreign_file(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("time,q0\n0.0,1.0\n")
    with pytest.raises(ValueError):
        read_log(path)


def test_model_hash_stable_and_sensitive():
    m = default_model()
    assert model_hash(m) == model_hash(default_model())
    import dataclasses
    other = dataclasses.replace(m, gravity=9.81)
    assert model_hash(other) != model_hash(m)


def test_episode_log_matches_results(tmp_path):
    path = tmp_path / "ep.csv"
    cfg = EpisodeConfig(seed=6, difficulty=1)
    res = run_episode(ConstantPolicy(0.3), cfg, log_path=path)
    log = read_log(path)
    assert len(log) == res.steps_taken
    assert log.meta["seed"] == 6
    assert log.meta["model_hash"] == model_hash(default_model())
    assert float(np.sum(log.reward_inc)) == pytest.approx(res.reward,
                                                          abs=1e-12)
    assert np.all(log.excitations == 0.3)
