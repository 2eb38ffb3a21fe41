"""Harness: deterministic streams, regret accounting, summaries, bounds."""

import csv
import json
import math
from dataclasses import dataclass

import numpy as np
import pytest

from dpbandits.agents import Agent
from dpbandits.envs import BanditEnv, Bernoulli, make_standard_env
from dpbandits.harness import (
    AgentSpec,
    ExperimentConfig,
    bayes_regret_check,
    regret_bound,
    replication_rng,
    run_experiment,
    run_replication,
    thinned_rounds,
    write_summary_json,
    write_trace_csv,
    read_summary_json,
)


class FixedArmAgent(Agent):
    """Always plays one arm; used to pin down expected-regret accounting."""

    def __init__(self, n_arms, arm=0):
        super().__init__(n_arms)
        self.arm = arm

    def select(self, rng):
        return self.arm

    def update(self, arm, reward, rng=None):
        self.t += 1


@dataclass(frozen=True)
class FixedArmSpec(AgentSpec):
    arm: int = 0

    def build(self, n_arms):
        return FixedArmAgent(n_arms, self.arm)


def test_replication_rng_streams_are_distinct_and_stable():
    a = replication_rng(1, "x", 0).random(4)
    b = replication_rng(1, "x", 0).random(4)
    c = replication_rng(1, "x", 1).random(4)
    d = replication_rng(1, "y", 0).random(4)
    e = replication_rng(2, "x", 0).random(4)
    assert np.array_equal(a, b)
    for other in (c, d, e):
        assert not np.array_equal(a, other)


def test_single_arm_replication_has_zero_regret():
    env = BanditEnv([Bernoulli(0.5)])
    result = run_replication(env, AgentSpec("beta_ts", "beta_ts"), 1, 0, 0)
    assert result.cum_regret.tolist() == [0.0]


def test_worst_arm_regret_is_gap_times_t():
    env = make_standard_env("bernoulli6")
    result = run_replication(env, FixedArmSpec("fixed", "fixed"), 50, 3, 0)
    expected = np.cumsum(np.full(50, env.gaps[0]))  # 0.25 per round
    assert np.array_equal(result.cum_regret, expected)
    assert result.cum_regret[-1] == pytest.approx(12.5, rel=1e-12)
    assert result.pulls.tolist() == [50, 0, 0, 0, 0, 0]


def test_replication_is_bit_deterministic():
    env = make_standard_env("bernoulli6")
    spec = AgentSpec("dpps", "dpps", {"truncation": 20})
    a = run_replication(env, spec, 100, 7, 4)
    b = run_replication(env, spec, 100, 7, 4)
    assert np.array_equal(a.cum_regret, b.cum_regret)
    c = run_replication(env, spec, 100, 7, 5)
    assert not np.array_equal(a.cum_regret, c.cum_regret)


def test_cumulative_regret_is_nondecreasing():
    env = make_standard_env("bernoulli6")
    for kind in ("dpps", "npts", "beta_ts", "generalized_ts", "ucb"):
        spec = AgentSpec(kind, kind, {"truncation": 20} if kind == "dpps" else {})
        result = run_replication(env, spec, 200, 11, 0)
        assert np.all(np.diff(result.cum_regret) >= 0)


def test_thinned_rounds_grid():
    assert thinned_rounds(5, 1).tolist() == [1, 2, 3, 4, 5]
    assert thinned_rounds(100, 30).tolist() == [1, 30, 60, 90, 100]
    assert thinned_rounds(60, 30).tolist() == [1, 30, 60]


def test_run_experiment_single_replication_collapses_quantiles():
    env = make_standard_env("bernoulli6")
    cfg = ExperimentConfig(env=env, agents=[AgentSpec("beta_ts", "beta_ts")],
                           horizon=50, replications=1, master_seed=5)
    res = run_experiment(cfg)
    s = res.summary.agents["beta_ts"]
    assert np.array_equal(s.mean, s.q_lo)
    assert np.array_equal(s.mean, s.q_hi)
    assert np.array_equal(s.mean, res.traces["beta_ts"].regret[0])


def test_parallel_and_serial_results_identical(tmp_path):
    env = make_standard_env("bernoulli6")
    agents = [AgentSpec("npts", "npts"), AgentSpec("beta_ts", "beta_ts")]
    cfg = ExperimentConfig(env=env, agents=agents, horizon=300,
                           replications=6, master_seed=21, thin=10)
    serial = run_experiment(cfg, threads=None,
                            trace_path=tmp_path / "serial.csv")
    parallel = run_experiment(cfg, threads=2,
                              trace_path=tmp_path / "parallel.csv")
    for label in ("npts", "beta_ts"):
        assert np.array_equal(serial.traces[label].regret,
                              parallel.traces[label].regret)
        assert np.array_equal(serial.summary.agents[label].mean,
                              parallel.summary.agents[label].mean)
    assert (tmp_path / "serial.csv").read_bytes() == \
        (tmp_path / "parallel.csv").read_bytes()


def test_quantile_band_brackets_mean_most_of_the_time():
    env = make_standard_env("bernoulli6")
    cfg = ExperimentConfig(env=env, agents=[AgentSpec("beta_ts", "beta_ts")],
                           horizon=400, replications=50, master_seed=31)
    s = run_experiment(cfg).summary.agents["beta_ts"]
    inside = np.mean((s.q_lo <= s.mean) & (s.mean <= s.q_hi))
    assert inside >= 0.95
    assert np.all(s.q_lo <= s.q_hi)
    assert np.all(np.diff(s.mean) >= -1e-12)


def test_trace_csv_format(tmp_path):
    env = make_standard_env("bernoulli6")
    cfg = ExperimentConfig(env=env, agents=[AgentSpec("ucb", "ucb")],
                           horizon=40, replications=3, master_seed=9, thin=10)
    path = tmp_path / "trace.csv"
    run_experiment(cfg, trace_path=path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["agent", "run", "t", "cum_regret"]
    ts = thinned_rounds(40, 10)
    assert len(rows) == 1 + 3 * len(ts)
    assert rows[1][:3] == ["ucb", "0", "1"]
    assert float(rows[-1][3]) >= 0.0


def test_summary_json_round_trip(tmp_path):
    env = make_standard_env("bernoulli6")
    cfg = ExperimentConfig(env=env, agents=[AgentSpec("npts", "npts")],
                           horizon=30, replications=2, master_seed=13)
    path = tmp_path / "summary.json"
    res = run_experiment(cfg, summary_path=path)
    loaded = read_summary_json(path)
    assert set(loaded) == {"npts"}
    entry = loaded["npts"]
    assert set(entry) == {"t", "mean", "q_lo", "q_hi", "runtime_seconds"}
    assert entry["t"] == list(range(1, 31))
    assert entry["mean"] == pytest.approx(res.summary.agents["npts"].mean.tolist())


def test_config_validation():
    env = make_standard_env("bernoulli6")
    with pytest.raises(ValueError):
        ExperimentConfig(env=env, agents=[AgentSpec("a", "npts")],
                         horizon=0, replications=1, master_seed=0)
    with pytest.raises(ValueError):
        ExperimentConfig(env=env, agents=[AgentSpec("a", "npts")],
                         horizon=1, replications=1, master_seed=0,
                         quantiles=(0.9, 0.1))
    with pytest.raises(ValueError):
        ExperimentConfig(env=env,
                         agents=[AgentSpec("a", "npts"), AgentSpec("a", "ucb")],
                         horizon=1, replications=1, master_seed=0)


def test_regret_bound_values():
    assert regret_bound(0.5, 1, 100) == 0.0
    expected = 0.5 * math.sqrt(2 * 6 * math.log(6) * 10_000)
    assert regret_bound(0.5, 6, 10_000) == pytest.approx(expected, rel=1e-12)
    assert regret_bound(0.5, 6, 10_000) == pytest.approx(231.8, abs=0.1)
    assert regret_bound(1.0, 2, 1) == pytest.approx(math.sqrt(4 * math.log(2)), rel=1e-12)
    assert regret_bound(1.0, 2, 1) == pytest.approx(1.665, abs=0.001)
    with pytest.raises(ValueError):
        regret_bound(0.0, 2, 10)


def _one_arm_env(rng):
    return BanditEnv([Bernoulli(0.4)])


def _three_arm_env(rng):
    return BanditEnv([Bernoulli(float(p)) for p in rng.random(3)])


def test_bayes_regret_check_single_arm_is_zero():
    check = bayes_regret_check(_one_arm_env, AgentSpec("npts", "npts"),
                               horizon=50, replications=5, master_seed=3,
                               sigma=0.5)
    assert check.empirical == 0.0
    assert check.bound == 0.0
    assert check.passed


def test_bayes_regret_check_desk_scale():
    check = bayes_regret_check(_three_arm_env, AgentSpec("npts", "npts"),
                               horizon=500, replications=20, master_seed=17,
                               sigma=0.5, threads=2)
    assert check.bound == pytest.approx(regret_bound(0.5, 3, 500), rel=1e-12)
    assert check.passed, (check.empirical, check.bound)
    assert check.per_run.shape == (20,)
