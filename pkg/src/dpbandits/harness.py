"""Reproducible regret experiments.

Replications are embarrassingly parallel: every (agent, run) pair gets its
own rng stream derived from (master_seed, sha256(agent label), run index)
through numpy's SeedSequence, so results are bit-identical whether runs
execute serially or across a process pool, and regardless of scheduling
order. Regret is accounted in expectation: each round adds the true mean
gap of the pulled arm, not a realized reward difference.
"""

import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .agents import Agent, make_agent
from .envs import BanditEnv


# ---------------------------------------------------------------------------
# Specs and rng streams
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AgentSpec:
    """Picklable recipe for building one agent per replication."""

    label: str
    kind: str
    params: dict = field(default_factory=dict)

    def build(self, n_arms: int) -> Agent:
        return make_agent(self.kind, n_arms, **self.params)


@dataclass
class ExperimentConfig:
    env: BanditEnv
    agents: Sequence[AgentSpec]
    horizon: int
    replications: int
    master_seed: int
    quantiles: tuple = (0.10, 0.90)
    thin: int = 1

    def __post_init__(self):
        if self.horizon < 1 or self.replications < 1:
            raise ValueError("horizon and replications must be >= 1")
        q_lo, q_hi = self.quantiles
        if not 0.0 < q_lo < q_hi < 1.0:
            raise ValueError("quantiles must satisfy 0 < lower < upper < 1")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        labels = [a.label for a in self.agents]
        if len(set(labels)) != len(labels):
            raise ValueError("agent labels must be unique")


def replication_rng(master_seed: int, label: str, run_index: int) -> np.random.Generator:
    """Collision-free stream for one (agent, run) pair."""
    word = int.from_bytes(hashlib.sha256(label.encode()).digest()[:8], "little")
    return np.random.default_rng(
        np.random.SeedSequence([int(master_seed), word, int(run_index)])
    )


# ---------------------------------------------------------------------------
# Replications
# ---------------------------------------------------------------------------

@dataclass
class ReplicationResult:
    run: int
    cum_regret: np.ndarray
    pulls: np.ndarray
    seconds: float


@dataclass
class RegretTrace:
    """Per-agent stack of replications: regret is (R, T), pulls (R, K)."""

    agent: str
    regret: np.ndarray
    pulls: np.ndarray
    seconds: np.ndarray

    def final_regret(self) -> np.ndarray:
        return self.regret[:, -1]


def run_replication(env: BanditEnv, spec: AgentSpec, horizon: int,
                    master_seed: int, run_index: int) -> ReplicationResult:
    """Roll one agent through `horizon` rounds on its own rng stream."""
    rng = replication_rng(master_seed, spec.label, run_index)
    agent = spec.build(env.k)
    gaps = env.gaps
    cum = np.empty(horizon)
    pulls = np.zeros(env.k, dtype=int)
    total = 0.0
    start = time.perf_counter()
    for t in range(horizon):
        arm = agent.select(rng)
        reward = env.sample_reward(arm, rng)
        agent.update(arm, reward, rng)
        pulls[arm] += 1
        total += gaps[arm]
        cum[t] = total
    seconds = time.perf_counter() - start
    return ReplicationResult(run_index, cum, pulls, seconds)


def _job(args):
    env, spec, horizon, master_seed, run_index = args
    return spec.label, run_replication(env, spec, horizon, master_seed, run_index)


def _run_jobs(jobs, threads):
    if threads and threads > 1:
        chunk = max(1, len(jobs) // (threads * 4))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_job, jobs, chunksize=chunk))
    return [_job(j) for j in jobs]


# ---------------------------------------------------------------------------
# Experiments and summaries
# ---------------------------------------------------------------------------

@dataclass
class AgentSummary:
    t: np.ndarray
    mean: np.ndarray
    q_lo: np.ndarray
    q_hi: np.ndarray
    runtime_seconds: float


@dataclass
class ExperimentSummary:
    agents: dict
    quantiles: tuple


@dataclass
class ExperimentResult:
    summary: ExperimentSummary
    traces: dict


def thinned_rounds(horizon: int, thin: int) -> np.ndarray:
    """1-based round grid kept in persisted output: multiples of `thin`
    plus the first and final round."""
    if thin == 1:
        return np.arange(1, horizon + 1)
    return np.unique(np.concatenate(
        [[1], np.arange(thin, horizon + 1, thin), [horizon]]
    ))


def run_experiment(config: ExperimentConfig, threads: int | None = None,
                   trace_path=None, summary_path=None) -> ExperimentResult:
    """Run R replications per agent and aggregate pointwise.

    Summaries (mean and the config's quantile pair across replications)
    are computed on the thinned round grid. If paths are given, raw
    traces go to CSV and the summary to JSON, both written atomically.
    """
    jobs = [
        (config.env, spec, config.horizon, config.master_seed, run)
        for spec in config.agents
        for run in range(config.replications)
    ]
    by_label = {spec.label: [None] * config.replications for spec in config.agents}
    for label, result in _run_jobs(jobs, threads):
        by_label[label][result.run] = result

    traces = {}
    summaries = {}
    ts = thinned_rounds(config.horizon, config.thin)
    q_lo, q_hi = config.quantiles
    for spec in config.agents:
        results = by_label[spec.label]
        regret = np.stack([r.cum_regret for r in results])
        trace = RegretTrace(
            agent=spec.label,
            regret=regret,
            pulls=np.stack([r.pulls for r in results]),
            seconds=np.asarray([r.seconds for r in results]),
        )
        traces[spec.label] = trace
        at = regret[:, ts - 1]
        summaries[spec.label] = AgentSummary(
            t=ts,
            mean=at.mean(axis=0),
            q_lo=np.quantile(at, q_lo, axis=0),
            q_hi=np.quantile(at, q_hi, axis=0),
            runtime_seconds=float(trace.seconds.sum()),
        )
    summary = ExperimentSummary(agents=summaries, quantiles=config.quantiles)

    if trace_path is not None:
        write_trace_csv(trace_path, traces, config.horizon, config.thin,
                        order=[s.label for s in config.agents])
    if summary_path is not None:
        write_summary_json(summary_path, summary)
    return ExperimentResult(summary=summary, traces=traces)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def _atomic_write(path, write_body):
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "w", newline="") as fh:
            write_body(fh)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_trace_csv(path, traces: dict, horizon: int, thin: int = 1,
                    order: Sequence[str] | None = None):
    """Raw traces as `agent,run,t,cum_regret` rows on the thinned grid."""
    ts = thinned_rounds(horizon, thin)

    def body(fh):
        writer = csv.writer(fh)
        writer.writerow(["agent", "run", "t", "cum_regret"])
        for label in order if order is not None else sorted(traces):
            trace = traces[label]
            for run in range(trace.regret.shape[0]):
                row = trace.regret[run]
                for t in ts:
                    writer.writerow([label, run, int(t), f"{row[t - 1]:.12g}"])

    _atomic_write(path, body)


def write_summary_json(path, summary: ExperimentSummary):
    payload = {
        label: {
            "t": s.t.tolist(),
            "mean": s.mean.tolist(),
            "q_lo": s.q_lo.tolist(),
            "q_hi": s.q_hi.tolist(),
            "runtime_seconds": s.runtime_seconds,
        }
        for label, s in summary.agents.items()
    }

    def body(fh):
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")

    _atomic_write(path, body)


def read_summary_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# Theoretical bound and the Bayesian-regret check
# ---------------------------------------------------------------------------

def regret_bound(sigma: float, n_arms: int, horizon: int) -> float:
    """Information-theoretic Bayesian regret bound sigma*sqrt(2*K*ln(K)*T)."""
    if sigma <= 0 or n_arms < 1 or horizon < 1:
        raise ValueError("need sigma > 0, n_arms >= 1, horizon >= 1")
    return sigma * math.sqrt(2.0 * n_arms * math.log(n_arms) * horizon)


@dataclass
class BayesRegretCheck:
    empirical: float
    bound: float
    passed: bool
    per_run: np.ndarray


def _bayes_job(args):
    env_sampler, spec, horizon, master_seed, run = args
    env_rng = replication_rng(master_seed, spec.label + "/env", run)
    env = env_sampler(env_rng)
    result = run_replication(env, spec, horizon, master_seed, run)
    return run, result.cum_regret[-1]


def bayes_regret_check(env_sampler: Callable, spec: AgentSpec, horizon: int,
                       replications: int, master_seed: int, sigma: float,
                       threads: int | None = None) -> BayesRegretCheck:
    """Estimate Bayesian regret against the theoretical bound.

    A fresh environment instance is sampled per replication from
    `env_sampler(rng)` (the declared prior over instances); the empirical
    Bayesian regret is the mean final cumulative regret, and the check
    passes iff it is at most regret_bound(sigma, K, T).
    """
    jobs = [
        (env_sampler, spec, horizon, master_seed, run)
        for run in range(replications)
    ]
    finals = np.empty(replications)
    if threads and threads > 1:
        chunk = max(1, len(jobs) // (threads * 4))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for run, final in pool.map(_bayes_job, jobs, chunksize=chunk):
                finals[run] = final
    else:
        for job in jobs:
            run, final = _bayes_job(job)
            finals[run] = final
    probe_env = env_sampler(replication_rng(master_seed, spec.label + "/env", 0))
    bound = regret_bound(sigma, probe_env.k, horizon)
    empirical = float(finals.mean())
    return BayesRegretCheck(empirical, bound, empirical <= bound, finals)
