"""Arm-selection policies.

All agents share one interface: `select(rng) -> arm` (a pure function of
the agent's state and the rng stream) and `update(arm, reward, rng=None)`.
One agent instance serves one replication; nothing is shared across runs.
"""

from typing import Sequence

import numpy as np

from .dp import (
    BetaDist,
    DPArmState,
    DPParams,
    bayesian_bootstrap_draw,
    measure_mean,
    posterior_draw,
)


def argmax_random_tiebreak(scores, rng) -> int:
    """Index of the max score; exact ties broken uniformly at random."""
    scores = np.asarray(scores)
    best = np.flatnonzero(scores == scores.max())
    if best.size == 1:
        return int(best[0])
    return int(best[rng.integers(best.size)])


class Agent:
    """Base policy: per-arm statistics plus a round counter."""

    def __init__(self, n_arms: int):
        if n_arms < 1:
            raise ValueError("need at least one arm")
        self.n_arms = n_arms
        self.t = 0

    def select(self, rng) -> int:
        raise NotImplementedError

    def update(self, arm: int, reward: float, rng=None):
        raise NotImplementedError


class _RewardList:
    """Append-only float buffer exposing a contiguous view."""

    __slots__ = ("_buf", "_n")

    def __init__(self, init: Sequence[float] = ()):
        self._buf = np.empty(max(16, len(init)), dtype=float)
        self._n = len(init)
        if self._n:
            self._buf[: self._n] = init

    def append(self, x: float):
        if self._n == self._buf.size:
            grown = np.empty(self._buf.size * 2, dtype=float)
            grown[: self._n] = self._buf
            self._buf = grown
        self._buf[self._n] = x
        self._n += 1

    @property
    def values(self) -> np.ndarray:
        return self._buf[: self._n]

    def __len__(self):
        return self._n


class DPPSAgent(Agent):
    """Probability matching with per-arm Dirichlet-process posteriors.

    Every round, one random measure is drawn from each arm's DP posterior
    (all arms, including unpulled ones) and the arm with the largest
    measure mean is played. Updating appends the reward to the arm's
    observation list, which advances the implicit conjugate posterior.

    `params` may be a single DPParams shared by all arms or one per arm,
    which is how an informative base measure is placed on a specific arm.
    """

    def __init__(self, n_arms: int, params: DPParams | Sequence[DPParams]):
        super().__init__(n_arms)
        if isinstance(params, DPParams):
            per_arm = [params] * n_arms
        else:
            per_arm = list(params)
            if len(per_arm) != n_arms:
                raise ValueError("need one DPParams per arm")
        self.arm_states = [DPArmState(p) for p in per_arm]

    def select(self, rng) -> int:
        scores = [measure_mean(posterior_draw(s, rng)) for s in self.arm_states]
        return argmax_random_tiebreak(scores, rng)

    def update(self, arm, reward, rng=None):
        self.arm_states[arm].append(float(reward))
        self.t += 1


class NPTSAgent(Agent):
    """Nonparametric Thompson sampling: Dirichlet-weighted reward averages.

    Each arm starts with its pseudo-reward atoms (default a single 1.0,
    which makes every arm optimistic until pulled); a round scores each
    arm by the mean of a Bayesian-bootstrap draw over its atoms.
    """

    def __init__(self, n_arms: int, pseudo_rewards: float | Sequence = 1.0):
        super().__init__(n_arms)
        if np.isscalar(pseudo_rewards):
            init = [[float(pseudo_rewards)]] * n_arms
        else:
            init = [list(np.atleast_1d(p)) for p in pseudo_rewards]
            if len(init) != n_arms:
                raise ValueError("need one pseudo-reward vector per arm")
            if any(len(p) == 0 for p in init):
                raise ValueError("each arm needs at least one pseudo-reward")
        self.rewards = [_RewardList(p) for p in init]

    def select(self, rng) -> int:
        scores = [
            measure_mean(bayesian_bootstrap_draw(r.values, rng))
            for r in self.rewards
        ]
        return argmax_random_tiebreak(scores, rng)

    def update(self, arm, reward, rng=None):
        self.rewards[arm].append(float(reward))
        self.t += 1


class BetaTSAgent(Agent):
    """Beta/Bernoulli Thompson sampling with a Beta(1,1) prior per arm."""

    def __init__(self, n_arms: int):
        super().__init__(n_arms)
        self.successes = np.zeros(n_arms)
        self.failures = np.zeros(n_arms)

    def select(self, rng) -> int:
        theta = rng.beta(1.0 + self.successes, 1.0 + self.failures)
        return argmax_random_tiebreak(theta, rng)

    def update(self, arm, reward, rng=None):
        if reward == 1.0:
            self.successes[arm] += 1
        elif reward == 0.0:
            self.failures[arm] += 1
        else:
            raise ValueError(
                "Beta/Bernoulli TS needs rewards in {0, 1}; "
                "use GeneralizedTSAgent for rewards in [0, 1]"
            )
        self.t += 1


class GeneralizedTSAgent(BetaTSAgent):
    """Beta/Bernoulli TS for [0,1] rewards via a per-round Bernoulli trial.

    A reward r feeds a Bernoulli(r) trial whose outcome drives the usual
    Beta update; selection is identical to BetaTSAgent. Exact 0/1 rewards
    skip the trial, so behavior (and rng use) matches BetaTSAgent on
    binary data.
    """

    def update(self, arm, reward, rng=None):
        if not 0.0 <= reward <= 1.0:
            raise ValueError("generalized TS needs rewards in [0, 1]")
        if 0.0 < reward < 1.0:
            if rng is None:
                raise ValueError("generalized TS update needs an rng for the trial")
            reward = 1.0 if rng.random() < reward else 0.0
        super().update(arm, reward, rng)


class UCB1Agent(Agent):
    """UCB1: pull each arm once, then argmax of mean + c*sqrt(2 ln t / n)."""

    def __init__(self, n_arms: int, c: float = 1.0):
        super().__init__(n_arms)
        self.c = float(c)
        self.counts = np.zeros(n_arms, dtype=int)
        self.sums = np.zeros(n_arms)

    def select(self, rng) -> int:
        unpulled = np.flatnonzero(self.counts == 0)
        if unpulled.size:
            return int(unpulled[0])
        means = self.sums / self.counts
        bonus = self.c * np.sqrt(2.0 * np.log(self.t) / self.counts)
        return argmax_random_tiebreak(means + bonus, rng)

    def update(self, arm, reward, rng=None):
        self.counts[arm] += 1
        self.sums[arm] += float(reward)
        self.t += 1


def uniform_dp_params(alpha: float = 2.0, truncation: int = 100,
                      base=None) -> DPParams:
    """Appendix-style defaults: alpha 2, 100 stick atoms, Beta(1,1) base."""
    return DPParams(alpha, base if base is not None else BetaDist(1.0, 1.0),
                    truncation)


def make_agent(kind: str, n_arms: int, **params) -> Agent:
    """Build an agent by name; used by the experiment config layer."""
    if kind == "dpps":
        alpha = params.pop("alpha", 2.0)
        truncation = params.pop("truncation", 100)
        base = params.pop("base", None)
        arm_bases = params.pop("arm_bases", None) or {}
        arm_alphas = params.pop("arm_alphas", None) or {}
        arm_truncations = params.pop("arm_truncations", None) or {}
        if params:
            raise ValueError(f"unknown dpps parameters: {sorted(params)}")
        shared = uniform_dp_params(alpha, truncation, base)
        if arm_bases or arm_alphas or arm_truncations:
            per_arm = [
                DPParams(
                    arm_alphas.get(k, alpha),
                    arm_bases.get(k, shared.base),
                    arm_truncations.get(k, truncation),
                )
                for k in range(n_arms)
            ]
            return DPPSAgent(n_arms, per_arm)
        return DPPSAgent(n_arms, shared)
    if kind == "npts":
        pseudo = params.pop("pseudo_rewards", 1.0)
        if params:
            raise ValueError(f"unknown npts parameters: {sorted(params)}")
        return NPTSAgent(n_arms, pseudo)
    if kind == "beta_ts":
        if params:
            raise ValueError(f"unknown beta_ts parameters: {sorted(params)}")
        return BetaTSAgent(n_arms)
    if kind == "generalized_ts":
        if params:
            raise ValueError(f"unknown generalized_ts parameters: {sorted(params)}")
        return GeneralizedTSAgent(n_arms)
    if kind == "ucb":
        c = params.pop("c", 1.0)
        if params:
            raise ValueError(f"unknown ucb parameters: {sorted(params)}")
        return UCB1Agent(n_arms, c)
    raise ValueError(f"unknown agent kind: {kind!r}")
