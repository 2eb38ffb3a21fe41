"""K-arm stochastic reward environments with exact ground-truth means.

Every arm distribution exposes `sample(rng, size=None)` and an analytic
`mean()`, so the harness can account regret in expectation (gap of the
pulled arm) instead of realized reward differences.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dp import BetaDist

MIXTURE_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class Bernoulli:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("Bernoulli p must lie in [0, 1]")

    def sample(self, rng, size=None):
        if size is None:
            return 1.0 if rng.random() < self.p else 0.0
        return (rng.random(size) < self.p).astype(float)

    def mean(self):
        return self.p


@dataclass(frozen=True)
class ScaledBeta:
    """Beta arm parameterized by (mean, concentration): Beta(m*s, (1-m)*s)."""

    m: float
    s: float

    def __post_init__(self):
        if not 0.0 < self.m < 1.0:
            raise ValueError("ScaledBeta mean must lie in (0, 1)")
        if self.s <= 0:
            raise ValueError("ScaledBeta concentration must be positive")

    def sample(self, rng, size=None):
        return rng.beta(self.m * self.s, (1.0 - self.m) * self.s, size)

    def mean(self):
        return self.m


@dataclass(frozen=True)
class GaussianArm:
    mu: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    def sample(self, rng, size=None):
        return rng.normal(self.mu, self.sigma, size)

    def mean(self):
        return self.mu


@dataclass(frozen=True)
class PointMass:
    value: float

    def sample(self, rng, size=None):
        if size is None:
            return self.value
        return np.full(size, self.value)

    def mean(self):
        return self.value


class MixtureArm:
    """Finite mixture of Beta / point-mass components."""

    def __init__(self, components: Sequence[tuple]):
        if not components:
            raise ValueError("mixture needs at least one component")
        self.weights = np.asarray([w for w, _ in components], dtype=float)
        self.components = tuple(c for _, c in components)
        if np.any(self.weights < 0):
            raise ValueError("mixture weights must be nonnegative")
        if abs(self.weights.sum() - 1.0) > MIXTURE_WEIGHT_TOL:
            raise ValueError("mixture weights must sum to 1")
        self._cum = np.cumsum(self.weights)

    def sample(self, rng, size=None):
        if size is None:
            idx = int(np.searchsorted(self._cum, rng.random(), side="right"))
            idx = min(idx, len(self.components) - 1)
            return self.components[idx].sample(rng)
        idx = np.minimum(
            np.searchsorted(self._cum, rng.random(size), side="right"),
            len(self.components) - 1,
        )
        out = np.empty(size, dtype=float)
        for j, comp in enumerate(self.components):
            mask = idx == j
            cnt = int(mask.sum())
            if cnt:
                out[mask] = comp.sample(rng, cnt)
        return out

    def mean(self):
        return float(np.dot(self.weights, [c.mean() for c in self.components]))


class EmpiricalArm:
    """Replay arm: draws uniformly with replacement from a fixed pool."""

    def __init__(self, pool: Sequence[float]):
        self.pool = np.asarray(pool, dtype=float)
        if self.pool.size == 0:
            raise ValueError("empirical arm needs a nonempty pool")

    def sample(self, rng, size=None):
        if size is None:
            return float(self.pool[rng.integers(self.pool.size)])
        return self.pool[rng.integers(self.pool.size, size=size)]

    def mean(self):
        return float(self.pool.mean())


class BanditEnv:
    """Immutable K-arm environment; sampling takes an explicit rng."""

    def __init__(self, arms: Sequence):
        if not arms:
            raise ValueError("environment needs at least one arm")
        self.arms = tuple(arms)
        self.true_means = np.asarray([a.mean() for a in self.arms], dtype=float)
        self.optimal_mean = float(self.true_means.max())
        self.gaps = self.optimal_mean - self.true_means

    @property
    def k(self) -> int:
        return len(self.arms)

    def sample_reward(self, arm: int, rng) -> float:
        if not 0 <= arm < self.k:
            raise IndexError(f"arm {arm} out of range for K={self.k}")
        return float(self.arms[arm].sample(rng))

    def instant_regret(self, arm: int) -> float:
        if not 0 <= arm < self.k:
            raise IndexError(f"arm {arm} out of range for K={self.k}")
        return float(self.gaps[arm])


BERNOULLI6_MEANS = [0.3, 0.4, 0.45, 0.5, 0.52, 0.55]

# Synthetic stand-in for simulated crop-yield rewards: each arm mixes a
# point mass at zero (failed-harvest years) with 2-3 right-skewed Beta
# bumps; arm 2 is the best planting choice. Parameters are fixed and
# documented in the README.
CROPYIELD7_TABLE = [
    [(0.26, PointMass(0.0)), (0.4400, BetaDist(3.0, 9.0)), (0.3000, BetaDist(9.0, 6.0))],
    [(0.20, PointMass(0.0)), (0.4865, BetaDist(3.0, 8.5)), (0.3135, BetaDist(9.0, 6.0))],
    [(0.13, PointMass(0.0)), (0.5031, BetaDist(3.2, 8.5)), (0.3669, BetaDist(11.0, 6.0))],
    [(0.18, PointMass(0.0)), (0.4779, BetaDist(3.0, 8.0)), (0.3421, BetaDist(9.5, 6.0))],
    [(0.22, PointMass(0.0)), (0.4250, BetaDist(2.9, 8.5)), (0.3550, BetaDist(10.0, 6.0))],
    [(0.15, PointMass(0.0)), (0.5152, BetaDist(3.4, 8.5)), (0.3348, BetaDist(9.0, 5.5))],
    [(0.16, PointMass(0.0)), (0.4798, BetaDist(3.2, 8.5)), (0.3602, BetaDist(9.5, 6.0))],
]


def make_standard_env(name: str, rng=None) -> BanditEnv:
    """Build one of the bundled benchmark environments.

    "bernoulli6" and "beta6" share the means [0.3, 0.4, 0.45, 0.5, 0.52,
    0.55] (beta6 with concentration 5); "gauss7" samples means and sds
    from N(0, 0.5) via the supplied rng; "cropyield7" uses the fixed
    mixture table above.
    """
    if name == "bernoulli6":
        return BanditEnv([Bernoulli(p) for p in BERNOULLI6_MEANS])
    if name == "beta6":
        return BanditEnv([ScaledBeta(m, 5.0) for m in BERNOULLI6_MEANS])
    if name == "gauss7":
        if rng is None:
            raise ValueError("gauss7 requires an rng to sample the instance")
        mus = rng.normal(0.0, 0.5, 7)
        sigmas = np.abs(rng.normal(0.0, 0.5, 7))
        return BanditEnv([GaussianArm(m, s) for m, s in zip(mus, sigmas)])
    if name == "cropyield7":
        return BanditEnv([MixtureArm(row) for row in CROPYIELD7_TABLE])
    raise ValueError(f"unknown environment name: {name!r}")


def load_reward_pool(path) -> list[float]:
    """Read one reward per line; blank lines ignored, bad lines rejected."""
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: not a number: {text!r}"
                ) from None
    return values
