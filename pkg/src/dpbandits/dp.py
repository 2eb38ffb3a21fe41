"""Dirichlet-process random measures and samplers.

A draw from a DP prior or posterior is represented as a finite weighted-atom
measure: truncated stick-breaking for the prior, and the iterative
atom-insertion recursion for the posterior (one Beta-distributed stick per
observation, applied to a truncated prior draw). The noninformative limit of
the posterior sampler is the Bayesian bootstrap, which is also exposed
directly.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

WEIGHT_TOL = 1e-12


# ---------------------------------------------------------------------------
# Base measures
# ---------------------------------------------------------------------------

class BaseMeasure:
    """A sampleable distribution with an exact mean, usable as a DP base."""

    def sample(self, rng: np.random.Generator, size: int | None = None):
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class BetaDist(BaseMeasure):
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("Beta parameters must be positive")

    def sample(self, rng, size=None):
        if self.a == 1.0 and self.b == 1.0:  # uniform fast path
            return rng.random(size)
        return rng.beta(self.a, self.b, size)

    def mean(self):
        return self.a / (self.a + self.b)


@dataclass(frozen=True)
class GaussianDist(BaseMeasure):
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
class UniformDist(BaseMeasure):
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("need lo < hi")

    def sample(self, rng, size=None):
        return rng.uniform(self.lo, self.hi, size)

    def mean(self):
        return 0.5 * (self.lo + self.hi)


@dataclass(frozen=True)
class EmpiricalAtoms(BaseMeasure):
    """Uniform distribution over a fixed finite set of points."""

    points: tuple

    def __init__(self, points: Sequence[float]):
        pts = tuple(float(p) for p in points)
        if not pts:
            raise ValueError("EmpiricalAtoms needs at least one point")
        object.__setattr__(self, "points", pts)

    def sample(self, rng, size=None):
        arr = np.asarray(self.points)
        if size is None:
            return arr[rng.integers(arr.size)]
        return arr[rng.integers(arr.size, size=size)]

    def mean(self):
        return float(np.mean(self.points))


# ---------------------------------------------------------------------------
# DP parameters, measures, per-arm posterior state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DPParams:
    """Concentration, base measure, and truncation level of a DP prior."""

    alpha: float
    base: BaseMeasure
    truncation: int = 100

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.truncation < 1:
            raise ValueError("truncation must be >= 1")


@dataclass
class RandomMeasure:
    """A finite weighted-atom probability measure (parallel arrays)."""

    weights: np.ndarray
    locations: np.ndarray

    def validate(self, tol: float = WEIGHT_TOL):
        if self.weights.shape != self.locations.shape:
            raise ValueError("weights/locations length mismatch")
        if np.any(self.weights < 0):
            raise ValueError("negative atom weight")
        if abs(self.weights.sum() - 1.0) > tol:
            raise ValueError("weights do not sum to 1")
        return self


class DPArmState:
    """DP posterior state for one reward stream: frozen prior + raw data.

    The posterior DP(alpha + n, (n*Fn + alpha*F0)/(alpha + n)) is represented
    implicitly by the prior parameters plus the ordered observations; the
    base measure is never mutated.
    """

    __slots__ = ("params", "_buf", "_n")

    def __init__(self, params: DPParams, observations: Sequence[float] = ()):
        self.params = params
        self._buf = np.empty(max(16, len(observations)), dtype=float)
        self._n = len(observations)
        if self._n:
            self._buf[: self._n] = observations

    @property
    def n(self) -> int:
        return self._n

    @property
    def observations(self) -> np.ndarray:
        return self._buf[: self._n]

    def append(self, x: float):
        if self._n == self._buf.size:
            grown = np.empty(self._buf.size * 2, dtype=float)
            grown[: self._n] = self._buf
            self._buf = grown
        self._buf[self._n] = x
        self._n += 1


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

def beta1(b, rng: np.random.Generator, size: int | None = None):
    """Sample Beta(1, b) by inverse CDF: 1 - U^(1/b). Vectorized over b.

    Exact in the b -> 0 limit (U^(1/b) underflows to 0, giving the correct
    degenerate draw at 1).
    """
    b = np.asarray(b, dtype=float)
    if size is None and b.ndim > 0:
        size = b.shape
    u = rng.random(size)
    if isinstance(u, np.ndarray):
        np.power(u, 1.0 / b, out=u)
        np.subtract(1.0, u, out=u)
        return u
    return 1.0 - u ** (1.0 / b)


def _close_simplex(w: np.ndarray) -> np.ndarray:
    # Long stick products can leave |sum - 1| above tolerance; the last
    # weight absorbs the residual.
    resid = 1.0 - w.sum()
    if abs(resid) > WEIGHT_TOL:
        w[-1] += resid
    return w


def stick_breaking_prior(params: DPParams, rng: np.random.Generator) -> RandomMeasure:
    """Draw a truncated stick-breaking measure from DP(alpha, base).

    The first N-1 weights are V_i * prod_{j<i}(1 - V_j) with
    V_i ~ Beta(1, alpha); the last weight is the residual product
    prod_{j<N}(1 - V_j), so the weights sum to 1 by construction.
    """
    n_atoms = params.truncation
    v = beta1(params.alpha, rng, n_atoms)
    v[-1] = 1.0  # residual atom takes all remaining stick
    w = np.empty(n_atoms)
    w[0] = v[0]
    if n_atoms > 1:
        w[1:] = v[1:] * (1.0 - v[:-1]).cumprod()
    locs = np.asarray(params.base.sample(rng, n_atoms), dtype=float)
    return RandomMeasure(_close_simplex(w), locs)


def posterior_draw(state: DPArmState, rng: np.random.Generator) -> RandomMeasure:
    """Draw one random measure from the DP posterior of `state`.

    Starts from a fresh truncated prior draw Q0 and inserts the n
    observations one at a time: absorbing the i-th observation into a
    posterior with pre-update concentration alpha + i - 1 uses a stick
    V_i ~ Beta(1, alpha + i - 1), giving observation atoms with weights
    V_i * prod_{j>i}(1 - V_j) and the prior atoms scaled by
    prod_i(1 - V_i). Fresh sticks are drawn on every call, so draws are
    iid given disjoint rng streams; cost is O(n + truncation).
    """
    prior = stick_breaking_prior(state.params, rng)
    n = state.n
    if n == 0:
        return prior
    obs = state.observations
    conc = state.params.alpha + np.arange(n)
    v = beta1(conc, rng)
    # suffix[i] = prod_{j >= i}(1 - v_j); suffix[0] scales the prior part
    suffix = (1.0 - v)[::-1].cumprod()[::-1]
    n_prior = prior.weights.size
    w = np.empty(n + n_prior)
    w[: n - 1] = v[: n - 1] * suffix[1:]
    w[n - 1] = v[n - 1]
    w[n:] = suffix[0] * prior.weights
    locs = np.empty(n + n_prior)
    locs[:n] = obs
    locs[n:] = prior.locations
    return RandomMeasure(_close_simplex(w), locs)


def bayesian_bootstrap_draw(observations, rng: np.random.Generator) -> RandomMeasure:
    """Dirichlet(1,...,1)-weighted measure over the observed atoms.

    Weights are normalized iid standard exponentials (equivalent to a flat
    Dirichlet and branch-free).
    """
    obs = np.asarray(observations, dtype=float)
    if obs.size == 0:
        raise ValueError("bootstrap requires data")
    e = rng.standard_exponential(obs.size)
    return RandomMeasure(e / e.sum(), obs.copy())


# ---------------------------------------------------------------------------
# Measure statistics
# ---------------------------------------------------------------------------

def measure_mean(m: RandomMeasure) -> float:
    """Mean of a finite atom measure: the weight/location dot product."""
    return float(np.dot(m.weights, m.locations))


def measure_cdf(m: RandomMeasure, grid) -> np.ndarray:
    """Evaluate the measure's CDF at each grid point."""
    order = np.argsort(m.locations, kind="stable")
    locs = m.locations[order]
    cum = np.cumsum(m.weights[order])
    idx = np.searchsorted(locs, np.asarray(grid, dtype=float), side="right")
    out = np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)
    return np.clip(out, 0.0, 1.0)


def expected_truncation_tail(alpha: float, r: float, n_atoms: int) -> tuple[float, float]:
    """Expected neglected tail mass of an N-atom truncation.

    Returns (E[T_N], E[U_N]) where T_N = (sum_{i>=N} q_i)^r and
    U_N = sum_{i>=N} q_i^r for the infinite stick-breaking weights:
    E[T_N] = (alpha/(alpha+r))^(N-1) and
    E[U_N] = E[T_N] * Gamma(r)Gamma(alpha+1)/Gamma(alpha+r).
    """
    if alpha <= 0 or r <= 0 or n_atoms < 1:
        raise ValueError("alpha, r must be positive and n_atoms >= 1")
    e_tn = (alpha / (alpha + r)) ** (n_atoms - 1)
    e_un = e_tn * float(np.exp(gammaln(r) + gammaln(alpha + 1.0) - gammaln(alpha + r)))
    return e_tn, e_un


def posterior_cdf_draws(observations, params: DPParams, n_draws: int, grid,
                        rng: np.random.Generator) -> np.ndarray:
    """CDFs of `n_draws` posterior measures on `grid`, one row per draw."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    if np.any(np.diff(grid) < 0):
        raise ValueError("grid must be sorted ascending")
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1")
    state = DPArmState(params, observations)
    out = np.empty((n_draws, grid.size))
    for i in range(n_draws):
        out[i] = measure_cdf(posterior_draw(state, rng), grid)
    return out


def posterior_cdf_envelope(observations, params: DPParams, n_draws: int, grid,
                           quantiles: tuple[float, float],
                           rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise CDF quantile band across posterior draws.

    Returns (lower, upper) arrays over the grid; each is a pointwise
    quantile of the sampled CDFs, hence monotone along the grid and
    contained in [0, 1].
    """
    q_lo, q_hi = quantiles
    if not (0.0 < q_lo < q_hi < 1.0):
        raise ValueError("quantiles must satisfy 0 < lower < upper < 1")
    cdfs = posterior_cdf_draws(observations, params, n_draws, grid, rng)
    lower = np.quantile(cdfs, q_lo, axis=0)
    upper = np.quantile(cdfs, q_hi, axis=0)
    return lower, upper
