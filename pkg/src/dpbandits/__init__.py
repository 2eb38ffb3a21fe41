"""Dirichlet-process posterior-sampling bandits.

Random-measure samplers (stick-breaking DP priors, conjugate posterior
draws, Bayesian bootstrap), bandit agents (DP posterior sampling,
nonparametric TS, Beta/Bernoulli TS and its generalized variant, UCB1),
stochastic environments with exact means, and a reproducible
regret-experiment harness with a CLI.
"""

from .dp import (
    BaseMeasure,
    BetaDist,
    DPArmState,
    DPParams,
    EmpiricalAtoms,
    GaussianDist,
    RandomMeasure,
    UniformDist,
    bayesian_bootstrap_draw,
    expected_truncation_tail,
    measure_cdf,
    measure_mean,
    posterior_cdf_draws,
    posterior_cdf_envelope,
    posterior_draw,
    stick_breaking_prior,
)
from .envs import (
    BanditEnv,
    Bernoulli,
    EmpiricalArm,
    GaussianArm,
    MixtureArm,
    PointMass,
    ScaledBeta,
    load_reward_pool,
    make_standard_env,
)
from .agents import (
    Agent,
    BetaTSAgent,
    DPPSAgent,
    GeneralizedTSAgent,
    NPTSAgent,
    UCB1Agent,
    argmax_random_tiebreak,
    make_agent,
    uniform_dp_params,
)
from .harness import (
    AgentSpec,
    BayesRegretCheck,
    ExperimentConfig,
    ExperimentSummary,
    RegretTrace,
    bayes_regret_check,
    regret_bound,
    replication_rng,
    run_experiment,
    run_replication,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
