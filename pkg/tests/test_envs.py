"""Environment sampling against analytic means and the regret oracle."""

import numpy as np
import pytest

from dpbandits.envs import (
    BERNOULLI6_MEANS,
    CROPYIELD7_TABLE,
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
from dpbandits.dp import BetaDist


def make_rng(seed):
    return np.random.default_rng(seed)


def test_degenerate_bernoulli_always_one():
    env = BanditEnv([Bernoulli(1.0)])
    rng = make_rng(0)
    assert all(env.sample_reward(0, rng) == 1.0 for _ in range(200))


def test_scaled_beta_matches_target_mean():
    # ScaledBeta(0.4, 5) is Beta(2, 3)
    arm = ScaledBeta(0.4, 5.0)
    x = arm.sample(make_rng(1), 100_000)
    se = x.std(ddof=1) / np.sqrt(x.size)
    assert abs(x.mean() - 0.4) < 3 * se


def test_empirical_arm_replays_pool_values():
    arm = EmpiricalArm([0.0, 1.0])
    x = arm.sample(make_rng(2), 2000)
    assert set(np.unique(x)) <= {0.0, 1.0}
    assert arm.mean() == 0.5


def test_point_mass_and_mixture_mean():
    arm = MixtureArm([(0.25, PointMass(0.0)), (0.75, BetaDist(2.0, 2.0))])
    assert arm.mean() == pytest.approx(0.75 * 0.5, abs=1e-15)


def test_mixture_weight_validation():
    with pytest.raises(ValueError):
        MixtureArm([(0.5, PointMass(0.0)), (0.4, BetaDist(1, 1))])
    with pytest.raises(ValueError):
        Bernoulli(1.2)
    with pytest.raises(ValueError):
        ScaledBeta(0.0, 5.0)
    with pytest.raises(ValueError):
        ScaledBeta(0.5, 0.0)
    with pytest.raises(ValueError):
        EmpiricalArm([])


def test_instant_regret_oracle():
    env = make_standard_env("bernoulli6")
    assert env.instant_regret(5) == 0.0
    assert env.instant_regret(0) == pytest.approx(0.25, abs=1e-15)
    genv = make_standard_env("gauss7", make_rng(3))
    mu = genv.true_means
    for k in range(genv.k):
        assert genv.instant_regret(k) == pytest.approx(mu.max() - mu[k], abs=1e-15)
        assert genv.instant_regret(k) >= 0.0


def test_arm_index_out_of_range():
    env = make_standard_env("bernoulli6")
    with pytest.raises(IndexError):
        env.sample_reward(6, make_rng(4))
    with pytest.raises(IndexError):
        env.instant_regret(-1)


def test_standard_env_factories():
    env = make_standard_env("bernoulli6")
    assert env.k == 6
    assert np.array_equal(env.true_means, BERNOULLI6_MEANS)
    beta = make_standard_env("beta6")
    assert np.allclose(beta.true_means, BERNOULLI6_MEANS)
    assert all(a.s == 5.0 for a in beta.arms)
    crop = make_standard_env("cropyield7")
    assert crop.k == 7
    assert int(np.argmax(crop.true_means)) == 2  # third arm is the best
    with pytest.raises(ValueError):
        make_standard_env("nope")
    with pytest.raises(ValueError):
        make_standard_env("gauss7")  # needs an rng


def test_gauss7_reproducible_from_seed():
    a = make_standard_env("gauss7", make_rng(5))
    b = make_standard_env("gauss7", make_rng(5))
    assert np.array_equal(a.true_means, b.true_means)
    assert np.array_equal([x.sigma for x in a.arms], [x.sigma for x in b.arms])


@pytest.mark.parametrize("name", ["bernoulli6", "beta6", "cropyield7", "gauss7"])
def test_sample_mean_consistency(name):
    # every arm's empirical mean over 1e5 draws within 4 SE of true mean
    env = make_standard_env(name, make_rng(6))
    rng = make_rng(7)
    for k, arm in enumerate(env.arms):
        x = np.asarray(arm.sample(rng, 100_000), dtype=float)
        se = x.std(ddof=1) / np.sqrt(x.size)
        assert abs(x.mean() - env.true_means[k]) < 4 * se, (name, k)
        if name != "gauss7":
            assert x.min() >= 0.0 and x.max() <= 1.0


def test_cropyield_zero_spike_mass():
    env = make_standard_env("cropyield7")
    rng = make_rng(8)
    for k, row in enumerate(CROPYIELD7_TABLE):
        w0 = row[0][0]
        x = env.arms[k].sample(rng, 100_000)
        freq = np.mean(x == 0.0)
        se = np.sqrt(w0 * (1 - w0) / x.size)
        assert abs(freq - w0) < 4 * se, k


def test_load_reward_pool(tmp_path):
    path = tmp_path / "pool.txt"
    path.write_text("0.5\n\n  1.25 \n-3e-1\n")
    assert load_reward_pool(path) == [0.5, 1.25, -0.3]


def test_load_reward_pool_reports_bad_line(tmp_path):
    path = tmp_path / "pool.txt"
    path.write_text("0.1\n0.2\nbogus\n0.4\n")
    with pytest.raises(ValueError, match="line 3"):
        load_reward_pool(path)


def test_envs_are_reusable_across_streams():
    env = make_standard_env("cropyield7")
    a = [env.sample_reward(2, make_rng(9)) for _ in range(5)]
    b = [env.sample_reward(2, make_rng(9)) for _ in range(5)]
    assert a == b
