"""Plain-text key=value experiment configs.

Grammar: one `key = value` per line, `#` starts a comment line, blank
lines ignored. Unknown or duplicate keys are rejected by name with the
line number. The full schema (keys, types, defaults) is documented in the
README; defaults follow the package-wide hyperparameters (alpha 2,
truncation 100, Beta(1,1) base).
"""

from dataclasses import dataclass, field

from .dp import BaseMeasure, BetaDist, EmpiricalAtoms, GaussianDist, UniformDist
from .envs import BanditEnv, Bernoulli, EmpiricalArm, load_reward_pool, make_standard_env
from .harness import AgentSpec, replication_rng


class ConfigError(Exception):
    """Invalid config file or CLI usage; maps to exit code 1."""


STANDARD_ENVS = ("bernoulli6", "beta6", "gauss7", "cropyield7")
AGENT_KINDS = ("dpps", "npts", "beta_ts", "generalized_ts", "ucb")

_TOP_KEYS = {
    "env", "agents", "horizon", "replications", "seed", "quantiles",
    "thin", "trace", "summary",
}


@dataclass
class RunConfig:
    """Parsed experiment description (environment still unbuilt)."""

    env_spec: str
    agents: list
    horizon: int = 10000
    replications: int = 200
    seed: int = 0
    quantiles: tuple = (0.10, 0.90)
    thin: int = 1
    trace_name: str = "trace.csv"
    summary_name: str = "summary.json"


def parse_base_measure(spec: str) -> BaseMeasure:
    """Parse `beta:a,b`, `gauss:mu,sigma`, `uniform:lo,hi`,
    or `empirical:<path>`."""
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "beta":
            a, b = (float(x) for x in rest.split(","))
            return BetaDist(a, b)
        if kind == "gauss":
            mu, sigma = (float(x) for x in rest.split(","))
            return GaussianDist(mu, sigma)
        if kind == "uniform":
            lo, hi = (float(x) for x in rest.split(","))
            return UniformDist(lo, hi)
        if kind == "empirical":
            return EmpiricalAtoms(load_reward_pool(rest.strip()))
    except ConfigError:
        raise
    except (ValueError, OSError) as exc:
        raise ConfigError(f"bad base measure {spec!r}: {exc}") from None
    raise ConfigError(f"unknown base measure kind in {spec!r}")


def _parse_float_list(value: str) -> list[float]:
    try:
        return [float(x) for x in value.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {value!r}") from None


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{source}: line {lineno}: expected 'key = value'")
        key = key.strip()
        value = value.strip()
        if key in entries:
            raise ConfigError(f"{source}: line {lineno}: duplicate key {key!r}")
        entries[key] = (value, lineno)

    def fail(key, message):
        lineno = entries[key][1]
        raise ConfigError(f"{source}: line {lineno}: key {key!r}: {message}")

    def take(key, default=None):
        if key in entries:
            return entries.pop(key)[0]
        return default

    env_spec = take("env")
    if env_spec is None:
        raise ConfigError(f"{source}: missing required key 'env'")
    agents_value = take("agents")
    if agents_value is None:
        raise ConfigError(f"{source}: missing required key 'agents'")
    agent_kinds = [a.strip() for a in agents_value.split(",") if a.strip()]
    for kind in agent_kinds:
        if kind not in AGENT_KINDS:
            raise ConfigError(
                f"{source}: unknown agent {kind!r} (choose from {', '.join(AGENT_KINDS)})"
            )
    if len(set(agent_kinds)) != len(agent_kinds):
        raise ConfigError(f"{source}: agents listed more than once")

    cfg = RunConfig(env_spec=env_spec, agents=[])

    def take_int(key, default, minimum=1):
        raw = take(key)
        if raw is None:
            return default
        try:
            value = int(raw)
        except ValueError:
            fail(key, f"expected an integer, got {raw!r}")
        if value < minimum:
            fail(key, f"must be >= {minimum}")
        return value

    cfg.horizon = take_int("horizon", cfg.horizon)
    cfg.replications = take_int("replications", cfg.replications)
    cfg.seed = take_int("seed", cfg.seed, minimum=0)
    cfg.thin = take_int("thin", cfg.thin)
    quantiles_raw = take("quantiles")
    if quantiles_raw is not None:
        parts = _parse_float_list(quantiles_raw)
        if len(parts) != 2 or not 0.0 < parts[0] < parts[1] < 1.0:
            fail("quantiles", "expected two increasing values in (0, 1)")
        cfg.quantiles = (parts[0], parts[1])
    cfg.trace_name = take("trace", cfg.trace_name)
    cfg.summary_name = take("summary", cfg.summary_name)

    # agent-scoped keys: <kind>.<param>
    agent_params = {kind: {} for kind in agent_kinds}
    for key in list(entries):
        kind, dot, param = key.partition(".")
        if not dot:
            raise ConfigError(f"{source}: unknown config key {key!r}")
        if kind not in AGENT_KINDS:
            raise ConfigError(f"{source}: unknown config key {key!r}")
        if kind not in agent_params:
            fail(key, f"agent {kind!r} is not listed in 'agents'")
        value = entries.pop(key)[0]
        params = agent_params[kind]
        if kind == "dpps":
            if param == "alpha":
                params["alpha"] = float(value)
            elif param == "truncation":
                params["truncation"] = int(value)
            elif param == "base":
                params["base"] = parse_base_measure(value)
            elif param.startswith("base."):
                arm = _arm_index(param, source, key)
                params.setdefault("arm_bases", {})[arm] = parse_base_measure(value)
            elif param.startswith("alpha."):
                arm = _arm_index(param, source, key)
                params.setdefault("arm_alphas", {})[arm] = float(value)
            elif param.startswith("truncation."):
                arm = _arm_index(param, source, key)
                params.setdefault("arm_truncations", {})[arm] = int(value)
            else:
                raise ConfigError(f"{source}: unknown config key {key!r}")
        elif kind == "npts":
            if param == "pseudo":
                params["_pseudo_default"] = _parse_float_list(value)
            elif param.startswith("pseudo."):
                arm = _arm_index(param, source, key)
                params.setdefault("_pseudo_arms", {})[arm] = _parse_float_list(value)
            else:
                raise ConfigError(f"{source}: unknown config key {key!r}")
        elif kind == "ucb":
            if param == "c":
                params["c"] = float(value)
            else:
                raise ConfigError(f"{source}: unknown config key {key!r}")
        else:
            raise ConfigError(f"{source}: unknown config key {key!r}")

    if entries:
        leftover = sorted(entries)[0]
        raise ConfigError(f"{source}: unknown config key {leftover!r}")

    cfg.agents = [AgentSpec(kind, kind, agent_params[kind]) for kind in agent_kinds]
    return cfg


def _arm_index(param: str, source: str, key: str) -> int:
    try:
        return int(param.rsplit(".", 1)[1])
    except ValueError:
        raise ConfigError(f"{source}: unknown config key {key!r}") from None


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    return parse_config_text(text, source=str(path))


def build_env(env_spec: str, master_seed: int) -> BanditEnv:
    """Realize the env spec; instance-sampling envs draw from a stream
    derived from the master seed so runs stay reproducible."""
    if env_spec in STANDARD_ENVS:
        return make_standard_env(env_spec, replication_rng(master_seed, "environment", 0))
    kind, sep, rest = env_spec.partition(":")
    if sep and kind.strip() == "bernoulli":
        means = _parse_float_list(rest)
        if not means:
            raise ConfigError("inline bernoulli env needs at least one mean")
        return BanditEnv([Bernoulli(p) for p in means])
    if sep and kind.strip() == "empirical":
        paths = [p.strip() for p in rest.split(",") if p.strip()]
        if not paths:
            raise ConfigError("empirical env needs at least one pool file")
        try:
            return BanditEnv([EmpiricalArm(load_reward_pool(p)) for p in paths])
        except (OSError, ValueError) as exc:
            raise ConfigError(f"failed to load empirical env: {exc}") from None
    raise ConfigError(
        f"unknown env {env_spec!r} (standard: {', '.join(STANDARD_ENVS)}; "
        "inline: bernoulli:<means>, empirical:<files>)"
    )


def resolve_npts_params(params: dict, n_arms: int) -> dict:
    """Turn parsed npts pseudo-reward settings into a per-arm vector list."""
    params = dict(params)
    default = params.pop("_pseudo_default", [1.0])
    arm_overrides = params.pop("_pseudo_arms", {})
    if arm_overrides or default != [1.0]:
        for arm in arm_overrides:
            if not 0 <= arm < n_arms:
                raise ConfigError(f"npts.pseudo.{arm}: arm index out of range")
        vectors = [list(arm_overrides.get(k, default)) for k in range(n_arms)]
        params["pseudo_rewards"] = vectors
    return params


def experiment_agents(cfg: RunConfig, n_arms: int) -> list:
    """Finalize AgentSpecs against the realized environment size."""
    specs = []
    for spec in cfg.agents:
        params = dict(spec.params)
        if spec.kind == "npts":
            params = resolve_npts_params(params, n_arms)
        if spec.kind == "dpps":
            for field in ("arm_bases", "arm_alphas", "arm_truncations"):
                for arm in params.get(field, ()):
                    if not 0 <= arm < n_arms:
                        raise ConfigError(
                            f"dpps per-arm override: arm index {arm} out of range"
                        )
        specs.append(AgentSpec(spec.label, spec.kind, params))
    return specs
