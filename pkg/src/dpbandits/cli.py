"""Command-line front end.

Subcommands: `run` (experiment from a config file, writes trace CSV +
summary JSON), `plot` (summary JSON -> SVG), `diagnose` (stick-breaking
truncation diagnostic), `density` (DP posterior CDF envelope over a data
file). Exit codes: 0 success, 1 usage/config error, 2 runtime failure.
"""

import argparse
import os
import sys

import numpy as np

from .config import (
    ConfigError,
    build_env,
    experiment_agents,
    load_config,
    parse_base_measure,
)
from .dp import (
    BetaDist,
    DPParams,
    EmpiricalAtoms,
    GaussianDist,
    UniformDist,
    expected_truncation_tail,
    posterior_cdf_draws,
    stick_breaking_prior,
)
from .envs import load_reward_pool
from .harness import (
    ExperimentConfig,
    read_summary_json,
    replication_rng,
    run_experiment,
    _atomic_write,
)
from .plotting import render_cdf_band_figure, render_regret_figure, save_svg

DIAG_WEIGHT_THRESHOLD = 1e-10


class _Parser(argparse.ArgumentParser):
    # usage problems must exit 1, not argparse's default 2
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dpbandits", description=__doc__)
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="override the master seed")
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes for replications (default serial)")
    common.add_argument("--out-dir", default=".",
                        help="directory for output files")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_run = sub.add_parser("run", parents=[common],
                           help="run an experiment described by a config file")
    p_run.add_argument("config", help="path to a key=value config file")
    p_run.set_defaults(func=cmd_run)

    p_plot = sub.add_parser("plot", parents=[common],
                            help="render a summary JSON as an SVG regret figure")
    p_plot.add_argument("summary", help="summary JSON written by `run`")
    p_plot.add_argument("out", help="output SVG path")
    p_plot.set_defaults(func=cmd_plot)

    p_diag = sub.add_parser("diagnose", parents=[common],
                            help="stick-breaking weight/truncation diagnostic")
    p_diag.add_argument("--alpha", type=float, default=2.0)
    p_diag.add_argument("--truncation", type=int, default=100)
    p_diag.set_defaults(func=cmd_diagnose)

    p_dens = sub.add_parser("density", parents=[common],
                            help="DP posterior CDF envelope for a data file")
    p_dens.add_argument("data", help="one value per line; may be empty")
    p_dens.add_argument("--alpha", type=float, default=2.0)
    p_dens.add_argument("--base", default="beta:1,1",
                        help="base measure spec (beta:a,b | gauss:mu,sigma | "
                             "uniform:lo,hi | empirical:path)")
    p_dens.add_argument("--truncation", type=int, default=100)
    p_dens.add_argument("--draws", type=int, default=200)
    p_dens.add_argument("--grid-points", type=int, default=201)
    p_dens.add_argument("--quantiles", default="0.1,0.9")
    p_dens.add_argument("--out-csv", default="density.csv")
    p_dens.add_argument("--out-svg", default=None)
    p_dens.set_defaults(func=cmd_density)
    return parser


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    seed = args.seed if args.seed is not None else cfg.seed
    env = build_env(cfg.env_spec, seed)
    specs = experiment_agents(cfg, env.k)
    experiment = ExperimentConfig(
        env=env,
        agents=specs,
        horizon=cfg.horizon,
        replications=cfg.replications,
        master_seed=seed,
        quantiles=cfg.quantiles,
        thin=cfg.thin,
    )
    os.makedirs(args.out_dir, exist_ok=True)
    trace_path = os.path.join(args.out_dir, cfg.trace_name)
    summary_path = os.path.join(args.out_dir, cfg.summary_name)
    result = run_experiment(experiment, threads=args.threads,
                            trace_path=trace_path, summary_path=summary_path)
    print(f"wrote {trace_path}")
    print(f"wrote {summary_path}")
    for label, s in result.summary.agents.items():
        print(f"{label}: final mean regret {s.mean[-1]:.3f} "
              f"(runtime {s.runtime_seconds:.1f}s)")
    return 0


def cmd_plot(args) -> int:
    summary = read_summary_json(args.summary)
    if not isinstance(summary, dict) or not summary:
        raise ConfigError(f"{args.summary}: not a summary JSON object")
    for label, s in summary.items():
        if not isinstance(s, dict) or not {"t", "mean", "q_lo", "q_hi"} <= set(s):
            raise ConfigError(f"{args.summary}: agent {label!r} missing summary fields")
    fig = render_regret_figure(summary)
    save_svg(fig, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_diagnose(args) -> int:
    if args.alpha <= 0 or args.truncation < 1:
        raise ConfigError("need alpha > 0 and truncation >= 1")
    seed = args.seed if args.seed is not None else 0
    rng = replication_rng(seed, "diagnose", 0)
    params = DPParams(args.alpha, BetaDist(1.0, 1.0), args.truncation)
    draw = stick_breaking_prior(params, rng)
    weights = draw.weights
    e_tn, e_un = expected_truncation_tail(args.alpha, 1.0, args.truncation)

    print(f"stick-breaking diagnostic: alpha={args.alpha:g} "
          f"truncation={args.truncation} seed={seed}")
    shown = min(weights.size, 10)
    print("    i   weight")
    for i in range(shown):
        print(f"  {i + 1:3d}   {weights[i]:.3e}")
    if weights.size > shown:
        print(f"  ... ({weights.size - shown} more atoms)")
    below = int(np.sum(weights < DIAG_WEIGHT_THRESHOLD))
    print(f"sampled weights below {DIAG_WEIGHT_THRESHOLD:g}: {below} of {weights.size}")
    print(f"expected tail mass E[T_N] (r=1): {e_tn:.3e}")
    print(f"expected tail sum  E[U_N] (r=1): {e_un:.3e}")
    if args.truncation == 1:
        print("WARNING: truncation 1 keeps the whole stick in one atom "
              "(expected tail mass 1); increase truncation")
    elif e_tn > DIAG_WEIGHT_THRESHOLD:
        # smallest N with (alpha/(alpha+1))^(N-1) <= threshold
        needed = 1 + int(np.ceil(np.log(DIAG_WEIGHT_THRESHOLD)
                                 / np.log(args.alpha / (args.alpha + 1.0))))
        print(f"WARNING: expected tail mass exceeds {DIAG_WEIGHT_THRESHOLD:g}; "
              f"recommend truncation >= {needed}")
    else:
        print(f"truncation OK: expected tail mass below {DIAG_WEIGHT_THRESHOLD:g}")
    return 0


def cmd_density(args) -> int:
    try:
        data = load_reward_pool(args.data)
    except OSError as exc:
        raise ConfigError(f"cannot read data file: {exc}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    base = parse_base_measure(args.base)
    if args.draws < 1 or args.grid_points < 2:
        raise ConfigError("need draws >= 1 and grid-points >= 2")
    try:
        q_lo, q_hi = (float(x) for x in args.quantiles.split(","))
    except ValueError:
        raise ConfigError(f"bad quantiles {args.quantiles!r}") from None
    if not 0.0 < q_lo < q_hi < 1.0:
        raise ConfigError("quantiles must satisfy 0 < lower < upper < 1")

    seed = args.seed if args.seed is not None else 0
    rng = replication_rng(seed, "density", 0)
    params = DPParams(args.alpha, base, args.truncation)
    grid = _density_grid(data, base, args.grid_points)
    cdfs = posterior_cdf_draws(data, params, args.draws, grid, rng)
    lower = np.quantile(cdfs, q_lo, axis=0)
    median = np.quantile(cdfs, 0.5, axis=0)
    upper = np.quantile(cdfs, q_hi, axis=0)

    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, args.out_csv)

    def body(fh):
        fh.write("x,lower,median,upper\n")
        for i in range(grid.size):
            fh.write(f"{grid[i]:.12g},{lower[i]:.12g},"
                     f"{median[i]:.12g},{upper[i]:.12g}\n")

    _atomic_write(csv_path, body)
    print(f"wrote {csv_path}")
    if args.out_svg:
        svg_path = os.path.join(args.out_dir, args.out_svg)
        save_svg(render_cdf_band_figure(grid, lower, median, upper, data), svg_path)
        print(f"wrote {svg_path}")
    return 0


def _density_grid(data, base, n_points: int) -> np.ndarray:
    lo_hi = []
    if len(data):
        lo_hi.append((min(data), max(data)))
    if isinstance(base, BetaDist):
        lo_hi.append((0.0, 1.0))
    elif isinstance(base, UniformDist):
        lo_hi.append((base.lo, base.hi))
    elif isinstance(base, GaussianDist):
        lo_hi.append((base.mu - 4 * base.sigma, base.mu + 4 * base.sigma))
    elif isinstance(base, EmpiricalAtoms):
        lo_hi.append((min(base.points), max(base.points)))
    lo = min(x for x, _ in lo_hi)
    hi = max(x for _, x in lo_hi)
    pad = 0.05 * (hi - lo) if hi > lo else 0.5
    return np.linspace(lo - pad, hi + pad, n_points)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure: distinct exit code
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
