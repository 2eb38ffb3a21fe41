"""SVG rendering of regret summaries and CDF envelopes.

Figures are built without pyplot so no global backend state is touched;
SVGs are written with the date metadata stripped so identical inputs give
identical files.
"""

import numpy as np
from matplotlib.figure import Figure


def render_regret_figure(summary: dict, title: str | None = None) -> Figure:
    """One mean curve plus shaded quantile band per agent."""
    fig = Figure(figsize=(7.0, 4.5))
    ax = fig.add_subplot()
    for label, s in summary.items():
        t = np.asarray(s["t"])
        (line,) = ax.plot(t, s["mean"], label=label)
        ax.fill_between(t, s["q_lo"], s["q_hi"], alpha=0.2,
                        color=line.get_color(), linewidth=0)
    ax.set_xlabel("round")
    ax.set_ylabel("cumulative regret")
    ax.legend()
    if title:
        ax.set_title(title)
    return fig


def render_cdf_band_figure(grid, lower, median, upper,
                           data=None, title: str | None = None) -> Figure:
    fig = Figure(figsize=(7.0, 4.5))
    ax = fig.add_subplot()
    ax.fill_between(grid, lower, upper, alpha=0.25, label="quantile band")
    ax.plot(grid, median, label="median CDF")
    if data is not None and len(data):
        xs = np.sort(np.asarray(data))
        ax.step(xs, np.arange(1, xs.size + 1) / xs.size, where="post",
                linestyle="--", label="empirical CDF")
    ax.set_xlabel("x")
    ax.set_ylabel("CDF")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    if title:
        ax.set_title(title)
    return fig


def save_svg(fig: Figure, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
