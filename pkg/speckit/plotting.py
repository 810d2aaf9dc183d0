"""SVG figures of trajectories and convergence sweeps."""

import math
from typing import Callable, Optional, Sequence, TextIO

import matplotlib
from matplotlib.figure import Figure

from .base import Trajectory
from .convergence import ErrorReport, format_norm


# Fixed ids and no timestamp keep the SVG output byte-stable.
matplotlib.rcParams["svg.hashsalt"] = "speckit"
_METADATA = {"Date": None}


def _save(fig: Figure, stream: TextIO) -> None:
    fig.savefig(stream, format="svg", metadata=_METADATA)


def plot_trajectory(traj: Trajectory, stream: TextIO,
                    exact: Optional[Callable[[float], float]] = None,
                    label: str = "numerical", title: str = "") -> None:
    """Writes an SVG of a numerical solution against the exact one.

    Args:
        traj (Trajectory): Numerical solution.
        stream (file-like): Text stream written to.
        exact (callable, optional): Exact solution, drawn on a fine grid.
        label (str, optional): Legend of the numerical solution.
        title (str, optional): Axes title.
    """

    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot(1, 1, 1)
    if exact is not None:
        t_end = traj.times[-1]
        grid = [traj.t0 + (t_end - traj.t0) * i / 400 for i in range(401)]
        ax.plot(grid, [exact(t) for t in grid], "k-", lw=1, label="exact")
    ax.plot(traj.times, traj.values, "o--", ms=3, lw=1, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("u")
    ax.set_title(title)
    ax.legend(loc="best")
    ax.grid(True)
    _save(fig, stream)


def plot_errors(reports: Sequence[ErrorReport], stream: TextIO,
                title: str = "") -> None:
    """Writes an SVG of `log10 E` against `log2 N`, one line per scheme.

    Args:
        reports (list of ErrorReport): Sweep results.
        stream (file-like): Text stream written to.
        title (str, optional): Axes title.
    """

    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot(1, 1, 1)
    for scheme in dict.fromkeys(r.scheme for r in reports):
        rows = [r for r in reports if r.scheme is scheme and r.E > 0]
        ax.plot([math.log2(r.N) for r in rows],
                [math.log10(r.E) for r in rows], "o-", ms=3, lw=1,
                label=str(scheme))

    if reports and not title:
        title = f"{reports[0].problem}, p = {format_norm(reports[0].p)}"
    ax.set_xlabel("log2 N")
    ax.set_ylabel("log10 E")
    ax.set_title(title)
    ax.legend(loc="best")
    ax.grid(True)
    _save(fig, stream)
