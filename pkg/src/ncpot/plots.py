"""Figure rendering for the report-emitting subcommands.

Each figure is written next to its delimited data file.  The Agg backend
keeps rendering headless and byte-stable for a given install.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import TwoSlopeNorm

from .analysis import SweepCurve
from .wigner import PhaseSpaceGrid

_DPI = 150


def render_wigner(grid: PhaseSpaceGrid, path, title: str = "") -> None:
    """Diverging heat map of the Wigner values, zero pinned to white."""
    vmax = float(np.max(np.abs(grid.values)))
    vmax = vmax if vmax > 0 else 1.0
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    mesh = ax.pcolormesh(
        grid.alpha_re,
        grid.alpha_im,
        grid.values.T,
        cmap="RdBu_r",
        norm=TwoSlopeNorm(vcenter=0.0, vmin=-vmax, vmax=vmax),
        shading="nearest",
    )
    fig.colorbar(mesh, ax=ax, label="W")
    ax.set_xlabel(r"Re $\alpha$")
    ax.set_ylabel(r"Im $\alpha$")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_sweep(curve: SweepCurve, path, title: str = "") -> None:
    """The three measure curves against the interpolation parameter."""
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    ax.plot(curve.beta, curve.c, label="concurrence", color="tab:red")
    ax.plot(curve.beta, curve.s, label="steering", color="tab:green")
    ax.plot(curve.beta, curve.b, label="Bell", color="tab:blue")
    ax.set_xlabel(r"$\beta$")
    ax.set_ylabel("measure value")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(bottom=0.0)
    ax.legend(frameon=False)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
