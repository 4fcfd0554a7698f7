"""Heat map of the long-term oscillation amplitude over the coupling-angle /
temperature grid produced by the scan command."""

from __future__ import annotations

import argparse
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, read_table, run


def plot_phase_map(path, out, value="amplitude"):
    tab = read_table(path, required=["phi0", "temperature", value])
    phi0 = np.unique(tab["phi0"])
    temps = np.unique(tab["temperature"])
    grid = np.full((len(temps), len(phi0)), np.nan)
    for p, t, v in zip(tab["phi0"], tab["temperature"], tab[value]):
        grid[np.searchsorted(temps, t), np.searchsorted(phi0, p)] = v
    if np.isnan(grid).any():
        raise SchemaError(f"{path}: scan rows do not form a complete grid")

    fig, ax = plt.subplots(figsize=(4.8, 3.8))
    mesh = ax.pcolormesh(phi0, temps, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=value)
    ax.set_xlabel("phi0")
    ax.set_ylabel("T")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="input", required=True, help="scan CSV path")
    parser.add_argument("--out", required=True)
    parser.add_argument("--value", default="amplitude")
    args = parser.parse_args(argv)
    return run(lambda: plot_phase_map(args.input, args.out, args.value))


if __name__ == "__main__":
    sys.exit(main())
