"""Second-order correlation curves: one line per mode pair versus time lag,
with an optional log scale for the short-lag blow-up."""

from __future__ import annotations

import argparse
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import read_table, run


def plot_g2(path, out, logscale=False):
    tab = read_table(path, required=["n_base", "lag_steps", "tau", "pair", "value"])
    pairs = tab["pair"]
    if pairs.dtype != object:
        pairs = np.array([f"{int(p)}" for p in pairs])
    fig, ax = plt.subplots(figsize=(5.4, 3.6))
    for pair in sorted(set(pairs)):
        sel = pairs == pair
        order = np.argsort(tab["tau"][sel])
        ax.plot(tab["tau"][sel][order], tab["value"][sel][order],
                marker="o", ms=3, lw=1.0, label=f"pair {pair}")
    ax.axhline(1.0, color="0.6", lw=0.8)
    ax.axhline(2.0, color="0.6", lw=0.8, ls="--")
    ax.set_xlabel("tau")
    ax.set_ylabel("G2")
    if logscale:
        ax.set_yscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="input", required=True, help="G2 CSV path")
    parser.add_argument("--out", required=True)
    parser.add_argument("--logscale", action="store_true")
    args = parser.parse_args(argv)
    return run(lambda: plot_g2(args.input, args.out, args.logscale))


if __name__ == "__main__":
    sys.exit(main())
