"""Trajectory plots: observable time series, with an optional second input
for collision-vs-master-equation overlays and a twin axis for the
synchronization coefficient."""

from __future__ import annotations

import argparse
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, read_table, run


def plot_trajectories(paths, out, columns=None, labels=None, t_max=None):
    tables = [read_table(p, required=["step", "t"]) for p in paths]
    if columns is None:
        skip = {"step", "t", "trace", "c12"}
        columns = [c for c in tables[0]
                   if c not in skip and tables[0][c].dtype != object]
        if not columns:
            raise SchemaError(f"{paths[0]}: no observable columns found")
    for tab, path in zip(tables, paths):
        for c in columns:
            if c not in tab:
                raise SchemaError(f"{path}: missing required column(s): {c}")

    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    styles = ["-", "--", ":"]
    if labels is None:
        labels = [None] * len(tables)
    for tab, style, label in zip(tables, styles, labels):
        sel = slice(None)
        if t_max is not None:
            sel = tab["t"] <= t_max
        for c in columns:
            name = c if label is None else f"{c} ({label})"
            ax.plot(tab["t"][sel], tab[c][sel], style, lw=1.0, label=name)
    ax.set_xlabel("t")
    ax.set_ylabel(", ".join(columns))
    ax.legend(fontsize=8, ncol=2)

    if "c12" in tables[0] and tables[0]["c12"].dtype != object:
        c12 = tables[0]["c12"]
        ok = np.isfinite(c12)
        if ok.any():
            ax2 = ax.twinx()
            ax2.plot(tables[0]["t"][ok], c12[ok], color="k", lw=1.4, alpha=0.7)
            ax2.set_ylabel("C12")
            ax2.set_ylim(-1.05, 1.05)

    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="trajectory CSV path(s); two for an overlay")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--columns", nargs="*", default=None)
    parser.add_argument("--labels", nargs="*", default=None)
    parser.add_argument("--t-max", type=float, default=None)
    args = parser.parse_args(argv)
    return run(lambda: plot_trajectories(
        args.inputs, args.out, args.columns, args.labels, args.t_max))


if __name__ == "__main__":
    sys.exit(main())
