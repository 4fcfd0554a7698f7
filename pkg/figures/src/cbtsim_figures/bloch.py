"""Bloch-sphere trajectory of spin 1 from trajectory CSVs carrying the
sx1/sy1/sz1 columns; several inputs overlay as separate envelopes."""

from __future__ import annotations

import argparse
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import read_table, run


def plot_bloch(paths, out, labels=None, tail=None):
    fig = plt.figure(figsize=(4.8, 4.8))
    ax = fig.add_subplot(projection="3d")
    u = np.linspace(0, 2 * np.pi, 60)
    v = np.linspace(0, np.pi, 30)
    r = 0.5
    ax.plot_wireframe(r * np.outer(np.cos(u), np.sin(v)),
                      r * np.outer(np.sin(u), np.sin(v)),
                      r * np.outer(np.ones_like(u), np.cos(v)),
                      color="0.85", lw=0.3)
    if labels is None:
        labels = [None] * len(paths)
    for path, label in zip(paths, labels):
        tab = read_table(path, required=["sx1", "sy1", "sz1"])
        sel = slice(-tail, None) if tail else slice(None)
        ax.plot(tab["sx1"][sel], tab["sy1"][sel], tab["sz1"][sel],
                lw=0.8, label=label or path)
    ax.set_xlabel("sx")
    ax.set_ylabel("sy")
    ax.set_zlabel("sz")
    ax.set_box_aspect((1, 1, 1))
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="trajectory CSV path(s), one per parameter value")
    parser.add_argument("--out", required=True)
    parser.add_argument("--labels", nargs="*", default=None)
    parser.add_argument("--tail", type=int, default=None,
                        help="plot only the final N samples (the envelope)")
    args = parser.parse_args(argv)
    return run(lambda: plot_bloch(args.inputs, args.out, args.labels, args.tail))


if __name__ == "__main__":
    sys.exit(main())
