#!/usr/bin/env python3
"""Plot inefficiency curves from a `cavmem sweep` CSV.

Usage: plot_sweep.py sweep.csv [out.png]
"""
import sys

import matplotlib.pyplot as plt
import pandas as pd


def main() -> None:
    path = sys.argv[1]
    out = sys.argv[2] if len(sys.argv) > 2 else None
    df = pd.read_csv(path, comment="#")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for strategy, grp in df.groupby("strategy"):
        style = "o" if strategy == "oct" else "-"
        ax.plot(grp["axis"], grp["one_minus_eta"], style, label=strategy)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"rate $\times T_c$")
    ax.set_ylabel(r"$1-\eta$")
    ax.legend()
    fig.tight_layout()
    if out:
        fig.savefig(out, dpi=200)
    else:
        plt.show()


if __name__ == "__main__":
    main()
