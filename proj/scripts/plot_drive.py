#!/usr/bin/env python3
"""Plot a synthesized control drive (CSV + JSON sidecar from `cavmem control`).

Usage: plot_drive.py drive [out.png]   # reads drive.csv and drive.json
"""
import json
import sys

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd


def main() -> None:
    base = sys.argv[1]
    out = sys.argv[2] if len(sys.argv) > 2 else None
    df = pd.read_csv(base + ".csv", comment="#")
    with open(base + ".json") as fh:
        side = json.load(fh)
    mag = np.hypot(df["re_omega"], df["im_omega"])
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(df["t"], mag, label=r"$|\Omega(t)|$")
    for tc in side.get("critical_times", []):
        ax.axvline(tc, ls=":", color="gray")
    for imp in side.get("impulses", []):
        ax.axvline(imp["t"], ls="--", color="crimson",
                   label=f"impulse area {imp['area']:.3f}")
    ax.set_xlabel("t")
    ax.set_ylabel(r"$|\Omega|$")
    ax.legend()
    fig.tight_layout()
    if out:
        fig.savefig(out, dpi=200)
    else:
        plt.show()


if __name__ == "__main__":
    main()
