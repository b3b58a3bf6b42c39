#!/usr/bin/env python3
"""Quick-look plots for cantilever outputs.

    plot_results.py trajectory RUN_DIR/trajectory.csv [-o energy.png]
    plot_results.py sweep SWEEP_DIR/index.csv [-o sweep.png]
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def plot_trajectory(path, out):
    df = pd.read_csv(path)
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    for col in ["E_kinetic", "E_inertial", "E_bend", "E_nl", "E_total"]:
        if (df[col] > 0).any():
            top.semilogy(df["t"], df[col], label=col)
    top.set_ylabel("energy")
    top.legend()
    bottom.plot(df["t"], df["identity_residual"])
    bottom.set_ylabel("identity residual")
    bottom.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(out, dpi=120)


def plot_sweep(path, out):
    df = pd.read_csv(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    done = df[df["status"] == "completed"]
    ax.plot(done["value"], done["omega"], "o-", label="decay rate")
    for status, marker in [("blowup", "x"), ("error", "s")]:
        sub = df[df["status"] == status]
        if len(sub):
            ax.plot(sub["value"], [0.0] * len(sub), marker, label=status)
    ax.set_xlabel(df["param"].iloc[0])
    ax.set_ylabel("omega")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=120)


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("kind", choices=["trajectory", "sweep"])
    parser.add_argument("csv")
    parser.add_argument("-o", "--out", default=None)
    args = parser.parse_args()
    out = args.out or f"{args.kind}.png"
    (plot_trajectory if args.kind == "trajectory" else plot_sweep)(args.csv, out)
    print(out)


if __name__ == "__main__":
    main()
