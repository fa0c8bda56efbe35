"""Coupling vs distance per antenna length (fitted-model curves)."""

import argparse

import numpy as np

from .figlib import load_columns, new_figure, save_figure


def render(curve_csv, out_path):
    data = load_columns(curve_csv, ["length_key", "r_mm", "J_2piMHz"])
    fig, ax = new_figure(figsize=(5, 3.5))
    for key in np.unique(data["length_key"]):
        mask = data["length_key"] == key
        ax.plot(data["r_mm"][mask], data["J_2piMHz"][mask], label="d = %g" % key)
    ax.axhline(0.0, color="k", lw=0.6, ls=":")
    ax.set_xlabel("r (mm)")
    ax.set_ylabel(r"$J$ ($2\pi\cdot$MHz)")
    ax.legend(frameon=False)
    save_figure(fig, out_path)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="fit_curve.csv from a fit-dipole run")
    parser.add_argument("out", help="output image path")
    args = parser.parse_args(argv)
    render(args.csv, args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
