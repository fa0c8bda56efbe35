"""Disorder robustness: ensemble-mean bond correlation with error bars."""

import argparse

import numpy as np

from .figlib import load_columns, new_figure, save_figure


def render(csv_path, out_path, observable="Bz"):
    data = load_columns(csv_path, ["axis_value", "observable", "mean", "stderr"])
    mask = data["observable"] == observable
    if not np.any(mask):
        raise RuntimeError("observable %r not present in %s" % (observable, csv_path))
    fig, ax = new_figure(figsize=(5, 3.5))
    ax.errorbar(
        data["axis_value"][mask],
        np.abs(data["mean"][mask]),
        yerr=data["stderr"][mask],
        fmt="o-",
        capsize=3,
    )
    ax.set_xlabel("scan axis")
    ax.set_ylabel(r"$|%s|$ (ensemble mean)" % ("B^z" if observable == "Bz" else observable))
    save_figure(fig, out_path)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="disorder_scan.csv from a disorder-scan run")
    parser.add_argument("out", help="output image path")
    parser.add_argument("--observable", default="Bz")
    args = parser.parse_args(argv)
    render(args.csv, args.out, args.observable)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
