"""Three-panel ramp trajectory: magnetization, z and x bond correlations."""

import argparse

from .figlib import load_columns, new_figure, save_figure

COLUMNS = ["t_us", "mean_sz", "bz", "bx"]


def render(mean_csv, out_path, ideal_csv=None):
    mean = load_columns(mean_csv, COLUMNS)
    ideal = load_columns(ideal_csv, COLUMNS) if ideal_csv else None
    fig, axes = new_figure(3, 1, figsize=(5, 7), sharex=True)
    panels = (("mean_sz", r"$\langle S^z\rangle$"), ("bz", r"$B^z$"), ("bx", r"$B^x$"))
    for ax, (col, label) in zip(axes, panels):
        ax.plot(mean["t_us"], mean[col], "r-", label="ensemble mean")
        if ideal is not None:
            ax.plot(ideal["t_us"], ideal[col], "k--", lw=1, label="ideal")
        ax.set_ylabel(label)
    axes[0].legend(frameon=False, fontsize=8)
    axes[-1].set_xlabel(r"$t$ ($\mu$s)")
    save_figure(fig, out_path)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="ramp_mean.csv from a ramp run")
    parser.add_argument("out", help="output image path")
    parser.add_argument("--ideal", help="ramp_ideal.csv for the reference curves")
    args = parser.parse_args(argv)
    render(args.csv, args.out, args.ideal)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
