"""Coupling vs orientation angle, sampled from a coupling-map field.

Walks a circle of fixed radius around the map origin and plots J against
the angle of the center-connecting line, nearest-grid sampled.
"""

import argparse
import math

import numpy as np

from .figlib import load_columns, new_figure, save_figure


def render(map_csv, out_path, radius=1.5, center=(0.0, 0.0)):
    data = load_columns(map_csv, ["x_mm", "y_mm", "J_2piMHz"])
    xs = np.unique(data["x_mm"])
    ys = np.unique(data["y_mm"])
    field = np.full((ys.size, xs.size), np.nan)
    field[np.searchsorted(ys, data["y_mm"]), np.searchsorted(xs, data["x_mm"])] = data["J_2piMHz"]

    angles = np.linspace(0.0, 90.0, 91)
    vals = np.full(angles.size, np.nan)
    for k, a in enumerate(angles):
        x = center[0] + radius * math.cos(math.radians(a))
        y = center[1] + radius * math.sin(math.radians(a))
        if xs[0] <= x <= xs[-1] and ys[0] <= y <= ys[-1]:
            vals[k] = field[np.argmin(np.abs(ys - y)), np.argmin(np.abs(xs - x))]
    if not np.isfinite(vals).any():
        raise RuntimeError("circle of radius %g mm lies outside the map grid" % radius)

    fig, ax = new_figure(figsize=(5, 3.5))
    ax.plot(angles, vals, "o-", ms=3)
    ax.axhline(0.0, color="k", lw=0.6, ls=":")
    ax.set_xlabel("center-line angle (deg)")
    ax.set_ylabel(r"$J$ ($2\pi\cdot$MHz)")
    ax.set_title("r = %g mm" % radius, fontsize=9)
    save_figure(fig, out_path)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="map.csv from a coupling-map run")
    parser.add_argument("out", help="output image path")
    parser.add_argument("--radius", type=float, default=1.5)
    args = parser.parse_args(argv)
    render(args.csv, args.out, args.radius)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
