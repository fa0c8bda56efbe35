"""Coupling-strength map with the zero-coupling contour overlaid."""

import argparse

import numpy as np

from .figlib import load_columns, new_figure, save_figure


def render(map_csv, out_path, contour_csv=None):
    data = load_columns(map_csv, ["x_mm", "y_mm", "J_2piMHz"])
    xs = np.unique(data["x_mm"])
    ys = np.unique(data["y_mm"])
    field = np.full((ys.size, xs.size), np.nan)
    ix = np.searchsorted(xs, data["x_mm"])
    iy = np.searchsorted(ys, data["y_mm"])
    field[iy, ix] = data["J_2piMHz"]

    fig, ax = new_figure(figsize=(5, 4.2))
    finite = np.isfinite(field)
    scale = np.nanmax(np.abs(field)) if finite.any() else 1.0
    # symmetric log color scale highlights the rapid sign-dependent decay
    mesh = ax.pcolormesh(
        xs,
        ys,
        np.ma.masked_invalid(field),
        cmap="RdBu_r",
        norm=_symlog(scale),
        shading="nearest",
    )
    fig.colorbar(mesh, ax=ax, label=r"$J$ ($2\pi\cdot$MHz)")
    if contour_csv:
        pts = load_columns(contour_csv, ["x_mm", "y_mm"])
        ax.plot(pts["x_mm"], pts["y_mm"], "k.", ms=2, label="J = 0")
        ax.legend(frameon=False, loc="upper right")
    ax.set_xlabel("x (mm)")
    ax.set_ylabel("y (mm)")
    ax.set_aspect("equal")
    save_figure(fig, out_path)


def _symlog(scale):
    from matplotlib.colors import SymLogNorm

    return SymLogNorm(linthresh=max(1e-3 * scale, 1e-12), vmin=-scale, vmax=scale)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="map.csv from a coupling-map run")
    parser.add_argument("out", help="output image path")
    parser.add_argument("--contour", help="contour.csv with the zero locus")
    args = parser.parse_args(argv)
    render(args.csv, args.out, args.contour)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
