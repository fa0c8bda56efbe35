"""Bond order and central-bond correlation vs J2/J1 (static dimer scan)."""

import argparse

from .figlib import load_columns, new_figure, save_figure


def render(csv_path, out_path):
    data = load_columns(csv_path, ["j2_over_j1", "Dz_per_dimer", "Bz", "Bzz"])
    fig, ax = new_figure(figsize=(5, 3.5))
    x = data["j2_over_j1"]
    ax.plot(x, abs(data["Dz_per_dimer"]), "k--", label=r"$|D^z|$ (per dimer)")
    ax.plot(x, abs(data["Bz"]), "r-o", ms=3, label=r"$|B^z|$")
    ax.plot(x, abs(data["Bzz"]), "b-s", ms=3, label=r"$|B^{zz}|$")
    ax.set_xlabel(r"$J_2/J_1$")
    ax.set_ylabel("bond order")
    ax.legend(frameon=False)
    save_figure(fig, out_path)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="bond_order.csv from a scan-j2 run")
    parser.add_argument("out", help="output image path")
    args = parser.parse_args(argv)
    render(args.csv, args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
