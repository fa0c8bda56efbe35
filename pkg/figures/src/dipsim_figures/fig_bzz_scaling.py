"""Central-bond difference vs inverse system size, one curve per coupling.

Takes several bond_order.csv files (one per system size) and traces
|Bzz| against 1/L for each J2/J1 present in all of them.
"""

import argparse

import numpy as np

from .figlib import load_columns, new_figure, save_figure


def render(csv_paths, out_path):
    tables = [load_columns(p, ["j2_over_j1", "L", "Bzz"]) for p in csv_paths]
    ratios = set(np.round(tables[0]["j2_over_j1"], 10))
    for t in tables[1:]:
        ratios &= set(np.round(t["j2_over_j1"], 10))
    if not ratios:
        raise RuntimeError("no common J2/J1 values across the input files")
    fig, ax = new_figure(figsize=(5, 3.5))
    for ratio in sorted(ratios):
        inv_l, bzz = [], []
        for t in tables:
            mask = np.round(t["j2_over_j1"], 10) == ratio
            inv_l.append(1.0 / t["L"][mask][0])
            bzz.append(abs(t["Bzz"][mask][0]))
        order = np.argsort(inv_l)
        ax.plot(np.array(inv_l)[order], np.array(bzz)[order], "o-", label=r"$J_2/J_1=%g$" % ratio)
    ax.set_xlabel(r"$1/L$")
    ax.set_ylabel(r"$|B^{zz}|$")
    ax.set_xlim(left=0.0)
    ax.legend(frameon=False, fontsize=8)
    save_figure(fig, out_path)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csvs", nargs="+", help="bond_order.csv files, one per L")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    render(args.csvs, args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
