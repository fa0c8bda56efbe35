"""Shared CSV loading and figure plumbing.

Loading is strict: a missing column raises MissingColumnError naming the
column and the file, so truncated or mismatched inputs fail loudly
instead of rendering nonsense.
"""

import csv

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


class MissingColumnError(RuntimeError):
    def __init__(self, column, path):
        super().__init__("missing column %r in %s" % (column, path))
        self.column = column
        self.path = path


def load_columns(path, required):
    """Read a dipsim CSV into {column: array}; numeric where possible."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingColumnError(required[0], path) from None
        rows = [r for r in reader if r]
    for col in required:
        if col not in header:
            raise MissingColumnError(col, path)
    out = {}
    for k, name in enumerate(header):
        values = [row[k] if k < len(row) else "" for row in rows]
        try:
            out[name] = np.array([float(v) for v in values])
        except ValueError:
            out[name] = np.array(values)
    n = min((v.shape[0] for v in out.values()), default=0)
    for col in required:
        if out[col].shape[0] == 0:
            raise MissingColumnError(col, path)
    return out


def save_figure(fig, out_path):
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def new_figure(*args, **kwargs):
    return plt.subplots(*args, **kwargs)
