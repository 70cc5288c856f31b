"""Lattice scatter of spin-spin correlations against the center site.

Consumes the run subcommand's lattice export (site coordinates plus edge
list) and the matching correlation CSV.

    plot-lattice-correlation --lattice fh_lattice.csv --input fh_czz.csv \
        --output figs/czz
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from .common import SchemaError, load_rows, save_figure


def load_lattice(path):
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: lattice export does not exist")
    sites, edges = [], []
    mode = "sites"
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            if row[0] == "site_index":
                mode = "sites"
                continue
            if row[0] == "edge_i":
                mode = "edges"
                continue
            if mode == "sites":
                sites.append((int(row[0]), float(row[1]), float(row[2])))
            else:
                edges.append((int(row[0]), int(row[1])))
    if not sites:
        raise SchemaError(f"{path}: no site rows")
    return sites, edges


def build_figure(sites, edges, czz_rows):
    if len(czz_rows) != len(sites):
        raise SchemaError(
            f"site-count mismatch: lattice has {len(sites)} sites, "
            f"correlation CSV has {len(czz_rows)} rows"
        )
    xs = np.array([s[1] for s in sites])
    ys = np.array([s[2] for s in sites])
    vals = np.array([float(r["czz"]) for r in sorted(czz_rows, key=lambda r: int(r["site_index"]))])
    center = int(np.argmax(vals))  # the center autocorrelation dominates
    fig, ax = plt.subplots(figsize=(6, 5.5))
    for i, j in edges:
        ax.plot([xs[i], xs[j]], [ys[i], ys[j]], color="0.8", lw=1, zorder=1)
    off = np.arange(len(vals)) != center
    span = max(abs(vals[off]).max(), 1e-12) if off.any() else 1.0
    sc = ax.scatter(xs[off], ys[off], c=vals[off], cmap="RdBu_r",
                    vmin=-span, vmax=span, s=220, edgecolors="black", zorder=2)
    ax.scatter([xs[center]], [ys[center]], color="red", marker="*",
               s=420, edgecolors="black", zorder=3, label="center site")
    fig.colorbar(sc, ax=ax, label="C_ZZ vs center")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lattice", required=True, help="lattice export CSV")
    parser.add_argument("--input", required=True, help="correlation CSV (site_index,x,y,czz)")
    parser.add_argument("--output", required=True)
    args = parser.parse_args(argv)
    sites, edges = load_lattice(args.lattice)
    czz_rows = load_rows(args.input, ("site_index", "x", "y", "czz"))
    png, svg = save_figure(build_figure(sites, edges, czz_rows), args.output)
    print(f"wrote {png} and {svg}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
