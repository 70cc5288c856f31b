"""Two-panel truncation comparison: mean relative energy error as a function
of β (top) and of the retained term count (bottom), Trotter solid and qDRIFT
dashed, one color per truncation setting.

    plot-truncation-comparison --input compare.csv --output figs/comparison
"""

from __future__ import annotations

import argparse
from collections import defaultdict

import matplotlib.pyplot as plt

from .common import column, load_rows, save_figure

REQUIRED = ("scheduler", "trunc_kind", "trunc_value", "beta",
            "mean_rel_energy_error", "mean_n_terms")

_STYLE = {"trotter": "-", "qdrift": "--"}


def build_figure(rows):
    groups = defaultdict(list)
    for r in rows:
        groups[(r["scheduler"], r["trunc_kind"], r["trunc_value"])].append(r)
    settings = sorted({(k[1], k[2]) for k in groups}, key=str)
    colors = plt.cm.viridis([i / max(len(settings) - 1, 1) for i in range(len(settings))])
    color_of = dict(zip(settings, colors))

    fig, (ax_beta, ax_terms) = plt.subplots(2, 1, figsize=(7, 8))
    for key in sorted(groups, key=str):
        scheduler, kind, value = key
        rows_k = sorted(groups[key], key=lambda r: float(r["beta"]))
        betas = column(rows_k, "beta")
        errs = column(rows_k, "mean_rel_energy_error")
        terms = column(rows_k, "mean_n_terms")
        label = f"{scheduler} {kind}={float(value):g}"
        color = color_of[(kind, value)]
        ax_beta.plot(betas, errs, _STYLE[scheduler], color=color, label=label)
        ax_terms.plot(terms, errs, _STYLE[scheduler], color=color, marker="o", ms=3)
    ax_beta.set_xlabel("inverse temperature β")
    ax_beta.set_ylabel("mean relative energy error")
    ax_beta.set_yscale("log")
    ax_beta.legend(fontsize=6, ncol=2)
    ax_terms.set_xlabel("retained terms")
    ax_terms.set_ylabel("mean relative energy error")
    ax_terms.set_xscale("log")
    ax_terms.set_yscale("log")
    fig.tight_layout()
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--input", required=True, help="compare-subcommand CSV")
    parser.add_argument("--output", required=True, help="output path base (.png/.svg added)")
    args = parser.parse_args(argv)
    rows = load_rows(args.input, REQUIRED)
    png, svg = save_figure(build_figure(rows), args.output)
    print(f"wrote {png} and {svg}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
