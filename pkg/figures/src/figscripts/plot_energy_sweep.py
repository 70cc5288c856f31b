"""Energy density and retained-term count against β, one shade per truncation
threshold, with an optional ground-state reference line.

Accepts either several run-subcommand CSVs (one per threshold, labels taken
from --labels or file stems) or a single combined CSV carrying an extra
`threshold` column.

    plot-energy-sweep --input run_t9.csv run_t12.csv --labels 2^-9 2^-12 \
        --reference -1.5 --output figs/sweep
"""

from __future__ import annotations

import argparse
from collections import defaultdict

import matplotlib.pyplot as plt

from .common import SchemaError, column, load_rows, save_figure

REQUIRED = ("beta", "energy_density", "n_terms")


def collect_series(inputs, labels):
    if len(inputs) == 1 and labels is None:
        rows = load_rows(inputs[0], REQUIRED)
        if "threshold" not in rows[0]:
            raise SchemaError(
                f"{inputs[0]}: a single input needs a 'threshold' column "
                "(or pass one file per threshold)"
            )
        groups = defaultdict(list)
        for r in rows:
            groups[r["threshold"]].append(r)
        return sorted(groups.items(), key=lambda kv: float(kv[0]), reverse=True)
    if labels is None:
        labels = [p.rsplit("/", 1)[-1].rsplit(".", 1)[0] for p in inputs]
    if len(labels) != len(inputs):
        raise SchemaError(f"{len(inputs)} inputs but {len(labels)} labels")
    return [(lab, load_rows(path, REQUIRED)) for lab, path in zip(labels, inputs)]


def build_figure(series, reference):
    fig, (ax_e, ax_n) = plt.subplots(2, 1, figsize=(7, 8), sharex=True)
    shades = plt.cm.Blues([0.35 + 0.6 * i / max(len(series) - 1, 1) for i in range(len(series))])
    for (label, rows), color in zip(series, shades):
        rows = sorted(rows, key=lambda r: float(r["beta"]))
        betas = column(rows, "beta")
        ax_e.plot(betas, column(rows, "energy_density"), color=color, marker="o",
                  ms=3, label=str(label))
        ax_n.plot(betas, column(rows, "n_terms"), color=color, marker="o", ms=3)
    if reference is not None:
        ax_e.axhline(reference, color="black", ls="--", lw=1, label=f"reference {reference}")
    ax_e.set_ylabel("energy density ⟨H⟩/n")
    ax_e.legend(fontsize=7)
    ax_n.set_xlabel("inverse temperature β")
    ax_n.set_ylabel("retained terms")
    ax_n.set_yscale("log")
    fig.tight_layout()
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--input", required=True, nargs="+",
                        help="run-subcommand CSV(s), one per threshold")
    parser.add_argument("--labels", nargs="+", default=None,
                        help="threshold labels matching --input order")
    parser.add_argument("--reference", type=float, default=None,
                        help="horizontal reference energy density")
    parser.add_argument("--output", required=True)
    args = parser.parse_args(argv)
    series = collect_series(args.input, args.labels)
    png, svg = save_figure(build_figure(series, args.reference), args.output)
    print(f"wrote {png} and {svg}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
