"""Shared plumbing for the figure scripts: schema-checked CSV loading and
deterministic matplotlib output (identical inputs yield identical SVG bytes)."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "figscripts"


class SchemaError(ValueError):
    pass


def load_rows(path, required_columns):
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: input CSV does not exist")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required_columns if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing} (found {header})")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows (0 rows after the header)")
    return rows


def column(rows, name, cast=float):
    return [cast(r[name]) for r in rows]


def save_figure(fig, output_base: str) -> tuple[str, str]:
    """Write <base>.png and <base>.svg; SVG is byte-stable across reruns."""
    base = Path(output_base)
    base.parent.mkdir(parents=True, exist_ok=True)
    png = str(base.with_suffix(".png"))
    svg = str(base.with_suffix(".svg"))
    fig.savefig(png, dpi=150, metadata={"Software": "figscripts"})
    fig.savefig(svg, metadata={"Date": None})
    plt.close(fig)
    return png, svg
