"""Configuration-driven experiment runner.

Subcommands: run, compare, backflow, oracle-check.  Each takes --config (a
JSON document) plus optional --seed and --output overrides.  The fully
resolved config (defaults included) is echoed to stdout and written next to
the results.  Exit codes: 0 success, 2 config error, 3 divergence or
memory-guard abort.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

from . import experiments as exp
from .models import lattice_export_rows
from .opmap import SimulationDivergedError, TruncationPolicy
from .oracle import DimensionTooLargeError
from .propagation import MemoryGuardError


class ConfigError(ValueError):
    """Invalid configuration; the message carries the offending field path."""


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _expect(cfg: dict, path: str, key: str, types, default="__required__"):
    field = f"{path}.{key}".lstrip(".")
    if key not in cfg:
        if isinstance(default, str) and default == "__required__":
            _fail(field, "missing required field")
        cfg[key] = default
        return default
    value = cfg[key]
    if types is not None:
        allowed = types if isinstance(types, tuple) else (types,)
        ok = isinstance(value, allowed)
        if ok and isinstance(value, bool) and bool not in allowed:
            ok = False  # bool is an int subclass; reject it where ints are meant
        if not ok:
            names = "/".join(getattr(t, "__name__", str(t)) for t in allowed)
            _fail(field, f"expected {names}, got {type(value).__name__}")
    return value


_MODEL_KINDS = ("j1j2", "heisenberg1d", "random_all_to_all", "random_nn", "fermi_hubbard_tri")


def _validate_model(cfg: dict, path: str = "model") -> dict:
    if not isinstance(cfg, dict):
        _fail(path, "expected an object")
    kind = _expect(cfg, path, "kind", str)
    if kind not in _MODEL_KINDS:
        _fail(f"{path}.kind", f"must be one of {_MODEL_KINDS}")
    _expect(cfg, path, "params", dict, {})
    _expect(cfg, path, "seed", (int, type(None)), None)
    if kind == "fermi_hubbard_tri":
        cfg.setdefault("n_sites", 0)
        rings = cfg["params"].setdefault("rings", 1)
        if not isinstance(rings, int) or rings < 0:
            _fail(f"{path}.params.rings", "must be a non-negative integer")
        cfg["params"].setdefault("t", 1.0)
        cfg["params"].setdefault("u", 8.0)
        cfg["params"].setdefault("mu", 4.0)
    else:
        n = _expect(cfg, path, "n_sites", int)
        if n < 2:
            _fail(f"{path}.n_sites", "must be at least 2")
    return cfg


def _validate_scheduler(cfg: dict, path: str = "scheduler", need_kind=True) -> dict:
    if not isinstance(cfg, dict):
        _fail(path, "expected an object")
    if need_kind:
        kind = _expect(cfg, path, "kind", str)
        if kind not in ("trotter", "qdrift"):
            _fail(f"{path}.kind", "must be 'trotter' or 'qdrift'")
    tau = _expect(cfg, path, "tau", (int, float))
    if tau <= 0:
        _fail(f"{path}.tau", "must be positive")
    beta_max = _expect(cfg, path, "beta_max", (int, float))
    if beta_max < 0:
        _fail(f"{path}.beta_max", "must be non-negative")
    _expect(cfg, path, "checkpoints", list, [beta_max])
    _expect(cfg, path, "reshuffle_hopping", bool, False)
    return cfg


def _validate_truncation(cfg: dict, path: str = "truncation") -> dict:
    if not isinstance(cfg, dict):
        _fail(path, "expected an object")
    cfg.setdefault("coeff_threshold", 0.0)
    cfg.setdefault("max_weight", None)
    cfg.setdefault("max_sinh_count", None)
    try:
        TruncationPolicy(**cfg)
    except (TypeError, ValueError) as err:
        _fail(path, str(err))
    return cfg


def validate_run_config(cfg: dict) -> dict:
    _validate_model(_expect(cfg, "", "model", dict))
    _validate_scheduler(_expect(cfg, "", "scheduler", dict))
    _validate_truncation(_expect(cfg, "", "truncation", dict, {}))
    _expect(cfg, "", "observables", list, ["energy", "energy_density", "log_partition"])
    replicas = _expect(cfg, "", "replicas", int, 1)
    if replicas < 1:
        _fail("replicas", "must be >= 1")
    if cfg["scheduler"]["kind"] == "trotter" and replicas != 1:
        _fail("replicas", "must be 1 for the deterministic trotter scheduler")
    _expect(cfg, "", "seed", int, 0)
    _expect(cfg, "", "workers", int, 1)
    _expect(cfg, "", "max_terms", (int, type(None)), 50_000_000)
    _expect(cfg, "", "output_path", str, "results.csv")
    return cfg


def validate_compare_config(cfg: dict) -> dict:
    model = _validate_model(_expect(cfg, "", "model", dict))
    if model["kind"] == "fermi_hubbard_tri":
        _fail("model.kind", "compare needs a Pauli-basis model")
    if model["n_sites"] > 10:
        _fail("model.n_sites", "compare needs a dense-oracle-eligible size (n <= 10)")
    _validate_scheduler(_expect(cfg, "", "scheduler", dict), need_kind=False)
    sweep = _expect(cfg, "", "truncation_sweep", dict)
    sweep.setdefault("coeff_thresholds", [])
    sweep.setdefault("max_weights", [])
    if not sweep["coeff_thresholds"] and not sweep["max_weights"]:
        _fail("truncation_sweep", "needs at least one threshold or weight cutoff")
    replicas = _expect(cfg, "", "replicas", int, 1)
    if replicas < 1:
        _fail("replicas", "must be >= 1")
    _expect(cfg, "", "seed", int, 0)
    _expect(cfg, "", "workers", int, 1)
    _expect(cfg, "", "output_path", str, "compare.csv")
    return cfg


def validate_backflow_config(cfg: dict) -> dict:
    geometry = _expect(cfg, "", "geometry", str)
    if geometry not in ("all_to_all", "nearest_neighbor"):
        _fail("geometry", "must be 'all_to_all' or 'nearest_neighbor'")
    for key in ("n_values", "w_values"):
        vals = _expect(cfg, "", key, list)
        if not vals or not all(isinstance(v, int) and v >= 0 for v in vals):
            _fail(key, "must be a non-empty list of non-negative integers")
    _expect(cfg, "", "samples", int, 100_000)
    _expect(cfg, "", "exhaustive", bool, False)
    _expect(cfg, "", "placement", str, "contiguous")
    _expect(cfg, "", "periodic", bool, False)
    _expect(cfg, "", "seed", int, 0)
    _expect(cfg, "", "output_path", str, "backflow.csv")
    return cfg


def validate_oracle_config(cfg: dict) -> dict:
    _validate_model(_expect(cfg, "", "model", dict))
    beta = _expect(cfg, "", "beta", (int, float))
    if beta < 0:
        _fail("beta", "must be non-negative")
    tau = _expect(cfg, "", "tau", (int, float))
    if tau <= 0:
        _fail("tau", "must be positive")
    _expect(cfg, "", "tolerance", (int, float), 1e-8)
    _expect(cfg, "", "coeff_floor", (int, float), 0.0)
    _expect(cfg, "", "seed", int, 0)
    _expect(cfg, "", "max_terms", (int, type(None)), 50_000_000)
    _expect(cfg, "", "reshuffle_hopping", bool, False)
    _expect(cfg, "", "output_path", (str, type(None)), None)
    return cfg


# --- output -----------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(path, columns, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def write_lattice_export(path, lattice) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("site_index", "x", "y"))
        for k, x, y in lattice_export_rows(lattice):
            writer.writerow((k, _fmt(x), _fmt(y)))
        writer.writerow(())
        writer.writerow(("edge_i", "edge_j"))
        for i, j in lattice.edges:
            writer.writerow((i, j))


def write_czz_export(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("site_index", "x", "y", "czz"))
        for k, x, y, v in rows:
            writer.writerow((k, _fmt(x), _fmt(y), _fmt(v)))


def _echo_config(cfg: dict, output_path: str) -> None:
    text = json.dumps(cfg, indent=2, sort_keys=True)
    print("resolved config:")
    print(text)
    Path(str(output_path) + ".resolved.json").write_text(text + "\n", encoding="utf-8")


# --- subcommands -------------------------------------------------------------


def _cmd_run(cfg: dict) -> int:
    cfg = validate_run_config(cfg)
    _echo_config(cfg, cfg["output_path"])
    rows, czz = exp.run_experiment(cfg)
    write_csv(cfg["output_path"], exp.RUN_COLUMNS, rows)
    print(f"wrote {len(rows)} rows to {cfg['output_path']}")
    if czz is not None:
        stem = str(Path(cfg["output_path"]).with_suffix(""))
        bundle = exp.build_model(cfg["model"])
        write_czz_export(stem + "_czz.csv", czz)
        write_lattice_export(stem + "_lattice.csv", bundle.lattice)
        print(f"wrote correlation and lattice exports to {stem}_czz.csv / {stem}_lattice.csv")
    return 0


def _cmd_compare(cfg: dict) -> int:
    cfg = validate_compare_config(cfg)
    _echo_config(cfg, cfg["output_path"])
    rows = exp.compare_schedulers(cfg)
    write_csv(cfg["output_path"], exp.COMPARE_COLUMNS, rows)
    print(f"wrote {len(rows)} rows to {cfg['output_path']}")
    return 0


def _cmd_backflow(cfg: dict) -> int:
    cfg = validate_backflow_config(cfg)
    _echo_config(cfg, cfg["output_path"])
    rows = exp.backflow_scan(cfg)
    write_csv(cfg["output_path"], exp.BACKFLOW_COLUMNS, rows)
    print(f"wrote {len(rows)} rows to {cfg['output_path']}")
    return 0


def _cmd_oracle_check(cfg: dict) -> int:
    cfg = validate_oracle_config(cfg)
    _echo_config(cfg, cfg["output_path"] or "oracle_check")
    report = exp.oracle_check(cfg)
    payload = dataclasses.asdict(report)
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    print(text)
    print(f"oracle check: {'PASS' if report.passed else 'FAIL'} "
          f"(max deviation {report.max_deviation:.3e} vs tolerance {report.tolerance:.1e})")
    if cfg["output_path"]:
        Path(cfg["output_path"]).write_text(text + "\n", encoding="utf-8")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "compare": _cmd_compare,
    "backflow": _cmd_backflow,
    "oracle-check": _cmd_oracle_check,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="thermalprop",
                                     description="imaginary-time propagation experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--output", default=None, help="override output_path")
    args = parser.parse_args(argv)

    try:
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        print(f"config error: cannot read {args.config}: {err}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.output is not None:
        cfg["output_path"] = args.output

    try:
        return _COMMANDS[args.command](cfg)
    except (ConfigError, DimensionTooLargeError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (SimulationDivergedError, MemoryGuardError) as err:
        print(f"aborted: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
