"""Experiment runners backing the CLI subcommands.

Each runner consumes a validated config (see cli.py), produces deterministic
result rows (sorted before writing, independent of worker scheduling), and
leaves wall_ms as the only column outside the determinism guarantee.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import models as mod
from . import observables as obs
from .bounds import GateEnsemble, empirical_backflow, pbf_all_to_all, pbf_nn
from .opmap import TruncationPolicy
from .oracle import DenseSandwichState, dense_thermal_expectation
from .pauli import PauliString
from .propagation import (
    build_qdrift_schedule,
    build_trotter_schedule,
    propagate_thermal,
)


def replica_seed(master: int, replica: int) -> int:
    """Counter-based per-replica stream seed derived from (master, replica)."""
    return int(np.random.SeedSequence(master, spawn_key=(replica,)).generate_state(1)[0])


@dataclass
class ModelBundle:
    """A built model plus the metadata the runners need."""

    terms: list
    basis: str
    n: int  # qubits or majorana generators
    n_sites: int
    identity_offset: float = 0.0
    lattice: mod.HexTriangularLattice | None = None
    hopping_count: int = 0

    @property
    def n_modes(self) -> int:
        """Qubit count, or fermionic mode count for majorana models."""
        return self.n if self.basis == "pauli" else self.n // 2

    @property
    def lambda_total(self) -> float:
        return sum(abs(t.coefficient) for t in self.terms)


def build_model(spec: dict) -> ModelBundle:
    kind = spec["kind"]
    n_sites = spec.get("n_sites", 0)
    params = spec.get("params", {})
    seed = spec.get("seed")
    if kind == "j1j2":
        terms = mod.build_j1j2(n_sites, params.get("j1", 1.0), params.get("j2", 0.5))
        return ModelBundle(terms, "pauli", n_sites, n_sites)
    if kind == "heisenberg1d":
        terms = mod.build_heisenberg_chain(
            n_sites, params.get("coupling", 1.0), periodic=params.get("periodic", False)
        )
        return ModelBundle(terms, "pauli", n_sites, n_sites)
    if kind in ("random_all_to_all", "random_nn"):
        geometry = "all_to_all" if kind == "random_all_to_all" else "nearest_neighbor"
        terms = mod.build_random_2local(
            n_sites, params.get("n_terms", 30), geometry, seed,
            periodic=params.get("periodic", False),
        )
        return ModelBundle(terms, "pauli", n_sites, n_sites)
    if kind == "fermi_hubbard_tri":
        lattice = mod.build_hex_lattice(params.get("rings", 1))
        terms, offset = mod.build_fermi_hubbard_tri(
            lattice, params.get("t", 1.0), params.get("u", 8.0), params.get("mu", 4.0)
        )
        return ModelBundle(
            terms, "majorana", mod.fh_n_generators(lattice), lattice.n_sites,
            identity_offset=offset, lattice=lattice,
            hopping_count=mod.fh_hopping_term_count(lattice),
        )
    raise ValueError(f"unknown model kind {kind!r}")


def _build_schedule(bundle: ModelBundle, scheduler: dict, seed: int):
    tau = scheduler["tau"]
    beta_max = scheduler["beta_max"]
    if scheduler["kind"] == "trotter":
        reshuffle = scheduler.get("reshuffle_hopping", False)
        return build_trotter_schedule(
            bundle.terms, beta_max, tau,
            reshuffle_seed=seed if reshuffle else None,
            reshuffle_indices=range(bundle.hopping_count) if reshuffle else None,
        )
    return build_qdrift_schedule(bundle.terms, beta_max, tau, seed)


# --- run ----------------------------------------------------------------

RUN_COLUMNS = ("beta", "energy", "energy_density", "n_terms", "log_partition", "wall_ms", "seed")


def _run_one_replica(args):
    config, replica = args
    bundle = build_model(config["model"])
    seed = replica_seed(config["seed"], replica)
    schedule = _build_schedule(bundle, config["scheduler"], seed)
    policy = TruncationPolicy(**config["truncation"])
    ham_obs = obs.ObservableExpansion.from_hamiltonian(bundle.terms)

    def observe(state):
        return {"energy": obs.expectation(state, ham_obs) + bundle.identity_offset}

    t0 = time.perf_counter()
    final, snaps = propagate_thermal(
        bundle.terms, schedule, policy,
        checkpoints=config["scheduler"]["checkpoints"],
        observe=observe, max_terms=config.get("max_terms"),
    )
    wall_ms = int(1000 * (time.perf_counter() - t0))
    rows = []
    for s in snaps:
        energy = s.observed["energy"]
        rows.append({
            "beta": s.beta,
            "energy": energy,
            "energy_density": energy / bundle.n_sites,
            "n_terms": s.stats.term_count,
            "log_partition": bundle.n_modes * math.log(2.0) + s.log_factor,
            "wall_ms": wall_ms,
            "seed": seed,
        })
    czz_rows = None
    if "czz_map" in config.get("observables", []) and bundle.lattice is not None:
        czz_rows = obs.czz_map(final, bundle.lattice)
    return replica, rows, czz_rows


def run_experiment(config: dict):
    """Returns (rows, czz_rows or None); one row per (checkpoint β, replica)."""
    replicas = config.get("replicas", 1)
    jobs = [(config, r) for r in range(replicas)]
    workers = config.get("workers", 1)
    if workers > 1 and replicas > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one_replica, jobs))
    else:
        results = [_run_one_replica(j) for j in jobs]
    results.sort(key=lambda t: t[0])
    rows = [row for _, rep_rows, _ in results for row in rep_rows]
    czz = results[-1][2] if results else None
    return rows, czz


# --- compare --------------------------------------------------------------

COMPARE_COLUMNS = (
    "scheduler", "trunc_kind", "trunc_value", "beta",
    "mean_rel_energy_error", "stderr", "mean_n_terms", "replicas",
)


def _sweep_policies(truncation_sweep: dict):
    out = []
    for thr in truncation_sweep.get("coeff_thresholds", []):
        out.append(("coeff", thr, TruncationPolicy(coeff_threshold=thr)))
    for k in truncation_sweep.get("max_weights", []):
        out.append(("weight", k, TruncationPolicy(max_weight=k)))
    return out


def _compare_one_replica(args):
    """Per replica: untruncated dense reference + one truncated run per setting."""
    config, scheduler_kind, replica = args
    bundle = build_model(config["model"])
    seed = replica_seed(config["seed"], replica)
    scheduler = dict(config["scheduler"], kind=scheduler_kind)
    schedule = _build_schedule(bundle, scheduler, seed)
    checkpoints = scheduler["checkpoints"]
    ham_obs = obs.ObservableExpansion.from_hamiltonian(bundle.terms)

    from .propagation import _checkpoint_gates

    marks = _checkpoint_gates(schedule.beta_steps, checkpoints)
    dense = DenseSandwichState(bundle.terms)
    reference = {}
    mark_iter = sorted(set(g for g, _ in marks))
    pos = 0
    for stop in mark_iter:
        while pos < stop:
            idx, theta = schedule.gates[pos]
            dense.apply_gate(idx, theta)
            pos += 1
        reference[stop] = dense.expectation(ham_obs)
    betas = {g: b for g, b in marks}

    def observe(state):
        return {"energy": obs.expectation(state, ham_obs)}

    rows = []
    for kind, value, policy in _sweep_policies(config["truncation_sweep"]):
        _, snaps = propagate_thermal(bundle.terms, schedule, policy,
                                     checkpoints=checkpoints, observe=observe)
        for s in snaps:
            ref = reference[s.gate_index]
            rows.append({
                "scheduler": scheduler_kind,
                "trunc_kind": kind,
                "trunc_value": value,
                "beta": betas[s.gate_index],
                "rel_err": abs((s.observed["energy"] - ref) / ref),
                "n_terms": s.stats.term_count,
            })
    return replica, rows


def compare_schedulers(config: dict):
    """Mean relative truncated-vs-untruncated energy error per (scheduler, setting, β)."""
    jobs = [("trotter", 0)]
    jobs += [("qdrift", r) for r in range(config.get("replicas", 1))]
    args = [(config, kind, rep) for kind, rep in jobs]
    workers = config.get("workers", 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_compare_one_replica, args))
    else:
        results = [_compare_one_replica(a) for a in args]

    cells: dict[tuple, list] = {}
    for (kind, _rep), (_, rows) in zip(jobs, results):
        for row in rows:
            key = (row["scheduler"], row["trunc_kind"], row["trunc_value"], row["beta"])
            cells.setdefault(key, []).append((row["rel_err"], row["n_terms"]))
    out = []
    for key in sorted(cells, key=lambda k: (k[0], k[1], float(k[2]), k[3])):
        vals = cells[key]
        errs = np.array([v[0] for v in vals])
        terms = np.array([v[1] for v in vals], dtype=float)
        stderr = float(errs.std(ddof=1) / math.sqrt(len(errs))) if len(errs) > 1 else 0.0
        out.append({
            "scheduler": key[0],
            "trunc_kind": key[1],
            "trunc_value": key[2],
            "beta": key[3],
            "mean_rel_energy_error": float(errs.mean()),
            "stderr": stderr,
            "mean_n_terms": float(terms.mean()),
            "replicas": len(vals),
        })
    return out


# --- backflow ---------------------------------------------------------------

BACKFLOW_COLUMNS = ("w", "n", "analytic", "empirical", "stderr")


def backflow_scan(config: dict):
    geometry = config["geometry"]
    rows = []
    for n in config["n_values"]:
        ens = GateEnsemble(
            "all_to_all" if geometry == "all_to_all" else "nearest_neighbor", n,
            periodic=config.get("periodic", False),
        )
        m_edges = n if config.get("periodic", False) else n - 1
        for w in config["w_values"]:
            try:
                if geometry == "all_to_all":
                    analytic = pbf_all_to_all(w, n)
                else:
                    analytic = pbf_nn(w, m_edges)
            except ValueError:
                analytic = math.nan
            est = empirical_backflow(
                w, ens,
                samples=config.get("samples", 0),
                seed=replica_seed(config.get("seed", 0), w * 1000 + n),
                exhaustive=config.get("exhaustive", False),
                placement=config.get("placement", "contiguous"),
            )
            rows.append({
                "w": w, "n": n, "analytic": analytic,
                "empirical": est.estimate, "stderr": est.stderr,
            })
    return rows


# --- oracle check -------------------------------------------------------------


@dataclass
class OracleReport:
    max_deviation: float
    tolerance: float
    passed: bool
    scaling_ratios: list = field(default_factory=list)
    scaling_ok: bool | None = None
    details: dict = field(default_factory=dict)


def _two_site_z_observables(n: int):
    out = []
    for i in range(n):
        out.append((f"Z{i}", obs.ObservableExpansion.single(PauliString.from_label(n, {i: "Z"}))))
    for i in range(n):
        for j in range(i + 1, n):
            out.append((
                f"Z{i}Z{j}",
                obs.ObservableExpansion.single(PauliString.from_label(n, {i: "Z", j: "Z"})),
            ))
    return out


def oracle_check(config: dict) -> OracleReport:
    """Untruncated propagation vs the dense gate oracle, plus τ-halving scaling."""
    bundle = build_model(config["model"])
    beta = config["beta"]
    tau = config["tau"]
    tolerance = config.get("tolerance", 1e-8)
    floor = config.get("coeff_floor", 0.0)
    scheduler = {"kind": "trotter", "tau": tau, "beta_max": beta, "checkpoints": [beta],
                 "reshuffle_hopping": config.get("reshuffle_hopping", False)}
    schedule = _build_schedule(bundle, scheduler, config.get("seed", 0))
    policy = TruncationPolicy(coeff_threshold=floor)
    final, _ = propagate_thermal(bundle.terms, schedule, policy,
                                 max_terms=config.get("max_terms"))
    dense = DenseSandwichState(bundle.terms, schedule)
    ham_obs = obs.ObservableExpansion.from_hamiltonian(bundle.terms)

    details = {}
    dev = abs(obs.expectation(final, ham_obs) - dense.expectation(ham_obs))
    details["energy"] = dev
    if bundle.basis == "pauli":
        for name, o in _two_site_z_observables(bundle.n):
            details[name] = abs(obs.expectation(final, o) - dense.expectation(o))
    else:
        lat = bundle.lattice
        c = lat.center_index
        for i in range(lat.n_sites):
            zr = obs.spin_z_expansion(lat, c)
            zi = obs.spin_z_expansion(lat, i)
            zz = zr.multiply(zi)
            sparse_val = (obs.expectation(final, zz)
                          - obs.expectation(final, zr) * obs.expectation(final, zi))
            dense_val = (dense.expectation(zz)
                         - dense.expectation(zr) * dense.expectation(zi))
            details[f"czz_{i}"] = abs(sparse_val - dense_val)
    max_dev = max(details.values())

    # τ-halving probe: the deviation from the exact thermal value must shrink
    # by at least 1.5x per halving (first order or better; the symmetric
    # sandwich typically converges at second order, ratio ~4)
    ratios = []
    scaling_ok = None
    if config.get("scaling_check", bundle.basis == "pauli") and bundle.n_modes <= 10:
        exact = dense_thermal_expectation(bundle.terms, beta, ham_obs)
        errs = []
        for t in (2 * tau, tau, tau / 2):
            sch = _build_schedule(bundle, dict(scheduler, tau=t), config.get("seed", 0))
            f, _ = propagate_thermal(bundle.terms, sch, policy)
            errs.append(abs(obs.expectation(f, ham_obs) - exact))
        if min(errs) > 1e-12:  # exactly-representable models have no Trotter error
            ratios = [errs[0] / errs[1], errs[1] / errs[2]]
            scaling_ok = all(r >= 1.5 for r in ratios)

    passed = max_dev <= tolerance and scaling_ok is not False
    return OracleReport(max_dev, tolerance, passed, ratios, scaling_ok, details)
