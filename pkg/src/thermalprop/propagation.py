"""Imaginary-time gate application and schedule construction (Trotter, qDRIFT).

A gate with generator G and angle θ is the two-sided half-angle conjugation
exp(-θ/2 G) · exp(-θ/2 G), applied in one shot to the expansion: terms that
anticommute with G pass through unchanged; a commuting term Q splits into
cosh(θ)·Q and -sinh(θ)·φ·(G·Q) with φ the real ±1 product sign.  Evolving the
identity this way builds the unnormalized thermal operator, renormalized by
the identity coefficient after every gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .majorana import MajoranaMonomial
from .opmap import OperatorMap, TermStats, TruncationPolicy, pack_element
from .pauli import PauliString


class MemoryGuardError(RuntimeError):
    """Raised when the live term count exceeds the configured cap."""


@dataclass(frozen=True)
class HamiltonianTerm:
    """One Hamiltonian summand: coefficient times a basis element."""

    element: object  # PauliString or MajoranaMonomial
    coefficient: float

    def __post_init__(self):
        if not isinstance(self.element, (PauliString, MajoranaMonomial)):
            raise TypeError("element must be a PauliString or MajoranaMonomial")
        if not math.isfinite(self.coefficient) or self.coefficient == 0.0:
            raise ValueError("term coefficient must be finite and non-zero")

    @property
    def basis(self) -> str:
        return "pauli" if isinstance(self.element, PauliString) else "majorana"


def _terms_basis_size(terms) -> tuple[str, int]:
    if not terms:
        raise ValueError("empty Hamiltonian")
    first = terms[0]
    basis = first.basis
    n = first.element.n_qubits if basis == "pauli" else first.element.n_generators
    for t in terms:
        if t.basis != basis:
            raise ValueError("mixed-basis Hamiltonian")
    return basis, n


@dataclass
class GateSchedule:
    """Ordered (term_index, angle) gates plus the β increment each gate contributes."""

    gates: list[tuple[int, float]]
    source: str  # "trotter" | "qdrift"
    seed: int | None = None
    tau: float = 0.0
    beta: float = 0.0
    beta_steps: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __len__(self) -> int:
        return len(self.gates)

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "seed": self.seed,
            "tau": self.tau,
            "beta": self.beta,
            "indices": [int(i) for i, _ in self.gates],
        }

    @classmethod
    def from_dict(cls, payload: dict, terms) -> "GateSchedule":
        """Rebuild a schedule from (source, seed, tau, beta, index list) and its Hamiltonian."""
        source = payload["source"]
        tau = float(payload["tau"])
        indices = payload["indices"]
        if source == "trotter":
            angles = [tau * terms[i].coefficient for i in indices]
            step = tau / len(terms)
        else:
            lam = sum(abs(t.coefficient) for t in terms)
            angles = [tau * math.copysign(1.0, terms[i].coefficient) for i in indices]
            step = tau / lam
        gates = list(zip(indices, angles))
        steps = np.full(len(gates), step)
        return cls(gates, source, payload.get("seed"), tau, float(payload["beta"]), steps)


def apply_imaginary_gate(state: OperatorMap, generator, theta: float) -> OperatorMap:
    """One imaginary-time gate; returns a new map, the input is left untouched."""
    state._check_element(generator)
    if not math.isfinite(theta):
        raise ValueError("non-finite gate angle")
    glo, ghi = pack_element(generator)
    if glo == 0 and ghi == 0:
        raise ValueError("gate generator must be non-identity")
    if theta == 0.0:
        return state.copy()
    ch = math.cosh(theta)
    sh = math.sinh(theta)
    basis_code = _kernel.PAULI if state.basis == "pauli" else _kernel.MAJORANA
    lo, hi, coef, cnt, ident = _kernel.apply_gate(
        state.lo, state.hi, state.coef, state.sinh_counts,
        state.identity_coeff, glo, ghi, ch, sh, basis_code,
    )
    out = OperatorMap(state.basis, state.n)
    out.accumulated_log_factor = state.accumulated_log_factor
    out._replace_arrays(lo, hi, coef, cnt, ident)
    return out


def build_trotter_schedule(
    terms,
    beta: float,
    tau: float,
    reshuffle_seed: int | None = None,
    reshuffle_indices=None,
) -> GateSchedule:
    """L = β/τ rounds over all terms in construction order; gate angle is τ·λ_m.

    When reshuffle_indices is given, those term positions are re-permuted among
    themselves each round with a seeded generator (the rest keep their slots).
    """
    _terms_basis_size(terms)
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if tau <= 0:
        raise ValueError("tau must be positive")
    n_layers = beta / tau
    if abs(n_layers - round(n_layers)) > 1e-9:
        raise ValueError(f"beta/tau = {n_layers} is not an integer number of rounds")
    n_layers = int(round(n_layers))
    m = len(terms)
    rng = None
    positions = None
    if reshuffle_indices is not None:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(reshuffle_seed or 0)))
        positions = sorted(int(i) for i in reshuffle_indices)
    gates: list[tuple[int, float]] = []
    for _ in range(n_layers):
        order = list(range(m))
        if positions:
            shuffled = [positions[k] for k in rng.permutation(len(positions))]
            for slot, idx in zip(positions, shuffled):
                order[slot] = idx
        gates.extend((i, tau * terms[i].coefficient) for i in order)
    steps = np.full(len(gates), tau / m) if gates else np.empty(0)
    return GateSchedule(gates, "trotter", reshuffle_seed, tau, n_layers * tau, steps)


def build_qdrift_schedule(terms, beta: float, tau: float, seed: int) -> GateSchedule:
    """round(Λβ/τ) gates with i.i.d. indices, p_m = |λ_m|/Λ, angle τ·sign(λ_m)."""
    _terms_basis_size(terms)
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if tau <= 0:
        raise ValueError("tau must be positive")
    lams = np.array([t.coefficient for t in terms])
    lam_total = float(np.abs(lams).sum())
    n_gates = int(round(lam_total * beta / tau))
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    indices = rng.choice(len(terms), size=n_gates, p=np.abs(lams) / lam_total)
    signs = np.sign(lams)[indices]
    gates = [(int(i), tau * float(s)) for i, s in zip(indices, signs)]
    steps = np.full(n_gates, tau / lam_total)
    return GateSchedule(gates, "qdrift", seed, tau, beta, steps)


@dataclass
class Snapshot:
    beta: float
    gate_index: int
    stats: TermStats
    log_factor: float
    observed: dict | None = None


def _checkpoint_gates(beta_steps: np.ndarray, checkpoints) -> list[tuple[int, float]]:
    """Snap each requested β to the nearest completed gate boundary."""
    cum = np.concatenate([[0.0], np.cumsum(beta_steps)])
    out = []
    for b in checkpoints:
        g = int(np.argmin(np.abs(cum - b)))
        out.append((g, float(cum[g])))
    return sorted(out)


def propagate_thermal(
    terms,
    schedule: GateSchedule,
    policy: TruncationPolicy,
    checkpoints=(),
    observe=None,
    max_terms: int | None = None,
) -> tuple[OperatorMap, list[Snapshot]]:
    """Evolve the identity through the schedule with per-gate normalization and truncation.

    Emits a snapshot (stats plus the observe hook's result) at each requested β,
    snapped to the nearest gate boundary.  Raises SimulationDivergedError if the
    identity coefficient stops being positive, MemoryGuardError past max_terms.
    """
    basis, n = _terms_basis_size(terms)
    track = policy.max_sinh_count is not None
    state = OperatorMap.identity_state(basis, n, track_sinh=track)
    marks = _checkpoint_gates(schedule.beta_steps, checkpoints)
    snapshots: list[Snapshot] = []

    def emit(upto: int) -> None:
        while marks and marks[0][0] == upto:
            _, b = marks.pop(0)
            snapshots.append(
                Snapshot(
                    beta=b,
                    gate_index=upto,
                    stats=state.term_stats(),
                    log_factor=state.accumulated_log_factor,
                    observed=observe(state) if observe is not None else None,
                )
            )

    emit(0)
    for g, (idx, theta) in enumerate(schedule.gates):
        state = apply_imaginary_gate(state, terms[idx].element, theta)
        state.normalize_by_identity()
        state.apply_truncation(policy)
        if max_terms is not None and state.n_terms > max_terms:
            raise MemoryGuardError(
                f"term count {state.n_terms} exceeds cap {max_terms} after gate {g + 1}"
            )
        emit(g + 1)
    return state, snapshots
