"""Evaluable truncation-error bounds and backflow probabilities.

Backflow = a gate application strictly reducing the weight of a propagated
string; its conditional probability given commutation governs how fast
weight-truncation error decays.  The closed forms here are exact conditional
probabilities (all-to-all uniform) or upper bounds (nearest-neighbor), both
with an optional e^alpha prefactor covering close-to-uniform gate
distributions; `empirical_backflow` estimates or exhaustively enumerates the
same quantity as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .pauli import PauliString, commutes, pauli_mul, weight


@dataclass(frozen=True)
class BoundInputs:
    """Inputs shared by the bound evaluators; only the relevant fields are read."""

    beta_lambda: float = 0.0  # β·Λ
    k: int = 1  # truncation level / weight cutoff
    m: int = 1  # minimum number of backflow steps
    pbf: float = 0.0  # backflow probability
    obs_one_norm: float = 1.0  # ‖o‖₁
    beta: float = 0.0
    n_terms: int = 0  # M
    degree: int = 1  # ℓ
    term_weight: int = 1  # w
    c1: float = 1.0
    c2: float = 1.0


@dataclass(frozen=True)
class SmallAngleBound:
    epsilon: float
    normalized: float  # 2ε/(1-ε), inf when ε >= 1


def thm1_small_angle_bound(beta_lambda: float, k: int) -> SmallAngleBound:
    """ε = e^{βΛ/2}·(e·βΛ/2k)^k for discarding paths with more than k sinh branches."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if beta_lambda < 0:
        raise ValueError("beta_lambda must be non-negative")
    if beta_lambda == 0.0:
        return SmallAngleBound(0.0, 0.0)
    eps = math.exp(beta_lambda / 2.0) * (math.e * beta_lambda / (2.0 * k)) ** k
    normalized = 2.0 * eps / (1.0 - eps) if eps < 1.0 else math.inf
    return SmallAngleBound(eps, normalized)


def pbf_all_to_all(w: int, n: int, alpha: float = 0.0) -> float:
    """Exact Pr(weight decays | gate commutes) for uniform weight-2 all-to-all gates.

    Equals C(w,2) / (9·C(n,2) - 2w(3n-2w-1)); the denominator is
    9·C(n,2)·Pr(commute) with Pr(anticommute) = [6w(n-w) + 2w(w-1)] / (9·C(n,2)).
    alpha > 0 applies the e^alpha close-to-uniform prefactor on both counts.
    """
    if w < 0 or n < 2 or w > n:
        raise ValueError("need 0 <= w <= n and n >= 2")
    ea = math.exp(alpha)
    denom = 9.0 * comb(n, 2) - ea * 2.0 * w * (3 * n - 2 * w - 1)
    if denom <= 0:
        raise ValueError(f"backflow denominator {denom} is not positive (w={w}, n={n})")
    return ea * comb(w, 2) / denom


def pbf_nn(w: int, m_edges: int, alpha: float = 0.0) -> float:
    """Upper bound (w-1)/(9M - 12w) for uniform nearest-neighbor weight-2 gates."""
    if w < 0 or m_edges < 1:
        raise ValueError("need w >= 0 and at least one edge")
    ea = math.exp(alpha)
    denom = 9.0 * m_edges - ea * 12.0 * w
    if denom <= 0:
        raise ValueError(f"backflow bound denominator {denom} is not positive (w={w}, M={m_edges})")
    return ea * max(w - 1, 0) / denom


def thm2_weight_bound(inputs: BoundInputs) -> float:
    """‖o‖₁·e^{βΛ/2}·(e·βΛ·pbf/2m)^m, valid for m > e·βΛ·pbf/2."""
    bl = inputs.beta_lambda
    m = inputs.m
    if m < 1:
        raise ValueError("m must be >= 1")
    if inputs.pbf == 0.0:
        return 0.0
    base = math.e * bl * inputs.pbf / (2.0 * m)
    if base >= 1.0:
        raise ValueError("precondition m > e·βΛ·pbf/2 violated")
    return inputs.obs_one_norm * math.exp(bl / 2.0) * base**m


def thm3_trotter_bound(inputs: BoundInputs) -> float:
    """‖o‖₁·exp(c1·β·M)·(c2·β·ℓ·w)^{k/w} with caller-supplied constants c1, c2."""
    if inputs.c1 <= 0 or inputs.c2 <= 0:
        raise ValueError("c1 and c2 must be positive")
    base = inputs.c2 * inputs.beta * inputs.degree * inputs.term_weight
    exponent = inputs.k / inputs.term_weight
    return inputs.obs_one_norm * math.exp(inputs.c1 * inputs.beta * inputs.n_terms) * base**exponent


def trotter_commutator_sum(terms) -> float:
    """Σ_{m<m'} ‖[h_m, h_{m'}]‖ — exact for Pauli terms: 2|λλ'| per anticommuting pair."""
    total = 0.0
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            if not commutes(terms[i].element, terms[j].element):
                total += 2.0 * abs(terms[i].coefficient * terms[j].coefficient)
    return total


# --- empirical backflow ------------------------------------------------------


@dataclass(frozen=True)
class GateEnsemble:
    """Uniform weight-2 gate ensemble over a fixed geometry."""

    kind: str  # "all_to_all" | "nearest_neighbor"
    n: int
    periodic: bool = False

    def pairs(self):
        if self.kind == "all_to_all":
            return [(i, j) for i in range(self.n) for j in range(i + 1, self.n)]
        ps = [(i, i + 1) for i in range(self.n - 1)]
        if self.periodic:
            ps.append((self.n - 1, 0))
        return ps


@dataclass(frozen=True)
class BackflowEstimate:
    estimate: float
    stderr: float
    n_commuting: int


def reference_string(n: int, w: int, placement: str = "contiguous") -> PauliString:
    """Weight-w all-Z reference; contiguous block or evenly dispersed sites."""
    if w > n:
        raise ValueError("w exceeds n")
    if placement == "contiguous":
        sites = list(range(w))
    elif placement == "dispersed":
        sites = sorted({(j * n) // w for j in range(w)})
        while len(sites) < w:  # collisions only when w is close to n
            sites.append(next(s for s in range(n) if s not in sites))
            sites = sorted(sites)
    else:
        raise ValueError(f"unknown placement {placement!r}")
    return PauliString.from_label(n, {s: "Z" for s in sites})


_LETTERS = ("X", "Y", "Z")


def _gate_universe(ens: GateEnsemble):
    for i, j in ens.pairs():
        for a in _LETTERS:
            for b in _LETTERS:
                yield PauliString.from_label(ens.n, {i: a, j: b})


def empirical_backflow(
    w: int,
    ensemble,
    samples: int = 0,
    seed: int | None = None,
    exhaustive: bool = False,
    placement: str = "contiguous",
) -> BackflowEstimate:
    """Pr(weight strictly decreases | gate commutes) for one applied gate.

    `ensemble` is either a GateEnsemble (uniform; supports exhaustive=True) or a
    Hamiltonian term list sampled with qDRIFT probabilities |λ|/Λ.
    """
    if isinstance(ensemble, GateEnsemble):
        n = ensemble.n
    else:
        n = ensemble[0].element.n_qubits
    ref = reference_string(n, w, placement)
    wref = weight(ref)

    def classify(gate: PauliString):
        if not commutes(gate, ref):
            return False, False
        prod, _ = pauli_mul(gate, ref)
        return True, weight(prod) < wref

    if exhaustive:
        if not isinstance(ensemble, GateEnsemble):
            raise ValueError("exhaustive enumeration needs a uniform GateEnsemble")
        n_comm = n_decay = 0
        for gate in _gate_universe(ensemble):
            comm, decay = classify(gate)
            n_comm += comm
            n_decay += decay
        if n_comm == 0:
            raise ZeroDivisionError("no commuting gates in the ensemble")
        return BackflowEstimate(n_decay / n_comm, 0.0, n_comm)

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    if isinstance(ensemble, GateEnsemble):
        universe = list(_gate_universe(ensemble))
        picks = rng.integers(len(universe), size=samples)
        gates = (universe[int(k)] for k in picks)
    else:
        lams = np.array([abs(t.coefficient) for t in ensemble])
        probs = lams / lams.sum()
        picks = rng.choice(len(ensemble), size=samples, p=probs)
        gates = (ensemble[int(k)].element for k in picks)
    n_comm = n_decay = 0
    for gate in gates:
        comm, decay = classify(gate)
        n_comm += comm
        n_decay += decay
    if n_comm == 0:
        raise ZeroDivisionError("no commuting gates were sampled")
    p = n_decay / n_comm
    stderr = math.sqrt(p * (1.0 - p) / n_comm)
    return BackflowEstimate(p, stderr, n_comm)
