"""Dense ground truth for small systems.

Three pieces: exact thermal expectations by eigendecomposition, the exact
dense realization of a gate schedule (the same half-angle sandwich the sparse
engine applies, in matrix form), and the Jordan-Wigner embedding that maps
Majorana monomials onto Pauli strings for verification.

The dense sandwich A = W·I·W† is tracked through its one-sided gate product
W; diagonal Z-type symmetries shared by every gate generator (found as the
GF(2) nullspace of the generators' X-masks) split W into exact blocks, which
is what keeps the 14-mode Fermi-Hubbard check desk-sized.  Observables whose
X-mask breaks a symmetry have exactly zero trace against the block-diagonal
state and are reported as 0.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernel
from .majorana import MajoranaMonomial
from .pauli import PauliString, Phase, pauli_mul
from .propagation import GateSchedule

SIZE_CAP_THERMAL = 12  # dense eigendecomposition cap (4096^2)
SIZE_CAP_SANDWICH = 14  # gate-product oracle cap, made viable by blocking


class DimensionTooLargeError(ValueError):
    pass


# --- Jordan-Wigner ----------------------------------------------------------


def _jw_generator(n_modes: int, g: int) -> PauliString:
    # generator 2j -> Z^j X_j, generator 2j+1 -> Z^j Y_j (0-based modes)
    j = g // 2
    x = 1 << j
    z = (1 << (j + 1)) - 1 if g % 2 else (1 << j) - 1
    return PauliString(n_modes, x, z)


def jw_map(m: MajoranaMonomial) -> tuple[PauliString, Phase]:
    """Pauli image of a Hermitian monomial; the returned phase is always ±1."""
    n_modes = m.n_generators // 2
    result = PauliString.identity(n_modes)
    phase = Phase(m.hermitian_exponent)
    bits = m.bits
    while bits:
        low = bits & -bits
        g = low.bit_length() - 1
        result, ph = pauli_mul(result, _jw_generator(n_modes, g))
        phase = phase * ph
        bits ^= low
    if not phase.is_real:
        raise AssertionError("Hermitian monomial mapped to an imaginary phase")
    return result, phase


def _to_pauli_terms(terms):
    """[(PauliString, λ, image sign φ)] for either basis, plus n_qubits.

    The basis element realizes as φ·P, so the Hamiltonian summand is (λφ)·P
    while a gate generated by the element with angle θ is exp(-θ/2·φ·P).
    """
    out = []
    if terms[0].basis == "pauli":
        n = terms[0].element.n_qubits
        for t in terms:
            out.append((t.element, t.coefficient, 1.0))
    else:
        n = terms[0].element.n_generators // 2
        for t in terms:
            p, ph = jw_map(t.element)
            out.append((p, t.coefficient, ph.value.real))
    return out, n


def _obs_pauli_terms(obs):
    if obs.basis == "pauli":
        return [(p, c) for p, c in obs.items()], obs.n
    out = []
    for m, c in obs.items():
        p, ph = jw_map(m)
        out.append((p, c * ph.value.real))
    return out, obs.n // 2


# --- dense matrices ---------------------------------------------------------


def _pauli_row_action(p: PauliString, rows: np.ndarray):
    """P|c> = value(c)|c^x> written row-wise: (source rows, values) for each output row."""
    x = np.uint64(p.x)
    z = np.uint64(p.z)
    src = rows ^ x
    signs = 1.0 - 2.0 * (np.bitwise_count(z & src).astype(np.int64) % 2)
    front = (1j) ** ((p.x & p.z).bit_count() % 4)
    return src, front * signs


def pauli_matrix(p: PauliString) -> np.ndarray:
    d = 1 << p.n_qubits
    rows = np.arange(d, dtype=np.uint64)
    src, vals = _pauli_row_action(p, rows)
    m = np.zeros((d, d), dtype=np.complex128)
    m[rows.astype(np.int64), src.astype(np.int64)] = vals
    return m


def hamiltonian_matrix(terms) -> np.ndarray:
    pterms, n = _to_pauli_terms(terms)
    if n > SIZE_CAP_THERMAL:
        raise DimensionTooLargeError(f"{n} qubits exceeds the dense cap {SIZE_CAP_THERMAL}")
    d = 1 << n
    rows = np.arange(d, dtype=np.uint64)
    h = np.zeros((d, d), dtype=np.complex128)
    for p, lam, jw in pterms:
        src, vals = _pauli_row_action(p, rows)
        h[rows.astype(np.int64), src.astype(np.int64)] += lam * jw * vals
    return h


def dense_thermal_state(terms, beta: float) -> np.ndarray:
    """ρ_β = e^{-βH}/Tr e^{-βH} by eigendecomposition."""
    h = hamiltonian_matrix(terms)
    w, v = np.linalg.eigh(h)
    ew = np.exp(-beta * (w - w.min()))
    rho = (v * ew) @ v.conj().T
    return rho / np.trace(rho).real


def dense_thermal_expectation(terms, beta: float, obs) -> float:
    """Tr(O e^{-βH}) / Tr(e^{-βH}); one eigendecomposition serves every O and β."""
    h = hamiltonian_matrix(terms)
    w, v = np.linalg.eigh(h)
    ew = np.exp(-beta * (w - w.min()))
    z = ew.sum()
    obs_terms, n = _obs_pauli_terms(obs)
    d = 1 << n
    rows = np.arange(d, dtype=np.uint64)
    total = obs.identity_coeff * z
    for p, coeff in obs_terms:
        src, vals = _pauli_row_action(p, rows)
        pv = vals[:, None] * v[src.astype(np.int64), :]
        diag = np.einsum("ij,ij->j", v.conj(), pv)
        total += coeff * float(np.real(np.dot(diag, ew)))
    return float(np.real(total)) / float(z)


# --- Z-type symmetry blocking ----------------------------------------------


def z_symmetry_masks(xmasks, n: int) -> list[int]:
    """GF(2) nullspace basis: masks s with parity(s & x) = 0 for every x given."""
    # row-reduce the x-masks, pivot = highest set bit, one pivot per row
    basis: list[int] = []
    for v in xmasks:
        v = int(v)
        while v:
            hit = next((b for b in basis if b.bit_length() == v.bit_length()), None)
            if hit is None:
                basis.append(v)
                break
            v ^= hit
    # full RREF: clear each pivot bit from every other row, largest pivot first
    basis.sort(key=int.bit_length, reverse=True)
    for i, bi in enumerate(basis):
        p = bi.bit_length() - 1
        for j in range(len(basis)):
            if j != i and (basis[j] >> p) & 1:
                basis[j] ^= bi
    pivots = {b.bit_length() - 1: b for b in basis}
    free_cols = [j for j in range(n) if j not in pivots]
    null_basis = []
    for j in free_cols:
        s = 1 << j
        for p, row in pivots.items():
            if (row >> j) & 1:
                s |= 1 << p
        null_basis.append(s)
    return null_basis


def _partition_blocks(n: int, masks: list[int]):
    d = 1 << n
    states = np.arange(d, dtype=np.uint64)
    if not masks:
        return [states]
    label = np.zeros(d, dtype=np.int64)
    for k, s in enumerate(masks):
        par = np.bitwise_count(states & np.uint64(s)).astype(np.int64) % 2
        label |= par << k
    order = np.argsort(label, kind="stable")
    sorted_labels = label[order]
    boundaries = np.flatnonzero(np.r_[True, sorted_labels[1:] != sorted_labels[:-1]])
    return [states[order[a:b]] for a, b in zip(boundaries, np.r_[boundaries[1:], d])]


class DenseSandwichState:
    """Exact dense realization of a gate schedule acting on the identity.

    Tracks W = G_K ··· G_1 per symmetry block (so the state is A = W W†) and
    evaluates normalized expectations without ever forming A.  Pass
    schedule=None and feed gates through apply_gate for checkpointed use.
    """

    def __init__(self, terms, schedule: GateSchedule | None = None):
        pterms, n = _to_pauli_terms(terms)
        if n > SIZE_CAP_SANDWICH:
            raise DimensionTooLargeError(f"{n} qubits exceeds the sandwich cap {SIZE_CAP_SANDWICH}")
        self.n = n
        self.masks = z_symmetry_masks([p.x for p, _, _ in pterms], n)
        self.blocks = _partition_blocks(n, self.masks)
        d = 1 << n
        self._g2l = np.zeros(d, dtype=np.int64)
        for blk in self.blocks:
            self._g2l[blk.astype(np.int64)] = np.arange(len(blk))
        # generators with an even number of Y factors have real signed-permutation
        # matrices, so the whole product stays real; halves memory traffic
        all_real = all((p.x & p.z).bit_count() % 2 == 0 for p, _, _ in pterms)
        self._dtype = np.float64 if all_real else np.complex128
        self._w = [np.eye(len(blk), dtype=self._dtype) for blk in self.blocks]
        self._action_cache: dict[tuple[int, int], list] = {}
        self._gate_cache: dict[tuple[int, int], list] = {}
        self._pterms = pterms
        self._real = all_real
        if schedule is not None:
            for idx, theta in schedule.gates:
                self.apply_gate(idx, theta)

    def apply_gate(self, term_index: int, theta: float) -> None:
        """Advance by one imaginary-time gate generated by a Hamiltonian term."""
        p, _, jw_sign = self._pterms[term_index]
        self._apply(p, jw_sign, theta)

    def _block_action(self, p: PauliString):
        key = (p.x, p.z)
        cached = self._action_cache.get(key)
        if cached is None:
            real_p = (p.x & p.z).bit_count() % 2 == 0
            cached = []
            for blk in self.blocks:
                src, vals = _pauli_row_action(p, blk)
                if real_p:
                    vals = vals.real.copy()
                cached.append((self._g2l[src.astype(np.int64)], vals))
            self._action_cache[key] = cached
        return cached

    def _gate_action(self, p: PauliString):
        """Per block: diagonal values, or the involution row pairing r <-> r^x."""
        key = (p.x, p.z)
        cached = self._gate_cache.get(key)
        if cached is None:
            cached = []
            for perm, vals in self._block_action(p):
                vals = vals.astype(self._dtype)
                if p.x == 0:
                    cached.append(("diag", vals))
                else:
                    local = np.arange(len(perm), dtype=np.int64)
                    low = local[local < perm]
                    high = perm[low]
                    cached.append(("pair", low, high, np.ascontiguousarray(vals[low]),
                                   np.ascontiguousarray(vals[high])))
            self._gate_cache[key] = cached
        return cached

    def _apply(self, p: PauliString, sign: float, theta: float) -> None:
        # one-sided half-angle factor: exp(-θ/2 · sign · P)
        c = math.cosh(theta / 2.0)
        s = -math.sinh(theta / 2.0) * sign
        for w, action in zip(self._w, self._gate_action(p)):
            if action[0] == "diag":
                _kernel.dense_diag_gate(w, c + s * action[1])
            else:
                _, low, high, vlow, vhigh = action
                _kernel.dense_pair_gate(w, low, high, vlow, vhigh, c, s)

    def trace(self) -> float:
        return sum(float(np.vdot(w, w).real) for w in self._w)

    def _trace_pauli(self, p: PauliString) -> float:
        # Tr(P W W†) = <W, P W>; zero when P's X-mask breaks a block symmetry
        for s in self.masks:
            if (s & p.x).bit_count() % 2:
                return 0.0
        if self._real and (p.x & p.z).bit_count() % 2:
            return 0.0  # imaginary-valued P against a real state traces to zero
        total = 0.0
        for w, action in zip(self._w, self._gate_action(p)):
            if action[0] == "diag":
                total += float(np.einsum("i,ij,ij->", action[1], w.conj(), w).real)
            else:
                _, low, high, vlow, vhigh = action
                z = np.einsum("ij,ij->i", w[low].conj(), w[high])
                total += float((vlow * z + vhigh * z.conj()).sum().real)
        return total

    def expectation(self, obs) -> float:
        obs_terms, n = _obs_pauli_terms(obs)
        if n != self.n:
            raise ValueError("observable size does not match the oracle state")
        z = self.trace()
        total = obs.identity_coeff * z
        for p, coeff in obs_terms:
            total += coeff * self._trace_pauli(p)
        return total / z


def dense_product_formula_expectation(terms, schedule: GateSchedule, obs) -> float:
    """One-shot normalized expectation under the exact dense gate sandwich."""
    return DenseSandwichState(terms, schedule).expectation(obs)
