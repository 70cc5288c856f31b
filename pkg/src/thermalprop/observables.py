"""Expectation values against propagated states.

With the state normalized to α_I = 1 and the convention Tr[I] = 1, the
expectation of an observable O = o_I·I + Σ o_P·P over a state Σ α_P·P is
just o_I + Σ o_P·α_P; expansion terms absent from the (possibly truncated)
state contribute exactly 0.
"""

from __future__ import annotations

import math

import numpy as np

from .majorana import MajoranaMonomial, monomial_mul
from .opmap import OperatorMap, pack_element
from .pauli import PauliString


class ObservableExpansion:
    """Real linear combination of basis elements plus an identity coefficient."""

    def __init__(self, basis: str, n: int, terms=(), identity_coeff: float = 0.0):
        self.basis = basis
        self.n = n
        self.identity_coeff = float(identity_coeff)
        self._coeffs: dict[tuple[int, int], float] = {}
        self._elements: dict[tuple[int, int], object] = {}
        for element, coeff in terms:
            self.add(element, coeff)

    def add(self, element, coeff: float) -> None:
        if not math.isfinite(coeff):
            raise ValueError("non-finite observable coefficient")
        key = pack_element(element)
        if key == (0, 0):
            self.identity_coeff += coeff
            return
        self._coeffs[key] = self._coeffs.get(key, 0.0) + coeff
        self._elements[key] = element

    def items(self):
        for key, coeff in self._coeffs.items():
            yield self._elements[key], coeff

    @property
    def one_norm(self) -> float:
        """Sum of |coefficients| over the expansion, identity included."""
        return abs(self.identity_coeff) + sum(abs(c) for c in self._coeffs.values())

    @classmethod
    def single(cls, element, coeff: float = 1.0) -> "ObservableExpansion":
        if isinstance(element, PauliString):
            return cls("pauli", element.n_qubits, [(element, coeff)])
        return cls("majorana", element.n_generators, [(element, coeff)])

    @classmethod
    def from_hamiltonian(cls, terms, identity_offset: float = 0.0) -> "ObservableExpansion":
        first = terms[0]
        basis = first.basis
        n = first.element.n_qubits if basis == "pauli" else first.element.n_generators
        obs = cls(basis, n, identity_coeff=identity_offset)
        for t in terms:
            obs.add(t.element, t.coefficient)
        return obs

    def multiply(self, other: "ObservableExpansion") -> "ObservableExpansion":
        """Symbolic product of two Majorana expansions; phases must come out real."""
        if self.basis != "majorana" or other.basis != "majorana":
            raise ValueError("expansion product implemented for the Majorana basis")
        out = ObservableExpansion(self.basis, self.n)
        ident = MajoranaMonomial.identity(self.n)
        pairs = [(ident, self.identity_coeff)] + list(self.items())
        others = [(ident, other.identity_coeff)] + list(other.items())
        for a, ca in pairs:
            if ca == 0.0:
                continue
            for b, cb in others:
                if cb == 0.0:
                    continue
                prod, phase = monomial_mul(a, b)
                if not phase.is_real:
                    raise ValueError("product expansion has an imaginary phase")
                out.add(prod, ca * cb * phase.value.real)
        return out


def expectation(state: OperatorMap, obs: ObservableExpansion) -> float:
    """o_I + Σ o_P·α_P over the normalized state; missing terms contribute 0."""
    if state.basis != obs.basis or state.n != obs.n:
        raise ValueError("observable basis/size does not match the state")
    if state.identity_coeff != 1.0:
        raise ValueError("expectation requires a normalized state (α_I = 1)")
    total = obs.identity_coeff
    keys = list(obs._coeffs.items())
    if keys:
        qlo = [k[0] for k, _ in keys]
        qhi = [k[1] for k, _ in keys]
        alphas = state.lookup_packed(qlo, qhi)
        total += float(np.dot(alphas, [c for _, c in keys]))
    return total


def energy(state: OperatorMap, hamiltonian, identity_offset: float = 0.0) -> float:
    return expectation(state, ObservableExpansion.from_hamiltonian(hamiltonian)) + identity_offset


def energy_density(state, hamiltonian, identity_offset: float, n_sites: int) -> float:
    if n_sites == 0:
        raise ValueError("n_sites must be non-zero")
    return energy(state, hamiltonian, identity_offset) / n_sites


def log_partition(state: OperatorMap, n_modes: int) -> float:
    """log Tr(e^{-βH}) with the 2^n trace factor restored symbolically."""
    return n_modes * math.log(2.0) + state.accumulated_log_factor


# --- Fermi-Hubbard spin correlations ----------------------------------------


def spin_z_expansion(lattice, site: int) -> ObservableExpansion:
    """Z_j = n_up - n_down = (M_up - M_dn)/2 for one site."""
    from .models import fh_n_generators, fh_site_number_monomials

    up, dn = fh_site_number_monomials(lattice, site)
    return ObservableExpansion(
        "majorana", fh_n_generators(lattice), [(up, 0.5), (dn, -0.5)]
    )


def spin_correlation_czz(state: OperatorMap, lattice, r: int, i: int) -> float:
    """C_ZZ = <Z_r Z_i> - <Z_r><Z_i> between lattice sites r and i."""
    if state.basis != "majorana":
        raise ValueError("C_ZZ is defined on Majorana-basis states")
    n_sites = lattice.n_sites
    if not (0 <= r < n_sites and 0 <= i < n_sites):
        raise ValueError("site index out of range")
    zr = spin_z_expansion(lattice, r)
    zi = spin_z_expansion(lattice, i)
    zz = zr.multiply(zi)
    return expectation(state, zz) - expectation(state, zr) * expectation(state, zi)


def czz_map(state: OperatorMap, lattice, center: int | None = None):
    """(site_index, x, y, czz) rows against the lattice's center site."""
    c = lattice.center_index if center is None else center
    rows = []
    for k, (x, y) in enumerate(lattice.sites):
        rows.append((k, x, y, spin_correlation_czz(state, lattice, c, k)))
    return rows
