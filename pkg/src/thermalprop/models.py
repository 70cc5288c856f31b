"""Hamiltonian and lattice builders: Heisenberg/J1-J2 chains, random 2-local
models, and the Fermi-Hubbard model on a hexagonal patch of the triangular
lattice (spinful fermions, 2 modes per site, 4 Majorana generators per site).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .majorana import MajoranaMonomial
from .pauli import PauliString
from .propagation import HamiltonianTerm

_LETTERS = ("X", "Y", "Z")


def _two_site_pauli(n: int, i: int, a: str, j: int, b: str) -> PauliString:
    return PauliString.from_label(n, {i: a, j: b})


def build_heisenberg_chain(n: int, coupling: float = 1.0, periodic: bool = False):
    """XX+YY+ZZ per bond with a uniform coupling; open chain by default."""
    if n < 2:
        raise ValueError("need at least 2 sites")
    edges = [(i, i + 1) for i in range(n - 1)]
    if periodic:
        edges.append((n - 1, 0))
    terms = []
    for i, j in edges:
        for letter in _LETTERS:
            terms.append(HamiltonianTerm(_two_site_pauli(n, i, letter, j, letter), coupling))
    return terms


def build_j1j2(n: int, j1: float = 1.0, j2: float = 0.5):
    """Open chain with nearest-neighbor exchange J1 and next-nearest J2.

    Emits the 3(n-1) J1 terms first (edge-major, X/Y/Z) and then the 3(n-2)
    J2 terms; that construction order is also the default Trotter order.
    """
    if n < 3:
        raise ValueError("J1-J2 chain needs at least 3 sites")
    terms = []
    for i in range(n - 1):
        for letter in _LETTERS:
            terms.append(HamiltonianTerm(_two_site_pauli(n, i, letter, i + 1, letter), j1))
    if j2 != 0.0:
        for i in range(n - 2):
            for letter in _LETTERS:
                terms.append(HamiltonianTerm(_two_site_pauli(n, i, letter, i + 2, letter), j2))
    return terms


def build_random_2local(
    n: int,
    n_terms: int,
    geometry: str,
    seed: int | None = None,
    periodic: bool = False,
):
    """Weight-2 Pauli Hamiltonians used by the truncation benchmarks.

    all_to_all / nearest_neighbor draw distinct weight-2 strings (uniform pair,
    uniform letter pair) with coefficients ±1; duplicates are resampled.
    heisenberg_1d is the deterministic all-+1 chain, in which case n_terms must
    match the 3-per-bond count (or be None).
    """
    if n < 2:
        raise ValueError("need at least 2 qubits")
    if geometry == "heisenberg_1d":
        terms = build_heisenberg_chain(n, 1.0, periodic=periodic)
        if n_terms is not None and n_terms != len(terms):
            raise ValueError(
                f"heisenberg_1d on n={n} has exactly {len(terms)} terms, got n_terms={n_terms}"
            )
        return terms
    if geometry == "all_to_all":
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    elif geometry == "nearest_neighbor":
        pairs = [(i, i + 1) for i in range(n - 1)]
        if periodic:
            pairs.append((n - 1, 0))
    else:
        raise ValueError(f"unknown geometry {geometry!r}")
    capacity = 9 * len(pairs)
    if not 1 <= n_terms <= capacity:
        raise ValueError(f"n_terms={n_terms} infeasible for {geometry} on n={n} (max {capacity})")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    seen = set()
    terms = []
    while len(terms) < n_terms:
        i, j = pairs[rng.integers(len(pairs))]
        a = _LETTERS[rng.integers(3)]
        b = _LETTERS[rng.integers(3)]
        p = _two_site_pauli(n, i, a, j, b)
        key = (p.x, p.z)
        if key in seen:
            continue
        seen.add(key)
        coeff = 1.0 if rng.integers(2) else -1.0
        terms.append(HamiltonianTerm(p, coeff))
    return terms


@dataclass
class HexTriangularLattice:
    """Hexagonal patch of a triangular lattice: 1 + 3·rings·(rings+1) sites."""

    rings: int
    axial: list[tuple[int, int]]
    sites: list[tuple[float, float]]
    edges: list[tuple[int, int]]
    center_index: int

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def degrees(self) -> list[int]:
        deg = [0] * self.n_sites
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg


def build_hex_lattice(rings: int) -> HexTriangularLattice:
    """Axial-coordinate hexagonal patch with nearest-neighbor edges."""
    if rings < 0:
        raise ValueError("rings must be non-negative")
    axial = sorted(
        (q, r)
        for q in range(-rings, rings + 1)
        for r in range(-rings, rings + 1)
        if abs(q + r) <= rings
    )
    index = {qr: k for k, qr in enumerate(axial)}
    sites = [(q + r / 2.0, r * math.sqrt(3.0) / 2.0) for q, r in axial]
    neighbor_offsets = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)]
    edges = set()
    for (q, r), k in index.items():
        for dq, dr in neighbor_offsets:
            other = index.get((q + dq, r + dr))
            if other is not None:
                edges.add((min(k, other), max(k, other)))
    return HexTriangularLattice(rings, axial, sites, sorted(edges), index[(0, 0)])


def lattice_export_rows(lattice: HexTriangularLattice):
    """(site_index, x, y) rows consumed by the figure scripts."""
    return [(k, x, y) for k, (x, y) in enumerate(lattice.sites)]


# --- Fermi-Hubbard on a lattice --------------------------------------------
#
# Mode ordering is site-major with spin-up before spin-down, and each mode k
# owns generators (2k, 2k+1).  With n = (1 + M_pair)/2 the pieces are:
#   hopping edge (i,j), spin s:  -t/2 on {x_p, y_q}  and  +t/2 on {y_p, x_q}
#   on-site:  (U/4 - mu/2) on each mode pair, -U/4 on the 4-generator monomial
#   scalars:  U/4 - mu per site, aggregated into identity_offset


def _mode(site: int, spin: int) -> int:
    return 2 * site + spin


def _pair_bits(mode: int) -> int:
    return 0b11 << (2 * mode)


def number_operator_monomial(n_generators: int, mode: int) -> MajoranaMonomial:
    """M with n_mode = (1 + M)/2, i.e. the Hermitian i·x_k·y_k pair monomial."""
    return MajoranaMonomial(n_generators, _pair_bits(mode))


def fh_n_generators(lattice) -> int:
    return 4 * lattice.n_sites


def fh_site_number_monomials(lattice, site: int):
    """(spin-up pair monomial, spin-down pair monomial) for one site."""
    ng = fh_n_generators(lattice)
    up = number_operator_monomial(ng, _mode(site, 0))
    dn = number_operator_monomial(ng, _mode(site, 1))
    return up, dn


def fh_hopping_term_count(lattice) -> int:
    """Hopping terms come first in build_fermi_hubbard_tri's output."""
    return 4 * len(lattice.edges)


def build_fermi_hubbard_tri(lattice, t: float = 1.0, u: float = 8.0, mu: float = 4.0):
    """Spinful Fermi-Hubbard terms in the Majorana basis plus the scalar offset.

    Returns (terms, identity_offset); the offset (U/4 - mu per site) is excluded
    from propagation and must be added back when reporting energies.
    """
    if lattice.n_sites == 0:
        raise ValueError("empty lattice")
    ng = fh_n_generators(lattice)
    terms = []
    for i, j in lattice.edges:
        for spin in (0, 1):
            p = _mode(i, spin)
            q = _mode(j, spin)
            m1 = MajoranaMonomial(ng, (1 << (2 * p)) | (1 << (2 * q + 1)))
            m2 = MajoranaMonomial(ng, (1 << (2 * p + 1)) | (1 << (2 * q)))
            terms.append(HamiltonianTerm(m1, -t / 2.0))
            terms.append(HamiltonianTerm(m2, t / 2.0))
    c2 = u / 4.0 - mu / 2.0
    for site in range(lattice.n_sites):
        up, dn = fh_site_number_monomials(lattice, site)
        if c2 != 0.0:
            terms.append(HamiltonianTerm(up, c2))
            terms.append(HamiltonianTerm(dn, c2))
        terms.append(HamiltonianTerm(MajoranaMonomial(ng, up.bits | dn.bits), -u / 4.0))
    identity_offset = (u / 4.0 - mu) * lattice.n_sites
    return terms, identity_offset
