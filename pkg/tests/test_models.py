from dataclasses import dataclass

import numpy as np
import pytest

from thermalprop.majorana import length
from thermalprop.models import (
    build_fermi_hubbard_tri,
    build_heisenberg_chain,
    build_hex_lattice,
    build_j1j2,
    build_random_2local,
    fh_hopping_term_count,
    lattice_export_rows,
)
from thermalprop.oracle import hamiltonian_matrix
from thermalprop.pauli import weight

from dense_refs import fermion_lowering_dense


@dataclass
class ToyLattice:
    n_sites: int
    edges: list
    sites: list
    center_index: int = 0


def test_j1j2_counts_and_coefficients():
    terms = build_j1j2(10, 1.0, 0.5)
    assert len(terms) == 51
    assert all(t.coefficient == 1.0 for t in terms[:27])
    assert all(t.coefficient == 0.5 for t in terms[27:])
    assert all(weight(t.element) == 2 for t in terms)
    with pytest.raises(ValueError):
        build_j1j2(2, 1.0, 0.5)


def test_j1_only_chain():
    terms = build_j1j2(8, 1.0, 0.0)
    assert len(terms) == 3 * 7


def test_heisenberg_counts():
    assert len(build_heisenberg_chain(10)) == 27
    assert len(build_heisenberg_chain(10, periodic=True)) == 30


def test_random_2local_paper_configuration():
    terms = build_random_2local(10, 30, "all_to_all", seed=0)
    assert len(terms) == 30
    assert all(weight(t.element) == 2 for t in terms)
    assert all(t.coefficient in (-1.0, 1.0) for t in terms)
    assert sum(abs(t.coefficient) for t in terms) == 30.0
    keys = {(t.element.x, t.element.z) for t in terms}
    assert len(keys) == 30  # duplicates rejected


def test_random_2local_determinism_and_geometry():
    a = build_random_2local(8, 20, "nearest_neighbor", seed=5)
    b = build_random_2local(8, 20, "nearest_neighbor", seed=5)
    assert [(t.element, t.coefficient) for t in a] == [(t.element, t.coefficient) for t in b]
    for t in a:
        sites = [j for j in range(8) if t.element.to_string()[j] != "I"]
        assert len(sites) == 2 and sites[1] - sites[0] == 1


def test_random_2local_heisenberg_kind():
    terms = build_random_2local(10, None, "heisenberg_1d")
    assert len(terms) == 27 and all(t.coefficient == 1.0 for t in terms)
    terms30 = build_random_2local(10, 30, "heisenberg_1d", periodic=True)
    assert len(terms30) == 30
    with pytest.raises(ValueError):
        build_random_2local(10, 30, "heisenberg_1d")


def test_random_2local_infeasible():
    with pytest.raises(ValueError):
        build_random_2local(3, 100, "nearest_neighbor", seed=0)


def test_hex_lattice_counts():
    for rings, n_sites in [(0, 1), (1, 7), (2, 19), (3, 37)]:
        lat = build_hex_lattice(rings)
        assert lat.n_sites == n_sites
        assert lat.n_sites == 1 + 3 * rings * (rings + 1)
    assert build_hex_lattice(0).edges == []


def test_hex_lattice_degrees():
    lat = build_hex_lattice(2)
    deg = lat.degrees()
    assert deg[lat.center_index] == 6
    # interior sites (the rings=1 patch) all have degree 6
    interior = {k for k, (q, r) in enumerate(lat.axial) if max(abs(q), abs(r), abs(q + r)) <= 1}
    assert all(deg[k] == 6 for k in interior)


def test_lattice_export():
    lat = build_hex_lattice(1)
    rows = lattice_export_rows(lat)
    assert len(rows) == 7
    assert rows[0][0] == 0 and len(rows[0]) == 3


def test_fh_defaults_and_offset():
    lat = build_hex_lattice(1)
    terms, offset = build_fermi_hubbard_tri(lat)  # t=1, u=8, mu=4
    assert offset == -2.0 * 7
    assert fh_hopping_term_count(lat) == 4 * 12
    hop = terms[: fh_hopping_term_count(lat)]
    assert {abs(t.coefficient) for t in hop} == {0.5}
    assert all(length(t.element) == 2 for t in hop)
    rest = terms[fh_hopping_term_count(lat):]
    assert all(length(t.element) == 4 for t in rest)  # mu = u/2 cancels the pair terms
    assert all(length(t.element) in (2, 4) for t in terms)


def test_fh_single_site_spectrum():
    toy = ToyLattice(1, [], [(0.0, 0.0)])
    terms, offset = build_fermi_hubbard_tri(toy, t=1.0, u=8.0, mu=3.0)
    h = hamiltonian_matrix(terms) + offset * np.eye(4)
    assert np.allclose(sorted(np.linalg.eigvalsh(h)), sorted([0.0, -3.0, -3.0, 2.0]))


@pytest.mark.parametrize("n_sites,edges", [(2, [(0, 1)]), (3, [(0, 1), (1, 2), (0, 2)])])
def test_fh_matches_second_quantized(n_sites, edges):
    t, u, mu = 0.7, 2.3, 0.9
    toy = ToyLattice(n_sites, edges, [(float(k), 0.0) for k in range(n_sites)])
    terms, offset = build_fermi_hubbard_tri(toy, t, u, mu)
    h = hamiltonian_matrix(terms) + offset * np.eye(4**n_sites)
    assert np.allclose(h, h.conj().T)

    n_modes = 2 * n_sites
    a = [fermion_lowering_dense(n_modes, k) for k in range(n_modes)]
    href = np.zeros_like(h)
    for i, j in edges:
        for s in (0, 1):
            p, q = 2 * i + s, 2 * j + s
            href += -t * (a[p].conj().T @ a[q] + a[q].conj().T @ a[p])
    for i in range(n_sites):
        nu = a[2 * i].conj().T @ a[2 * i]
        nd = a[2 * i + 1].conj().T @ a[2 * i + 1]
        href += u * (nu @ nd) - mu * (nu + nd)
    assert np.abs(h - href).max() < 1e-12


def test_fh_empty_lattice_rejected():
    with pytest.raises(ValueError):
        build_fermi_hubbard_tri(ToyLattice(0, [], []))
