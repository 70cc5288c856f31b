"""Thermal-state simulation by imaginary-time Pauli and Majorana propagation.

Evolves the identity operator through imaginary-time gates in a sparse
operator basis, with per-gate normalization by the identity coefficient and
configurable truncation, plus exact small-system oracles and evaluators for
the analytic truncation-error bounds.
"""

from ._kernel import backend_name
from .majorana import MajoranaMonomial, length, monomial_mul
from .majorana import commutes as majorana_commutes
from .models import (
    HexTriangularLattice,
    build_fermi_hubbard_tri,
    build_heisenberg_chain,
    build_hex_lattice,
    build_j1j2,
    build_random_2local,
)
from .observables import (
    ObservableExpansion,
    czz_map,
    energy,
    energy_density,
    expectation,
    log_partition,
    spin_correlation_czz,
)
from .opmap import OperatorMap, SimulationDivergedError, TermStats, TruncationPolicy
from .pauli import PauliString, Phase, commutes, pauli_mul, weight
from .propagation import (
    GateSchedule,
    HamiltonianTerm,
    MemoryGuardError,
    apply_imaginary_gate,
    build_qdrift_schedule,
    build_trotter_schedule,
    propagate_thermal,
)

__version__ = "0.1.0"

__all__ = [
    "MajoranaMonomial",
    "length",
    "monomial_mul",
    "majorana_commutes",
    "HexTriangularLattice",
    "build_fermi_hubbard_tri",
    "build_heisenberg_chain",
    "build_hex_lattice",
    "build_j1j2",
    "build_random_2local",
    "ObservableExpansion",
    "czz_map",
    "energy",
    "energy_density",
    "expectation",
    "log_partition",
    "spin_correlation_czz",
    "OperatorMap",
    "SimulationDivergedError",
    "TermStats",
    "TruncationPolicy",
    "PauliString",
    "Phase",
    "commutes",
    "pauli_mul",
    "weight",
    "GateSchedule",
    "HamiltonianTerm",
    "MemoryGuardError",
    "apply_imaginary_gate",
    "build_qdrift_schedule",
    "build_trotter_schedule",
    "propagate_thermal",
    "backend_name",
    "__version__",
]
