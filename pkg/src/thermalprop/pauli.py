"""Bit-packed n-qubit Pauli strings with exact product, commutation and weight.

A Pauli string is encoded by two packed bit vectors ``x`` and ``z`` (one bit
per qubit, qubit 0 in the least significant bit).  Site ``j`` carries

    (x_j, z_j) = (0,0) -> I,  (1,0) -> X,  (1,1) -> Y,  (0,1) -> Z.

The per-site convention is ``P(x,z) = i^(x*z) * X^x * Z^z`` so that
``P(1,1) = iXZ = Y``.  Products are XORs of the bit vectors with a phase in
{+1, -1, +i, -i} accumulated mod 4.
"""

from __future__ import annotations

from dataclasses import dataclass

_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_LETTER = {v: k for k, v in _LETTER_TO_BITS.items()}

_PHASE_VALUES = (1, 1j, -1, -1j)
_PHASE_STR = ("+1", "+i", "-1", "-i")


@dataclass(frozen=True)
class Phase:
    """A power of i, i.e. one of {+1, +i, -1, -i}, closed under multiplication."""

    exponent: int  # power of i, stored mod 4

    def __post_init__(self):
        object.__setattr__(self, "exponent", self.exponent % 4)

    @property
    def value(self) -> complex:
        return _PHASE_VALUES[self.exponent]

    @property
    def is_real(self) -> bool:
        return self.exponent % 2 == 0

    def __mul__(self, other: "Phase") -> "Phase":
        return Phase(self.exponent + other.exponent)

    def conjugate(self) -> "Phase":
        return Phase(-self.exponent)

    def __repr__(self) -> str:
        return f"Phase({_PHASE_STR[self.exponent]})"


PHASE_ONE = Phase(0)
PHASE_I = Phase(1)
PHASE_MINUS_ONE = Phase(2)
PHASE_MINUS_I = Phase(3)


@dataclass(frozen=True)
class PauliString:
    """Immutable n-qubit Pauli string with packed (x, z) bit vectors.

    Supports up to 64 qubits so a string always fits two machine words.
    Canonical ordering for storage is lexicographic on (z, x).
    """

    n_qubits: int
    x: int
    z: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        if self.n_qubits > 64:
            raise ValueError("PauliString supports at most 64 qubits")
        mask = (1 << self.n_qubits) - 1
        if not (0 <= self.x <= mask and 0 <= self.z <= mask):
            raise ValueError("x/z bits out of range for n_qubits")

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def from_string(cls, text: str) -> "PauliString":
        """Parse e.g. "IXYZ" (site 0 leftmost). Rejects other characters."""
        if not text:
            raise ValueError("empty Pauli string")
        x = z = 0
        for j, ch in enumerate(text):
            if ch not in _LETTER_TO_BITS:
                raise ValueError(f"invalid Pauli letter {ch!r} at site {j}")
            xb, zb = _LETTER_TO_BITS[ch]
            x |= xb << j
            z |= zb << j
        return cls(len(text), x, z)

    @classmethod
    def from_label(cls, n_qubits: int, sites: dict[int, str]) -> "PauliString":
        """Build from a {site: letter} mapping, identity elsewhere."""
        letters = ["I"] * n_qubits
        for j, ch in sites.items():
            letters[j] = ch
        return cls.from_string("".join(letters))

    def to_string(self) -> str:
        return "".join(
            _BITS_TO_LETTER[(self.x >> j) & 1, (self.z >> j) & 1] for j in range(self.n_qubits)
        )

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def __str__(self) -> str:
        return self.to_string()


def weight(p: PauliString) -> int:
    """Number of non-identity single-qubit factors."""
    return (p.x | p.z).bit_count()


def commutes(p: PauliString, q: PauliString) -> bool:
    """True iff the number of sites where p and q differ and are both non-identity is even."""
    if p.n_qubits != q.n_qubits:
        raise ValueError("mismatched n_qubits")
    return ((p.x & q.z).bit_count() + (p.z & q.x).bit_count()) % 2 == 0


def product_phase_exponent(p: PauliString, q: PauliString) -> int:
    """Power of i in p*q = i^k * r, with r the XOR string. Branch-free popcounts."""
    x3 = p.x ^ q.x
    z3 = p.z ^ q.z
    k = (
        (p.x & p.z).bit_count()
        + (q.x & q.z).bit_count()
        - (x3 & z3).bit_count()
        + 2 * (p.z & q.x).bit_count()
    )
    return k % 4


def pauli_mul(p: PauliString, q: PauliString) -> tuple[PauliString, Phase]:
    """Product p*q as (string, phase) with string bits the XOR of the inputs."""
    if p.n_qubits != q.n_qubits:
        raise ValueError("mismatched n_qubits")
    r = PauliString(p.n_qubits, p.x ^ q.x, p.z ^ q.z)
    return r, Phase(product_phase_exponent(p, q))
