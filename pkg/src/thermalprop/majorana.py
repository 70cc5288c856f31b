"""Hermitian Majorana monomials over 2N generators.

A monomial is indexed by a bit vector ``b`` over the generators (generator 1
of the usual 1-based convention lives in bit 0).  The stored object is the
Hermitian-normalized

    M_b = i^{r_b} * m_1^{b_1} * ... * m_{2N}^{b_{2N}},

where r_b = 0 when popcount(b) = 0 or 1 (mod 4) and r_b = 1 otherwise, which
makes M_b Hermitian and M_b^2 = +identity.  Products normalize back to this
convention immediately, so propagated coefficients stay real.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pauli import Phase


def hermitian_phase_exponent(bits: int) -> int:
    """r_b in {0,1}: 0 when popcount(b) = 0,1 (mod 4), 1 otherwise."""
    return (bits.bit_count() % 4) // 2


def _inversions_parity(a: int, b: int) -> int:
    """Parity of #{(p in a, q in b): p > q}, i.e. swaps moving b's generators past a's."""
    s = 0
    aa = a
    while aa:
        low = aa & -aa
        p = low.bit_length() - 1
        s += (b & ((1 << p) - 1)).bit_count()
        aa ^= low
    return s % 2


@dataclass(frozen=True)
class MajoranaMonomial:
    """Immutable Hermitian Majorana monomial on n_generators = 2N generators (<= 128)."""

    n_generators: int
    bits: int

    def __post_init__(self):
        if self.n_generators < 2 or self.n_generators % 2 != 0:
            raise ValueError("n_generators must be a positive even integer")
        if self.n_generators > 128:
            raise ValueError("MajoranaMonomial supports at most 128 generators")
        if not 0 <= self.bits < (1 << self.n_generators):
            raise ValueError("bits out of range for n_generators")

    @classmethod
    def identity(cls, n_generators: int) -> "MajoranaMonomial":
        return cls(n_generators, 0)

    @classmethod
    def from_indices(cls, n_generators: int, indices) -> "MajoranaMonomial":
        """Build from 1-based generator indices, e.g. (1, 2, 5, 6)."""
        bits = 0
        for i in indices:
            if not 1 <= i <= n_generators:
                raise ValueError(f"generator index {i} out of range")
            bits |= 1 << (i - 1)
        return cls(n_generators, bits)

    @property
    def hermitian_exponent(self) -> int:
        return hermitian_phase_exponent(self.bits)

    @property
    def is_identity(self) -> bool:
        return self.bits == 0

    def indices(self) -> tuple[int, ...]:
        """Set bits as 1-based generator indices."""
        return tuple(i + 1 for i in range(self.n_generators) if (self.bits >> i) & 1)

    def to_string(self) -> str:
        return "m{" + ",".join(str(i) for i in self.indices()) + "}"

    def __str__(self) -> str:
        return self.to_string()


def length(a: MajoranaMonomial) -> int:
    """Number of generators in the monomial (popcount of b)."""
    return a.bits.bit_count()


def commutes(a: MajoranaMonomial, b: MajoranaMonomial) -> bool:
    """True iff |a|*|b| - |a AND b| is even."""
    if a.n_generators != b.n_generators:
        raise ValueError("mismatched n_generators")
    la = a.bits.bit_count()
    lb = b.bits.bit_count()
    shared = (a.bits & b.bits).bit_count()
    return (la * lb - shared) % 2 == 0


def product_phase_exponent(a: MajoranaMonomial, b: MajoranaMonomial) -> int:
    """Power of i in M_a * M_b = i^k * M_c with c = a XOR b.

    Swap-counting over the concatenated generator sequences plus the Hermitian
    phase corrections of both factors and the result.
    """
    c = a.bits ^ b.bits
    k = (
        hermitian_phase_exponent(a.bits)
        + hermitian_phase_exponent(b.bits)
        - hermitian_phase_exponent(c)
        + 2 * _inversions_parity(a.bits, b.bits)
    )
    return k % 4


def monomial_mul(a: MajoranaMonomial, b: MajoranaMonomial) -> tuple[MajoranaMonomial, Phase]:
    """Product a*b as (canonical Hermitian monomial, phase)."""
    if a.n_generators != b.n_generators:
        raise ValueError("mismatched n_generators")
    c = MajoranaMonomial(a.n_generators, a.bits ^ b.bits)
    return c, Phase(product_phase_exponent(a, b))
