"""Independent dense-matrix references for the test suite.

Built directly from kron products of 2x2 matrices so they share no code with
the library's packed-bit implementations (site 0 lives in the least
significant bit of the computational index).
"""

import numpy as np

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SITE = {"I": I2, "X": SX, "Y": SY, "Z": SZ}


def pauli_dense(text: str) -> np.ndarray:
    m = np.array([[1.0]], dtype=complex)
    for ch in reversed(text):
        m = np.kron(m, SITE[ch])
    return m


def majorana_generator_dense(n_modes: int, g: int) -> np.ndarray:
    """Jordan-Wigner generator matrices: even g -> Z..ZX, odd g -> Z..ZY."""
    j = g // 2
    letters = ["Z"] * j + ["X" if g % 2 == 0 else "Y"] + ["I"] * (n_modes - j - 1)
    return pauli_dense("".join(letters))


def majorana_monomial_dense(n_generators: int, bits: int) -> np.ndarray:
    from thermalprop.majorana import hermitian_phase_exponent

    n_modes = n_generators // 2
    m = np.eye(2**n_modes, dtype=complex)
    for g in range(n_generators):
        if (bits >> g) & 1:
            m = m @ majorana_generator_dense(n_modes, g)
    return (1j) ** hermitian_phase_exponent(bits) * m


def fermion_lowering_dense(n_modes: int, k: int) -> np.ndarray:
    """Standard JW ladder operator for mode k (a|1> = |0>)."""
    lower = np.array([[0, 1], [0, 0]], dtype=complex)
    ops = [SZ] * k + [lower] + [I2] * (n_modes - k - 1)
    m = np.array([[1.0]], dtype=complex)
    for o in reversed(ops):
        m = np.kron(m, o)
    return m
