import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermalprop.pauli import PauliString, Phase, commutes, pauli_mul, weight

from dense_refs import pauli_dense

LETTERS = "IXYZ"


def all_strings(n):
    return [PauliString.from_string("".join(w)) for w in itertools.product(LETTERS, repeat=n)]


def test_single_qubit_products():
    x = PauliString.from_string("XI")
    y = PauliString.from_string("YI")
    r, ph = pauli_mul(x, y)
    assert r.to_string() == "ZI"
    assert ph.value == 1j


def test_identity_product():
    p = PauliString.from_string("XZY")
    r, ph = pauli_mul(p, PauliString.identity(3))
    assert r == p and ph.value == 1


def test_xx_times_yy():
    r, ph = pauli_mul(PauliString.from_string("XX"), PauliString.from_string("YY"))
    assert r.to_string() == "ZZ"
    assert ph.value == -1


def test_commutes_examples():
    x0 = PauliString.from_string("X")
    y0 = PauliString.from_string("Y")
    assert not commutes(x0, y0)
    assert commutes(PauliString.from_string("XI"), PauliString.from_string("IY"))
    assert commutes(PauliString.from_string("XX"), PauliString.from_string("YY"))


def test_weight_examples():
    assert weight(PauliString.identity(5)) == 0
    assert weight(PauliString.from_string("XIZ")) == 2
    assert weight(PauliString.from_string("YYY")) == 3


def test_mismatched_sizes_raise():
    with pytest.raises(ValueError):
        pauli_mul(PauliString.from_string("X"), PauliString.from_string("XX"))
    with pytest.raises(ValueError):
        commutes(PauliString.from_string("X"), PauliString.from_string("XX"))


@pytest.mark.parametrize("n", [1, 2])
def test_exhaustive_dense_agreement(n):
    strings = all_strings(n)
    mats = {s: pauli_dense(s.to_string()) for s in strings}
    for p, q in itertools.product(strings, repeat=2):
        r, ph = pauli_mul(p, q)
        assert np.allclose(mats[p] @ mats[q], ph.value * mats[r])
        dense_commute = np.allclose(mats[p] @ mats[q], mats[q] @ mats[p])
        assert commutes(p, q) == dense_commute


def test_random_dense_agreement_n4():
    rng = np.random.default_rng(7)
    strings = all_strings(1)  # reuse letters
    for _ in range(200):
        a = "".join(rng.choice(list(LETTERS), size=4))
        b = "".join(rng.choice(list(LETTERS), size=4))
        p, q = PauliString.from_string(a), PauliString.from_string(b)
        r, ph = pauli_mul(p, q)
        assert np.allclose(pauli_dense(a) @ pauli_dense(b), ph.value * pauli_dense(r.to_string()))


@given(st.integers(1, 6), st.data())
@settings(max_examples=150, deadline=None)
def test_product_properties(n, data):
    bits = st.integers(0, (1 << n) - 1)
    p = PauliString(n, data.draw(bits), data.draw(bits))
    q = PauliString(n, data.draw(bits), data.draw(bits))
    r_pq, ph_pq = pauli_mul(p, q)
    r_qp, ph_qp = pauli_mul(q, p)
    # same string both ways; phases equal iff commuting, negated otherwise
    assert r_pq == r_qp
    if commutes(p, q):
        assert ph_pq.exponent == ph_qp.exponent
        assert ph_pq.is_real
    else:
        assert (ph_pq * ph_qp.conjugate()).value == -1
    # P·P = identity with phase +1
    sq, ph_sq = pauli_mul(p, p)
    assert sq.is_identity and ph_sq.value == 1
    assert weight(r_pq) <= weight(p) + weight(q)


def test_phase_algebra():
    assert (Phase(1) * Phase(1)).value == -1
    assert Phase(3).conjugate().value == 1j
    assert Phase(2).conjugate().value == -1
    vals = {Phase(k).value for k in range(4)}
    assert vals == {1, 1j, -1, -1j}


def test_render_parse_roundtrip():
    text = "IXYZYXI"
    assert PauliString.from_string(text).to_string() == text
    with pytest.raises(ValueError):
        PauliString.from_string("IXQZ")
    with pytest.raises(ValueError):
        PauliString.from_string("")


def test_canonical_bits():
    p = PauliString.from_string("YI")
    assert (p.x, p.z) == (1, 1)
    assert PauliString.from_string("IZ").z == 2
