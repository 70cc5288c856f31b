import math
from fractions import Fraction
from math import comb

import pytest

from thermalprop.bounds import (
    BoundInputs,
    GateEnsemble,
    empirical_backflow,
    pbf_all_to_all,
    pbf_nn,
    reference_string,
    thm1_small_angle_bound,
    thm2_weight_bound,
    thm3_trotter_bound,
    trotter_commutator_sum,
)
from thermalprop.pauli import PauliString, weight
from thermalprop.propagation import HamiltonianTerm


def test_thm1_values():
    b = thm1_small_angle_bound(1.0, 5)
    assert b.epsilon == pytest.approx(2.449e-3, rel=1e-3)
    assert b.normalized == pytest.approx(2 * b.epsilon / (1 - b.epsilon), abs=1e-15)
    assert thm1_small_angle_bound(0.0, 3).epsilon == 0.0


def test_thm1_monotone_beyond_threshold():
    bl = 1.0
    ks = range(3, 12)  # k > e·βΛ/2 ≈ 1.36
    vals = [thm1_small_angle_bound(bl, k).epsilon for k in ks]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_thm1_infinite_marker():
    b = thm1_small_angle_bound(20.0, 1)
    assert b.epsilon >= 1.0 and math.isinf(b.normalized)


def test_pbf_all_to_all_trivial_and_exact():
    assert pbf_all_to_all(0, 10) == 0.0
    assert pbf_all_to_all(1, 10) == 0.0
    # closed form equals the exact conditional probability by direct counting:
    # commuting gates = 9C(n,2) - [6w(n-w) + 4C(w,2)], decaying = C(w,2)
    for n in (4, 6, 10):
        for w in range(2, n + 1):
            commuting = 9 * comb(n, 2) - (6 * w * (n - w) + 4 * comb(w, 2))
            expected = Fraction(comb(w, 2), commuting)
            assert pbf_all_to_all(w, n) == pytest.approx(float(expected), abs=1e-15)
    assert pbf_all_to_all(4, 10) == pytest.approx(6 / 237, abs=1e-15)
    assert pbf_all_to_all(2, 2) == pytest.approx(1 / 5, abs=1e-15)


def test_pbf_all_to_all_domain_error_via_prefactor():
    with pytest.raises(ValueError):
        pbf_all_to_all(5, 6, alpha=3.0)


def test_pbf_nn():
    assert pbf_nn(1, 9) == 0.0
    assert pbf_nn(3, 9) == pytest.approx(2 / 45, abs=1e-15)
    with pytest.raises(ValueError):
        pbf_nn(8, 10)  # 9M = 90 <= 96 = 12w


def test_thm2():
    assert thm2_weight_bound(BoundInputs(beta_lambda=1.0, pbf=0.0, m=3)) == 0.0
    val = thm2_weight_bound(BoundInputs(beta_lambda=1.0, pbf=0.1, m=3, obs_one_norm=1.0))
    assert val == pytest.approx(1.534e-4, rel=1e-3)
    vals = [
        thm2_weight_bound(BoundInputs(beta_lambda=1.0, pbf=0.1, m=m)) for m in range(1, 6)
    ]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        thm2_weight_bound(BoundInputs(beta_lambda=100.0, pbf=1.0, m=1))


def test_thm3():
    zero = thm3_trotter_bound(BoundInputs(beta=0.0, k=4, term_weight=2, degree=3, n_terms=10))
    assert zero == 0.0
    val = thm3_trotter_bound(
        BoundInputs(obs_one_norm=1.0, c1=1.0, c2=1.0, beta=0.01, n_terms=30,
                    degree=4, term_weight=2, k=6)
    )
    assert val == pytest.approx(6.91e-4, rel=1e-3)
    half_c2 = thm3_trotter_bound(
        BoundInputs(obs_one_norm=1.0, c1=1.0, c2=0.5, beta=0.01, n_terms=30,
                    degree=4, term_weight=2, k=6)
    )
    assert half_c2 == pytest.approx(val * 2 ** (-6 / 2), rel=1e-12)
    with pytest.raises(ValueError):
        thm3_trotter_bound(BoundInputs(c1=0.0))


def test_trotter_commutator_sum():
    zz = [HamiltonianTerm(PauliString.from_string("ZZI"), 1.0),
          HamiltonianTerm(PauliString.from_string("IZZ"), 2.0)]
    assert trotter_commutator_sum(zz) == 0.0
    xz = [HamiltonianTerm(PauliString.from_string("X"), 1.0),
          HamiltonianTerm(PauliString.from_string("Z"), 1.0)]
    assert trotter_commutator_sum(xz) == 2.0
    scaled = [HamiltonianTerm(t.element, 3.0 * t.coefficient) for t in xz]
    assert trotter_commutator_sum(scaled) == 9.0 * 2.0


def test_reference_string_placements():
    ref = reference_string(10, 4, "contiguous")
    assert weight(ref) == 4 and ref.to_string().startswith("ZZZZ")
    ref = reference_string(10, 4, "dispersed")
    assert weight(ref) == 4
    sites = [j for j, ch in enumerate(ref.to_string()) if ch != "I"]
    assert max(b - a for a, b in zip(sites, sites[1:])) >= 2
    with pytest.raises(ValueError):
        reference_string(3, 4)


def test_exhaustive_matches_closed_form():
    for n in (4, 6, 10):
        for w in range(2, min(n, 6) + 1):
            est = empirical_backflow(w, GateEnsemble("all_to_all", n), exhaustive=True)
            assert est.estimate == pytest.approx(pbf_all_to_all(w, n), abs=1e-12)
            assert est.stderr == 0.0


def test_exhaustive_w_zero_and_one():
    for w in (0, 1):
        est = empirical_backflow(w, GateEnsemble("all_to_all", 6), exhaustive=True)
        assert est.estimate == 0.0


def test_nn_monte_carlo_below_bound():
    for w in (2, 3, 4):
        est = empirical_backflow(w, GateEnsemble("nearest_neighbor", 10),
                                 samples=20_000, seed=11)
        bound = pbf_nn(w, 9)
        assert est.estimate <= bound + 3 * est.stderr


def test_mc_with_term_list_and_zero_commuting():
    terms = [HamiltonianTerm(PauliString.from_string("XX"), 1.0),
             HamiltonianTerm(PauliString.from_string("ZZ"), -1.0)]
    est = empirical_backflow(2, terms, samples=500, seed=0)
    assert 0.0 <= est.estimate <= 1.0
    anti = [HamiltonianTerm(PauliString.from_string("XII"), 1.0)]
    with pytest.raises(ZeroDivisionError):
        empirical_backflow(1, anti, samples=50, seed=0)


def test_mc_is_consistent_with_exhaustive():
    ens = GateEnsemble("all_to_all", 8)
    exact = empirical_backflow(4, ens, exhaustive=True).estimate
    est = empirical_backflow(4, ens, samples=200_000, seed=5)
    assert abs(est.estimate - exact) <= 4 * est.stderr


def test_bounds_monotone_in_beta():
    eps = [thm1_small_angle_bound(bl, 4).epsilon for bl in (0.2, 0.5, 1.0, 2.0)]
    assert all(a < b for a, b in zip(eps, eps[1:]))
    t2 = [thm2_weight_bound(BoundInputs(beta_lambda=bl, pbf=0.05, m=4))
          for bl in (0.2, 0.5, 1.0, 2.0)]
    assert all(a < b for a, b in zip(t2, t2[1:]))
    t3 = [thm3_trotter_bound(BoundInputs(beta=b, n_terms=10, degree=3, term_weight=2, k=4))
          for b in (0.01, 0.02, 0.05)]
    assert all(a < b for a, b in zip(t3, t3[1:]))
