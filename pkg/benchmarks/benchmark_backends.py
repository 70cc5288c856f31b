"""Benchmark the compiled gate kernel against the pure-numpy fallback.

Runs the same truncated imaginary-time sweep through both backends, checks
they agree, and reports per-gate timings.

    python benchmarks/benchmark_backends.py [--n 10] [--beta 0.6] [--tau 0.02]
"""

import argparse
import time

import numpy as np

import thermalprop as tp
import thermalprop._kernel as kern
from thermalprop._kernel import pykernel

try:
    from thermalprop._kernel import _core
except ImportError:
    _core = None


def run_backend(impl, terms, schedule, policy):
    original = kern.apply_gate
    kern.apply_gate = impl.apply_gate
    try:
        t0 = time.perf_counter()
        final, _ = tp.propagate_thermal(terms, schedule, policy)
        dt = time.perf_counter() - t0
    finally:
        kern.apply_gate = original
    return final, dt


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=10)
    parser.add_argument("--beta", type=float, default=0.6)
    parser.add_argument("--tau", type=float, default=0.02)
    parser.add_argument("--threshold", type=float, default=2.0**-12)
    args = parser.parse_args()

    terms = tp.build_j1j2(args.n, 1.0, 0.5)
    schedule = tp.build_trotter_schedule(terms, args.beta, args.tau)
    policy = tp.TruncationPolicy(coeff_threshold=args.threshold)
    print(f"J1-J2 n={args.n}, beta={args.beta}, tau={args.tau}, "
          f"threshold={args.threshold:g}, gates={len(schedule)}")

    results = {}
    backends = [("python", pykernel)] + ([("cython", _core)] if _core else [])
    for name, impl in backends:
        final, dt = run_backend(impl, terms, schedule, policy)
        energy = tp.energy(final, terms)
        results[name] = (final, dt, energy)
        print(f"{name:>7}: {dt:8.2f} s total, {1e3 * dt / len(schedule):7.2f} ms/gate, "
              f"{final.n_terms:>8} terms, energy {energy:+.12f}")

    if len(results) == 2:
        a, b = results["cython"][0], results["python"][0]
        agree = (np.array_equal(a.lo, b.lo) and np.array_equal(a.coef, b.coef))
        speedup = results["python"][1] / results["cython"][1]
        print(f"backends agree bit-for-bit: {agree}; cython speedup: {speedup:.1f}x")
    else:
        print("compiled kernel not built; only the python backend was timed")


if __name__ == "__main__":
    main()
