"""Compare the compiled and numpy kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Reports the best-of-``repeat`` wall time per call for the banded product
(x @ p_y, as used by every commutator) and for an expectation trajectory.
"""
import argparse
import timeit

import numpy as np

from matmech import _kernels_py
from matmech.heisenberg_dynamics import AmplitudeState
from matmech.operator_core import IndexRange
from matmech.rotor_model import PhysicalParams, bohr_frequencies, build_momenta, build_xy

try:
    from matmech import _kernels_c
except ImportError:
    _kernels_c = None


def product_args(N):
    rng = IndexRange.symmetric(N)
    p = PhysicalParams()
    x, _ = build_xy(p, rng)
    _, p_y = build_momenta(p, rng)
    size = rng.size
    out = np.asarray(sorted({a + b for a in x.offsets for b in p_y.offsets if abs(a + b) < size}),
                     dtype=np.int64)
    return (x._offsets_arr, x._data, p_y._offsets_arr, p_y._data, out)


def series_args(support, steps):
    rng = IndexRange.symmetric(max(support) + 4)
    p = PhysicalParams()
    state = AmplitudeState.normalized({n: 1.0 + 0.1j * n for n in support})
    x, _ = build_xy(p, rng)
    labels = state.support
    block = np.array([[x.element(n, m) for m in labels] for n in labels])
    omega = np.ascontiguousarray(bohr_frequencies(p, rng).matrix(labels))
    amp = state.vector()
    return (np.conj(amp), amp, block, omega, np.linspace(0, 20, steps))


def best(fn, args, repeat, number):
    return min(timeit.repeat(lambda: fn(*args), repeat=repeat, number=number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    opts = ap.parse_args()
    backends = [("python", _kernels_py)]
    if _kernels_c is not None:
        backends.append(("cython", _kernels_c))
    else:
        print("compiled kernels not built; showing the numpy fallback only")

    print(f"{'kernel':<32}{'backend':<10}{'time/call':>14}{'speedup':>10}")
    cases = [(f"band_product N={N}", "band_product", product_args(N), 200 if N < 1000 else 20)
             for N in (32, 256, 4096)]
    cases += [(f"support_series s={len(s)} T={T}", "support_series", series_args(s, T), 50)
              for s, T in (((1, 2), 1001), (tuple(range(-5, 6)), 1001), (tuple(range(-5, 6)), 100000))]
    for label, name, args, number in cases:
        ref = None
        for bname, mod in backends:
            t = best(getattr(mod, name), args, opts.repeat, number)
            ref = ref or t
            print(f"{label:<32}{bname:<10}{t * 1e6:>12.1f}us{ref / t:>9.1f}x")


if __name__ == "__main__":
    main()
