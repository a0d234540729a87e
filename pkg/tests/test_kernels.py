"""The compiled and numpy kernels must agree."""
import numpy as np
import pytest

from matmech import _kernels_py
from matmech._backend import BACKEND

try:
    from matmech import _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

needs_ext = pytest.mark.skipif(_kernels_c is None, reason="compiled kernels not built")


def _random_bands(gen, size, offsets):
    data = gen.normal(size=(len(offsets), size)) + 1j * gen.normal(size=(len(offsets), size))
    for b, k in enumerate(offsets):
        if k > 0:
            data[b, size - k:] = 0
        elif k < 0:
            data[b, :-k] = 0
    return np.asarray(offsets, dtype=np.int64), data


def _out_offsets(a_off, b_off, size):
    return np.asarray(sorted({int(i + j) for i in a_off for j in b_off if abs(i + j) < size}),
                      dtype=np.int64)


def test_backend_reported():
    assert BACKEND in ("cython", "python")


@needs_ext
@pytest.mark.parametrize("size", [3, 5, 17, 65])
def test_band_product_agrees(size):
    gen = np.random.default_rng(size)
    a_off, a = _random_bands(gen, size, [-2, -1, 0, 1])
    b_off, b = _random_bands(gen, size, [-1, 1, 2])
    out = _out_offsets(a_off, b_off, size)
    np.testing.assert_allclose(
        _kernels_c.band_product(a_off, a, b_off, b, out),
        _kernels_py.band_product(a_off, a, b_off, b, out),
        atol=1e-14,
    )


@needs_ext
def test_support_series_agrees():
    gen = np.random.default_rng(7)
    s = 4
    amp = gen.normal(size=s) + 1j * gen.normal(size=s)
    elements = gen.normal(size=(s, s)) + 1j * gen.normal(size=(s, s))
    elements[1, 2] = 0
    omega = gen.normal(size=(s, s))
    times = np.linspace(0, 5, 11)
    np.testing.assert_allclose(
        _kernels_c.support_series(np.conj(amp), amp, elements, omega, times),
        _kernels_py.support_series(np.conj(amp), amp, elements, omega, times),
        atol=1e-12,
    )


def test_support_series_empty_support():
    out = _kernels_py.support_series(np.zeros(1, complex), np.zeros(1, complex),
                                     np.zeros((1, 1), complex), np.zeros((1, 1)), np.array([0.0, 1.0]))
    np.testing.assert_array_equal(out, [0, 0])


def test_env_forces_fallback():
    import os
    import subprocess
    import sys

    code = ("import matmech, numpy as np; from matmech.rotor_model import *; "
            "from matmech.operator_core import *; r = IndexRange.symmetric(6); "
            "p = PhysicalParams(); L = build_L(p, r); "
            "d = interior_view(build_L_from_xy(p, r) - L, 2).max_abs(); "
            "print(matmech.BACKEND, d)")
    env = dict(os.environ, MATMECH_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    backend, dev = out.stdout.split()
    assert backend == "python"
    assert float(dev) <= 1e-12
