# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Same signatures and storage layout as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def band_product(const cnp.int64_t[:] a_off, a_data, const cnp.int64_t[:] b_off, b_data,
                 const cnp.int64_t[:] out_off):
    cdef Py_ssize_t size = a_data.shape[1]
    cdef Py_ssize_t na = a_off.shape[0], nb = b_off.shape[0], nout = out_off.shape[0]
    cdef Py_ssize_t i, j, r, lo, hi, idx
    cdef long k1, k, kmin
    cdef double ar, ai, br, bi
    out = np.zeros((nout, 2 * size), dtype=np.float64)
    if nout == 0:
        return out.view(np.complex128)
    # interleaved (re, im) doubles; row b holds band b
    cdef const double[:, ::1] A = np.ascontiguousarray(a_data).view(np.float64)
    cdef const double[:, ::1] B = np.ascontiguousarray(b_data).view(np.float64)
    cdef double[:, ::1] O = out
    kmin = out_off[0]
    cdef cnp.int64_t[::1] table = np.full(out_off[nout - 1] - kmin + 1, -1, dtype=np.int64)
    for idx in range(nout):
        table[out_off[idx] - kmin] = idx
    for i in range(na):
        k1 = a_off[i]
        for j in range(nb):
            k = k1 + b_off[j]
            if k >= size or -k >= size:
                continue
            lo = 0
            if -k1 > lo:
                lo = -k1
            if -k > lo:
                lo = -k
            hi = size
            if k1 > 0:
                hi = size - k1
            if k > 0 and size - k < hi:
                hi = size - k
            idx = table[k - kmin]
            for r in range(lo, hi):
                ar = A[i, 2 * r]
                ai = A[i, 2 * r + 1]
                br = B[j, 2 * (r + k1)]
                bi = B[j, 2 * (r + k1) + 1]
                O[idx, 2 * r] += ar * br - ai * bi
                O[idx, 2 * r + 1] += ar * bi + ai * br
    return out.view(np.complex128)


def support_series(conj_amp, amp, elements, omega, times):
    weights = (np.asarray(conj_amp)[:, None] * np.asarray(amp)[None, :]
               * np.asarray(elements)).ravel()
    keep = np.flatnonzero(weights != 0)
    cdef const double[::1] wr = np.ascontiguousarray(weights[keep].real)
    cdef const double[::1] wi = np.ascontiguousarray(weights[keep].imag)
    cdef const double[::1] om = np.ascontiguousarray(np.asarray(omega, dtype=np.float64).ravel()[keep])
    cdef const double[::1] ts = np.ascontiguousarray(times, dtype=np.float64)
    cdef Py_ssize_t nt = ts.shape[0], npair = om.shape[0], t, q
    cdef double accr, acci, c, s, ph
    out = np.zeros((nt, 2), dtype=np.float64)
    cdef double[:, ::1] o = out
    for t in range(nt):
        accr = 0.0
        acci = 0.0
        for q in range(npair):
            ph = om[q] * ts[t]
            c = cos(ph)
            s = sin(ph)
            accr += wr[q] * c - wi[q] * s
            acci += wr[q] * s + wi[q] * c
        o[t, 0] = accr
        o[t, 1] = acci
    return out.view(np.complex128).ravel()
