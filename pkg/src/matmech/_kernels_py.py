"""Pure numpy kernels. Reference implementation for ``_kernels_c``.

Both backends share one storage convention: an operator over a window of
``size`` labels is a sorted int64 offset vector plus a complex128 array of
shape ``(len(offsets), size)`` where ``data[b, i]`` is the element at row
``i`` and column ``i + offsets[b]`` (zero when that column is off-window).
"""
import numpy as np


def band_product(a_off, a_data, b_off, b_data, out_off):
    size = a_data.shape[1]
    lookup = {int(k): j for j, k in enumerate(out_off)}
    out = np.zeros((len(out_off), size), dtype=np.complex128)
    for i, k1 in enumerate(a_off):
        k1 = int(k1)
        for j, k2 in enumerate(b_off):
            k = k1 + int(k2)
            if abs(k) >= size:
                continue
            lo = max(0, -k1, -k)
            hi = size - max(0, k1, k)
            if hi <= lo:
                continue
            out[lookup[k], lo:hi] += a_data[i, lo:hi] * b_data[j, lo + k1:hi + k1]
    return out


def support_series(conj_amp, amp, elements, omega, times):
    """Sum ``conj(c_n) c_m O_nm exp(i w_nm t)`` over the support for each t."""
    weights = conj_amp[:, None] * amp[None, :] * elements
    mask = weights != 0
    w = weights[mask]
    om = omega[mask]
    if w.size == 0:
        return np.zeros(len(times), dtype=np.complex128)
    phases = np.exp(1j * np.outer(times, om))
    # row-wise reduction keeps each time point independent of the others
    return (phases * w[None, :]).sum(axis=1)
