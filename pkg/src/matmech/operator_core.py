"""Banded complex matrices over a truncated window of integer labels.

An operator on the ladder ``n = n_min..n_max`` is stored by diagonals:
offset ``k`` holds the elements ``O[n, n+k]``. Products are computed from
in-window terms only, so rows near the window edge lose contributions from
the missing neighbours. Identities that hold on the infinite ladder are
therefore only checked on interior rows (see :func:`interior_view`).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from matmech._backend import kernels

DEFAULT_ABS_TOL = 1e-12


class BandStructureError(ValueError):
    """A band vector does not fit the index window."""


class RangeMismatchError(ValueError):
    """Operands live on different index windows."""


@dataclass(frozen=True)
class IndexRange:
    """Inclusive label window ``[n_min, n_max]``."""

    n_min: int
    n_max: int

    def __post_init__(self):
        if int(self.n_min) != self.n_min or int(self.n_max) != self.n_max:
            raise ValueError("window bounds must be integers")
        if self.n_min > self.n_max:
            raise ValueError(f"empty window [{self.n_min}, {self.n_max}]")

    @classmethod
    def symmetric(cls, N: int) -> "IndexRange":
        return cls(-int(N), int(N))

    @property
    def size(self) -> int:
        return self.n_max - self.n_min + 1

    @property
    def is_symmetric(self) -> bool:
        return self.n_min == -self.n_max

    @property
    def labels(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def __contains__(self, n) -> bool:
        return self.n_min <= n <= self.n_max

    def index(self, n: int) -> int:
        if n not in self:
            raise IndexError(f"label {n} outside window [{self.n_min}, {self.n_max}]")
        return n - self.n_min

    def row_count(self, k: int) -> int:
        """Number of rows ``n`` with both ``n`` and ``n+k`` in the window."""
        return max(self.size - abs(k), 0)

    def row_labels(self, k: int) -> np.ndarray:
        return np.arange(self.n_min + max(0, -k), self.n_max - max(0, k) + 1)


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = DEFAULT_ABS_TOL

    def __post_init__(self):
        if not self.abs_tol >= 0:
            raise ValueError("abs_tol must be non-negative")


TolLike = Union[float, Tolerance]


def _tol(tol: TolLike) -> float:
    if isinstance(tol, Tolerance):
        return tol.abs_tol
    tol = float(tol)
    if not tol >= 0:
        raise ValueError("tolerance must be non-negative")
    return tol


class BandedOperator:
    """Immutable banded complex matrix.

    Internally each band is padded to the full window length and aligned by
    row: ``_data[b, i]`` is the element at row ``n_min + i`` and column
    ``n_min + i + offsets[b]``, zero where that column is off-window. Use
    :func:`make_banded` to build one from per-band entry vectors.
    """

    __slots__ = ("range", "offsets", "_offsets_arr", "_data")

    def __init__(self, rng: IndexRange, offsets: Sequence[int], data: np.ndarray):
        offsets = tuple(int(k) for k in offsets)
        data = np.asarray(data, dtype=np.complex128)
        if data.shape != (len(offsets), rng.size):
            raise BandStructureError(
                f"band array shape {data.shape} does not match "
                f"({len(offsets)}, {rng.size})"
            )
        if list(offsets) != sorted(set(offsets)):
            raise BandStructureError("offsets must be strictly increasing")
        if any(abs(k) >= rng.size for k in offsets):
            raise BandStructureError("band offset does not fit the window")
        data = data.copy()
        for b, k in enumerate(offsets):
            # padding slots must stay zero
            if k > 0:
                data[b, rng.size - k:] = 0
            elif k < 0:
                data[b, :-k] = 0
        data.flags.writeable = False
        self.range = rng
        self.offsets = offsets
        self._offsets_arr = np.asarray(offsets, dtype=np.int64)
        self._data = data

    # -- inspection -------------------------------------------------------

    @property
    def bands(self) -> dict:
        """Map offset -> entries for the valid rows of that band."""
        return {k: self.band(k) for k in self.offsets}

    def band(self, k: int) -> np.ndarray:
        size = self.range.size
        if k not in self.offsets:
            return np.zeros(self.range.row_count(k), dtype=np.complex128)
        row = self._data[self.offsets.index(k)]
        return row[max(0, -k): size - max(0, k)].copy()

    @property
    def bandwidth(self) -> int:
        nz = [abs(k) for b, k in enumerate(self.offsets) if np.any(self._data[b])]
        return max(nz, default=0)

    def element(self, n: int, m: int) -> complex:
        i = self.range.index(n)
        self.range.index(m)
        k = m - n
        if k not in self.offsets:
            return 0j
        return complex(self._data[self.offsets.index(k), i])

    def __getitem__(self, nm) -> complex:
        n, m = nm
        return self.element(n, m)

    def to_dense(self) -> np.ndarray:
        size = self.range.size
        out = np.zeros((size, size), dtype=np.complex128)
        rows = np.arange(size)
        for b, k in enumerate(self.offsets):
            r = rows[max(0, -k): size - max(0, k)]
            out[r, r + k] = self._data[b, r]
        return out

    @classmethod
    def from_dense(cls, rng: IndexRange, matrix, drop_tol: float = 0.0) -> "BandedOperator":
        matrix = np.asarray(matrix, dtype=np.complex128)
        if matrix.shape != (rng.size, rng.size):
            raise BandStructureError("dense matrix does not match the window")
        bands = {}
        for k in range(-rng.size + 1, rng.size):
            d = np.diagonal(matrix, k)
            if np.any(np.abs(d) > drop_tol):
                bands[k] = d
        return make_banded(rng, bands)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._data), initial=0.0))

    def pruned(self, drop_tol: TolLike = 0.0) -> "BandedOperator":
        """Drop bands whose entries are all within ``drop_tol`` of zero."""
        tol = _tol(drop_tol)
        keep = [b for b in range(len(self.offsets)) if np.max(np.abs(self._data[b]), initial=0.0) > tol]
        return BandedOperator(self.range, [self.offsets[b] for b in keep], self._data[keep])

    def __repr__(self):
        return (f"BandedOperator(range=[{self.range.n_min}, {self.range.n_max}], "
                f"offsets={list(self.offsets)})")

    # -- arithmetic sugar -------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(other, -1))

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, lam):
        if isinstance(lam, BandedOperator):
            return NotImplemented
        return scale(self, lam)

    __rmul__ = __mul__

    def __truediv__(self, lam):
        return scale(self, 1.0 / lam)

    def __matmul__(self, other):
        return multiply(self, other)


# -- construction ---------------------------------------------------------

def make_banded(rng: IndexRange, bands: Mapping[int, Sequence[complex]]) -> BandedOperator:
    """Build an operator whose element ``(n, n+k)`` is ``bands[k][n - first_row]``."""
    offsets = sorted(int(k) for k in bands)
    data = np.zeros((len(offsets), rng.size), dtype=np.complex128)
    for b, k in enumerate(offsets):
        if abs(k) >= rng.size:
            raise BandStructureError(f"offset {k} does not fit a window of size {rng.size}")
        entries = np.asarray(bands[k], dtype=np.complex128).ravel()
        expected = rng.row_count(k)
        if entries.shape[0] != expected:
            raise BandStructureError(
                f"band {k} has {entries.shape[0]} entries, window allows {expected}"
            )
        data[b, max(0, -k): max(0, -k) + expected] = entries
    return BandedOperator(rng, offsets, data)


def zero(rng: IndexRange) -> BandedOperator:
    return make_banded(rng, {})


def identity(rng: IndexRange) -> BandedOperator:
    return make_banded(rng, {0: np.ones(rng.size)})


def diagonal(rng: IndexRange, values) -> BandedOperator:
    return make_banded(rng, {0: values})


# -- ring operations ------------------------------------------------------

def _check_same_range(a: BandedOperator, b: BandedOperator):
    if a.range != b.range:
        raise RangeMismatchError(f"windows differ: {a.range} vs {b.range}")


def add(a: BandedOperator, b: BandedOperator) -> BandedOperator:
    _check_same_range(a, b)
    offsets = sorted(set(a.offsets) | set(b.offsets))
    data = np.zeros((len(offsets), a.range.size), dtype=np.complex128)
    for src in (a, b):
        for j, k in enumerate(src.offsets):
            data[offsets.index(k)] += src._data[j]
    return BandedOperator(a.range, offsets, data)


def scale(a: BandedOperator, lam: complex) -> BandedOperator:
    return BandedOperator(a.range, a.offsets, a._data * complex(lam))


def multiply(a: BandedOperator, b: BandedOperator) -> BandedOperator:
    """Banded product restricted to the window.

    Element ``(n, n+k1+k2)`` accumulates ``A[n, n+k1] * B[n+k1, n+k1+k2]``
    only for intermediate labels ``n+k1`` inside the window.
    """
    _check_same_range(a, b)
    size = a.range.size
    out_off = sorted({k1 + k2 for k1 in a.offsets for k2 in b.offsets if abs(k1 + k2) < size})
    out_arr = np.asarray(out_off, dtype=np.int64)
    data = kernels.band_product(a._offsets_arr, a._data, b._offsets_arr, b._data, out_arr)
    return BandedOperator(a.range, out_off, np.asarray(data))


def adjoint(a: BandedOperator) -> BandedOperator:
    size = a.range.size
    offsets = sorted(-k for k in a.offsets)
    data = np.zeros((len(offsets), size), dtype=np.complex128)
    for j, k in enumerate(a.offsets):
        # (n, n+k) -> (n+k, n): row index shifts by k in band -k
        src = a._data[j, max(0, -k): size - max(0, k)]
        dst = data[offsets.index(-k)]
        dst[max(0, k): size - max(0, -k)] = np.conj(src)
    return BandedOperator(a.range, offsets, data)


def commutator(a: BandedOperator, b: BandedOperator) -> BandedOperator:
    return add(multiply(a, b), scale(multiply(b, a), -1))


# -- predicates -----------------------------------------------------------

def is_zero(a: BandedOperator, tol: TolLike = DEFAULT_ABS_TOL) -> bool:
    return a.max_abs() <= _tol(tol)


def is_hermitian(a: BandedOperator, tol: TolLike = DEFAULT_ABS_TOL) -> bool:
    return is_zero(add(a, scale(adjoint(a), -1)), tol)


def interior_view(a: BandedOperator, margin: int) -> BandedOperator:
    """Restrict to ``[n_min + margin, n_max - margin]``."""
    margin = int(margin)
    rng = a.range
    if margin < 0 or 2 * margin >= rng.size:
        raise ValueError(f"margin {margin} too large for a window of size {rng.size}")
    if margin == 0:
        return a
    inner = IndexRange(rng.n_min + margin, rng.n_max - margin)
    keep = [j for j, k in enumerate(a.offsets) if abs(k) < inner.size]
    data = a._data[keep, margin: rng.size - margin]
    return BandedOperator(inner, [a.offsets[j] for j in keep], data)


def max_interior_residual(a: BandedOperator, margin: int) -> float:
    return interior_view(a, margin).max_abs()
