"""Operators of the planar rotor in the basis where ``L`` is diagonal."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from matmech.operator_core import (
    BandedOperator,
    IndexRange,
    diagonal,
    make_banded,
    multiply,
)


@dataclass(frozen=True)
class PhysicalParams:
    hbar: float = 1.0
    mass_mu: float = 1.0
    radius_r: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass_mu", "radius_r"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    @property
    def inertia_I(self) -> float:
        return self.mass_mu * self.radius_r**2


def level_energy(l_over_hbar, params: PhysicalParams):
    """Rotor energy for angular momentum ``l_over_hbar * hbar``.

    Every energy in the package goes through this expression so that the
    spectrum obtained by different routes agrees bit for bit.
    """
    return params.hbar**2 * l_over_hbar**2 / (2 * params.mass_mu * params.radius_r**2)


@dataclass(frozen=True)
class SpectrumTable:
    n: np.ndarray
    energy: np.ndarray

    def __iter__(self):
        return iter(zip(self.n.tolist(), self.energy.tolist()))

    def __len__(self):
        return len(self.n)

    def energy_of(self, n: int) -> float:
        hits = np.flatnonzero(self.n == n)
        if hits.size == 0:
            raise KeyError(n)
        return float(self.energy[hits[0]])


@dataclass(frozen=True)
class FrequencyTable:
    """Bohr frequencies ``omega[n, m] = (E_n - E_m) / hbar`` on a window.

    When the levels are rotor levels (``levels[i] = L[n, n] / hbar``) the
    difference is taken in factored form ``hbar (l_n - l_m)(l_n + l_m) / 2I``,
    which avoids cancelling two large energies.
    """

    range: IndexRange
    energies: np.ndarray = field(repr=False)
    hbar: float = 1.0
    levels: Optional[np.ndarray] = field(default=None, repr=False)
    params: Optional[PhysicalParams] = None

    def _diff(self, ln, lm, en, em):
        if self.levels is None:
            return (en - em) / self.hbar
        p = self.params
        return p.hbar * ((ln - lm) * (ln + lm)) / (2 * p.mass_mu * p.radius_r**2)

    def omega(self, n: int, m: int) -> float:
        i, j = self.range.index(n), self.range.index(m)
        lv = self.levels if self.levels is not None else self.energies
        return float(self._diff(lv[i], lv[j], self.energies[i], self.energies[j]))

    __call__ = omega

    def band(self, k: int) -> np.ndarray:
        """Row-aligned ``omega[n, n+k]`` for every row of the window (0 off-window)."""
        size = self.range.size
        out = np.zeros(size)
        lo, hi = max(0, -k), size - max(0, k)
        lv = self.levels if self.levels is not None else self.energies
        out[lo:hi] = self._diff(lv[lo:hi], lv[lo + k:hi + k],
                                self.energies[lo:hi], self.energies[lo + k:hi + k])
        return out

    def matrix(self, labels) -> np.ndarray:
        idx = np.array([self.range.index(int(n)) for n in labels], dtype=int)
        lv = (self.levels if self.levels is not None else self.energies)[idx]
        e = self.energies[idx]
        return self._diff(lv[:, None], lv[None, :], e[:, None], e[None, :])


class Trig(NamedTuple):
    sin_phi: BandedOperator
    cos_phi: BandedOperator


class XY(NamedTuple):
    x: BandedOperator
    y: BandedOperator


class Momenta(NamedTuple):
    p_x: BandedOperator
    p_y: BandedOperator


def build_L(params: PhysicalParams, rng: IndexRange) -> BandedOperator:
    return diagonal(rng, rng.labels * params.hbar)


def build_trig(rng: IndexRange) -> Trig:
    """``cos phi`` has 1/2 on both neighbours; ``sin phi`` has ``i/2`` above and ``-i/2`` below."""
    cnt = rng.row_count(1)
    half = np.full(cnt, 0.5)
    cos_phi = make_banded(rng, {1: half, -1: half})
    sin_phi = make_banded(rng, {1: 0.5j * np.ones(cnt), -1: -0.5j * np.ones(cnt)})
    return Trig(sin_phi, cos_phi)


def build_xy(params: PhysicalParams, rng: IndexRange) -> XY:
    sin_phi, cos_phi = build_trig(rng)
    return XY(cos_phi * params.radius_r, sin_phi * params.radius_r)


def spectrum(params: PhysicalParams, rng: IndexRange) -> SpectrumTable:
    n = rng.labels
    return SpectrumTable(n=n, energy=level_energy(n.astype(float), params))


def bohr_frequencies(params: PhysicalParams, rng: IndexRange) -> FrequencyTable:
    return FrequencyTable(rng, spectrum(params, rng).energy, params.hbar,
                          levels=rng.labels.astype(float), params=params)


def _times_i_mu_omega(op: BandedOperator, params: PhysicalParams, freqs: FrequencyTable) -> BandedOperator:
    data = np.array(op._data)
    for b, k in enumerate(op.offsets):
        data[b] *= 1j * params.mass_mu * freqs.band(k)
    return BandedOperator(op.range, op.offsets, data)


def build_momenta(params: PhysicalParams, rng: IndexRange) -> Momenta:
    """``p[n, m] = i mu omega[n, m] q[n, m]`` for ``q`` in ``(x, y)``."""
    freqs = bohr_frequencies(params, rng)
    x, y = build_xy(params, rng)
    return Momenta(_times_i_mu_omega(x, params, freqs), _times_i_mu_omega(y, params, freqs))


def build_H(params: PhysicalParams, rng: IndexRange, check: bool = True) -> BandedOperator:
    h = diagonal(rng, spectrum(params, rng).energy)
    if check:
        L = build_L(params, rng)
        via_square = multiply(L, L) / (2 * params.inertia_I)
        dev = (via_square - h).max_abs()
        scale = max(h.max_abs(), 1.0)
        if dev > 1e-14 * scale:
            raise ArithmeticError(f"L^2/2I disagrees with the closed-form spectrum by {dev:g}")
    return h


def build_L_from_xy(params: PhysicalParams, rng: IndexRange) -> BandedOperator:
    """``L = x p_y - y p_x`` as a banded product (edge rows are truncated)."""
    x, y = build_xy(params, rng)
    p_x, p_y = build_momenta(params, rng)
    return multiply(x, p_y) - multiply(y, p_x)


@dataclass(frozen=True)
class SelectionRuleReport:
    passed: bool
    offsets: tuple
    violations: tuple  # ((n, m, value), ...)


def selection_rule_check(op: BandedOperator, freqs: FrequencyTable, tol: float = 0.0) -> SelectionRuleReport:
    """Check that nonzero elements only connect neighbouring labels.

    For those elements ``omega[n, m]`` is then the neighbour frequency
    ``+-omega[n, n+-1]``; every other nonzero element is reported.
    """
    if freqs.range != op.range:
        raise ValueError("frequency table and operator use different windows")
    present = []
    violations = []
    for k, entries in op.bands.items():
        nz = np.flatnonzero(np.abs(entries) > tol)
        if nz.size == 0:
            continue
        present.append(k)
        if abs(k) == 1:
            continue
        rows = op.range.row_labels(k)
        for i in nz:
            n = int(rows[i])
            violations.append((n, n + k, complex(entries[i])))
    violations.sort(key=lambda v: (v[0], v[1]))
    return SelectionRuleReport(not violations, tuple(sorted(present)), tuple(violations))
