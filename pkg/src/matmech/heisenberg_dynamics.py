"""Heisenberg-picture evolution and Born-rule expectations without state vectors.

An initial condition is just a handful of labels with complex amplitudes
(or probabilities). The expectation of ``O`` at time ``t`` is the finite sum

    <O>(t) = sum_{n, m} conj(c_n) c_m O[n, m] exp(i omega[n, m] t)

over the support of the amplitudes, with ``omega[n, m] = (E_n - E_m)/hbar``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from matmech._backend import kernels
from matmech.operator_core import BandedOperator, is_hermitian
from matmech.rotor_model import FrequencyTable

NORM_TOL = 1e-12
IMAG_TOL = 1e-10


class StateError(ValueError):
    pass


def _labels_sorted(mapping: Mapping) -> tuple:
    for n in mapping:
        if int(n) != n:
            raise StateError(f"label {n!r} is not an integer")
    return tuple(sorted(int(n) for n in mapping))


@dataclass(frozen=True)
class AmplitudeState:
    """Finite map ``n -> c_n`` with ``sum |c_n|^2 = 1``."""

    amplitudes: Mapping[int, complex]

    def __post_init__(self):
        amps = {int(n): complex(c) for n, c in self.amplitudes.items()}
        if not amps:
            raise StateError("a state needs at least one label")
        _labels_sorted(self.amplitudes)
        norm = sum(abs(c) ** 2 for c in amps.values())
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"amplitudes have squared norm {norm!r}; call AmplitudeState.normalized")
        object.__setattr__(self, "amplitudes", dict(sorted(amps.items())))

    @classmethod
    def normalized(cls, amplitudes: Mapping[int, complex]) -> "AmplitudeState":
        norm = np.sqrt(sum(abs(complex(c)) ** 2 for c in amplitudes.values()))
        if norm == 0:
            raise StateError("cannot normalize the zero vector")
        return cls({n: complex(c) / norm for n, c in amplitudes.items()})

    @classmethod
    def equal_superposition(cls, *labels: int) -> "AmplitudeState":
        return cls.normalized({n: 1.0 for n in labels})

    @property
    def support(self) -> tuple:
        return tuple(self.amplitudes)

    def vector(self) -> np.ndarray:
        return np.array([self.amplitudes[n] for n in self.support], dtype=np.complex128)


@dataclass(frozen=True)
class MixedState:
    """Finite map ``n -> p_n`` of probabilities over energy labels."""

    weights: Mapping[int, float]

    def __post_init__(self):
        w = {int(n): float(p) for n, p in self.weights.items()}
        if not w:
            raise StateError("a mixed state needs at least one label")
        _labels_sorted(self.weights)
        if any(p < 0 for p in w.values()):
            raise StateError("probabilities must be non-negative")
        total = sum(w.values())
        if abs(total - 1.0) > NORM_TOL:
            raise StateError(f"probabilities sum to {total!r}")
        object.__setattr__(self, "weights", dict(sorted(w.items())))

    @property
    def support(self) -> tuple:
        return tuple(self.weights)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    values: np.ndarray
    observable_name: str = ""
    hermitian_input: bool = False

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=np.complex128)
        if times.shape != values.shape or times.ndim != 1:
            raise ValueError("times and values must be 1-D and of equal length")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.hermitian_input and np.any(np.abs(values.imag) > IMAG_TOL):
            raise ValueError("hermitian observable produced a complex expectation value")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.times)


def _check_freqs(op: BandedOperator, freqs: FrequencyTable):
    if op.range != freqs.range:
        raise ValueError(f"operator window {op.range} differs from frequency window {freqs.range}")


def evolve_operator(op: BandedOperator, freqs: FrequencyTable, t: float) -> BandedOperator:
    """``O[n, m](t) = O[n, m] exp(i omega[n, m] t)``."""
    _check_freqs(op, freqs)
    data = np.array(op._data)
    for b, k in enumerate(op.offsets):
        if k != 0:
            data[b] *= np.exp(1j * freqs.band(k) * t)
    return BandedOperator(op.range, op.offsets, data)


def _support_block(labels, op: BandedOperator) -> np.ndarray:
    rng = op.range
    for n in labels:
        if n not in rng:
            raise IndexError(f"state label {n} outside window [{rng.n_min}, {rng.n_max}]")
    return np.array([[op.element(n, m) for m in labels] for n in labels], dtype=np.complex128)


def _series(state: AmplitudeState, op: BandedOperator, freqs: FrequencyTable, times) -> np.ndarray:
    _check_freqs(op, freqs)
    labels = state.support
    block = _support_block(labels, op)
    omega = np.ascontiguousarray(freqs.matrix(labels), dtype=float)
    amp = state.vector()
    times = np.ascontiguousarray(np.atleast_1d(np.asarray(times, dtype=float)))
    return np.asarray(kernels.support_series(np.conj(amp), amp, block, omega, times))


def expectation(state: AmplitudeState, op: BandedOperator, freqs: FrequencyTable, t: float) -> complex:
    """Born-rule expectation from the elements of ``op`` on the state's support only."""
    return complex(_series(state, op, freqs, [t])[0])


def expectation_mixed(state: MixedState, op: BandedOperator, freqs: FrequencyTable, t: float = 0.0) -> complex:
    """``sum_n p_n O[n, n]``; the diagonal does not evolve, so ``t`` is irrelevant."""
    _check_freqs(op, freqs)
    rng = op.range
    total = 0j
    for n, p in state.weights.items():
        if n not in rng:
            raise IndexError(f"state label {n} outside window [{rng.n_min}, {rng.n_max}]")
        total += p * op.element(n, n)
    return total


def expectation_series(state, op: BandedOperator, freqs: FrequencyTable, time_grid,
                       name: str = "") -> Trajectory:
    times = np.asarray(time_grid, dtype=float)
    if times.size == 0:
        raise ValueError("empty time grid")
    if isinstance(state, MixedState):
        values = np.full(times.shape, expectation_mixed(state, op, freqs), dtype=np.complex128)
    else:
        values = _series(state, op, freqs, times)
    return Trajectory(times, values, observable_name=name, hermitian_input=is_hermitian(op))
