"""Independent Schrodinger-picture checks on a uniform periodic grid in phi.

Two channels, kept apart on purpose:

* finite-difference eigenvalues of ``-(hbar^2 / 2I) d^2/dphi^2``, which
  converge to the rotor spectrum at second order in the spacing;
* mode-exact evolution of a wavefunction built from Fourier modes
  ``exp(i n phi) / sqrt(2 pi)``, each advanced by ``exp(-i E_n t / hbar)``,
  with expectations taken by grid quadrature.

Nothing here touches :mod:`matmech.operator_core`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import scipy.linalg

from matmech.heisenberg_dynamics import AmplitudeState, Trajectory
from matmech.rotor_model import PhysicalParams, SpectrumTable, level_energy

MIN_POINTS = 16


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class AngularGrid:
    M: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < MIN_POINTS:
            raise GridError(f"grid needs an integer M >= {MIN_POINTS}, got {self.M!r}")

    @property
    def h(self) -> float:
        return 2 * np.pi / self.M

    @property
    def nodes(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.M) / self.M

    def max_mode(self) -> int:
        """Largest |n| whose mode is represented without aliasing."""
        return (self.M - 1) // 2


@dataclass(frozen=True)
class GridWavefunction:
    grid: AngularGrid
    values: np.ndarray

    def norm(self) -> float:
        return float(self.grid.h * np.sum(np.abs(self.values) ** 2))


def basis_mode(n: int, grid: AngularGrid) -> np.ndarray:
    return np.exp(1j * n * grid.nodes) / np.sqrt(2 * np.pi)


def fourier_element(f: Callable, n: int, m: int, grid: AngularGrid, bandwidth: int = 2) -> complex:
    """``integral conj(psi_n) f psi_m dphi`` by the periodic trapezoid rule.

    ``bandwidth`` is the highest Fourier mode present in ``f``; the rule is
    exact when ``M > 2 (|n| + |m| + bandwidth)``.
    """
    if grid.M <= 2 * (abs(n) + abs(m) + bandwidth):
        raise GridError(f"M={grid.M} too coarse for modes ({n}, {m}) with bandwidth {bandwidth}")
    integrand = np.conj(basis_mode(n, grid)) * f(grid.nodes) * basis_mode(m, grid)
    return complex(grid.h * np.sum(integrand))


def grid_hamiltonian(params: PhysicalParams, grid: AngularGrid) -> np.ndarray:
    """Second-order central difference with periodic wrap."""
    M, h = grid.M, grid.h
    coef = -(params.hbar**2) / (2 * params.inertia_I) / h**2
    H = np.zeros((M, M))
    idx = np.arange(M)
    H[idx, idx] = -2 * coef
    H[idx, (idx + 1) % M] = coef
    H[idx, (idx - 1) % M] = coef
    return H


def grid_eigen(params: PhysicalParams, grid: AngularGrid, k: int) -> SpectrumTable:
    """``k`` lowest finite-difference levels labelled by dominant |Fourier mode|.

    Degenerate ``+-n`` pairs come out as two entries with the same label.
    """
    if not 1 <= k <= grid.M:
        raise GridError(f"k must lie in [1, {grid.M}]")
    H = grid_hamiltonian(params, grid)
    try:
        evals, evecs = scipy.linalg.eigh(H, subset_by_index=[0, k - 1])
    except np.linalg.LinAlgError as exc:
        raise GridError(f"eigen-solve failed: {exc}") from exc
    coeffs = np.abs(np.fft.fft(evecs, axis=0))
    modes = np.fft.fftfreq(grid.M, d=1.0 / grid.M).astype(int)
    labels = np.abs(modes[np.argmax(coeffs, axis=0)])
    return SpectrumTable(n=labels, energy=evals)


def convergence_order(errors, spacings) -> np.ndarray:
    """Observed orders ``log(e_i / e_{i+1}) / log(h_i / h_{i+1})``."""
    e = np.asarray(errors, dtype=float)
    h = np.asarray(spacings, dtype=float)
    return np.log(e[:-1] / e[1:]) / np.log(h[:-1] / h[1:])


# -- mode-exact dynamics --------------------------------------------------

def _check_resolvable(state: AmplitudeState, grid: AngularGrid, extra: int):
    top = max(abs(n) for n in state.support)
    if 2 * (top + extra) >= grid.M:
        raise GridError(f"mode {top} is not resolvable on a grid of M={grid.M}")


def evolve_wavefunction(state: AmplitudeState, params: PhysicalParams, grid: AngularGrid,
                        t: float) -> GridWavefunction:
    psi = np.zeros(grid.M, dtype=np.complex128)
    for n, c in state.amplitudes.items():
        phase = np.exp(-1j * level_energy(float(n), params) * t / params.hbar)
        psi += c * phase * basis_mode(n, grid)
    return GridWavefunction(grid, psi)


def _spectral_derivative(values: np.ndarray, grid: AngularGrid) -> np.ndarray:
    k = np.fft.fftfreq(grid.M, d=1.0 / grid.M)
    if grid.M % 2 == 0:
        k[grid.M // 2] = 0
    return np.fft.ifft(1j * k * np.fft.fft(values))


def apply_observable(name: str, psi: np.ndarray, params: PhysicalParams, grid: AngularGrid) -> np.ndarray:
    """Act with a named rotor observable on grid values.

    ``L = -i hbar d/dphi`` (spectral derivative), ``H = L^2 / 2I`` and the
    momenta from ``p = mu dq/dt = (i mu / hbar) [H, q]``, which works out to
    ``p_x = -(L sin + sin L) / 2r`` and ``p_y = (L cos + cos L) / 2r``.
    """
    phi = grid.nodes
    r = params.radius_r

    def L(v):
        return -1j * params.hbar * _spectral_derivative(v, grid)

    if name == "x":
        return r * np.cos(phi) * psi
    if name == "y":
        return r * np.sin(phi) * psi
    if name == "cos_phi":
        return np.cos(phi) * psi
    if name == "sin_phi":
        return np.sin(phi) * psi
    if name == "L":
        return L(psi)
    if name == "H":
        return L(L(psi)) / (2 * params.inertia_I)
    if name == "p_x":
        return -(L(np.sin(phi) * psi) + np.sin(phi) * L(psi)) / (2 * r)
    if name == "p_y":
        return (L(np.cos(phi) * psi) + np.cos(phi) * L(psi)) / (2 * r)
    if name == "identity":
        return psi
    raise KeyError(f"unknown observable {name!r}")


ObservableLike = Union[str, Callable]


def grid_evolve_expectation(state: AmplitudeState, f: ObservableLike, params: PhysicalParams,
                            grid: AngularGrid, time_grid, name: str = "") -> Trajectory:
    """``<f>(t)`` by quadrature of the mode-exact wavefunction.

    ``f`` is either a function of ``phi`` (a multiplicative observable) or
    the name of a rotor observable understood by :func:`apply_observable`.
    """
    # products like sin * L psi reach one mode past the support
    _check_resolvable(state, grid, extra=2)
    times = np.asarray(time_grid, dtype=float)
    values = np.empty(times.shape, dtype=np.complex128)
    for i, t in enumerate(times):
        psi = evolve_wavefunction(state, params, grid, t).values
        if callable(f):
            values[i] = grid.h * np.sum(f(grid.nodes) * np.abs(psi) ** 2)
        else:
            values[i] = grid.h * np.vdot(psi, apply_observable(f, psi, params, grid))
    label = name or (f if isinstance(f, str) else getattr(f, "__name__", ""))
    return Trajectory(times, values, observable_name=label)
