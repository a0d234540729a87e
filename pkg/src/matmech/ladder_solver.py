"""Recover ``L`` and the neighbour elements of ``sin phi``, ``cos phi`` from
the commutation relations alone.

For neighbouring labels ``(n, n+1)`` the relations ``[L, sin] = -i hbar cos``
and ``[L, cos] = i hbar sin`` reduce, since ``L`` is diagonal, to the
homogeneous 2x2 system

    D s + i hbar c = 0
   -i hbar s + D c = 0,        D = L[n, n] - L[n+1, n+1],

in the unknowns ``s = sin[n, n+1]`` and ``c = cos[n, n+1]``. A nonzero
solution needs ``det = D**2 - hbar**2 = 0``. The commutators fix neither the
size of ``(s, c)`` nor the absolute value of ``L``'s diagonal; the size is
fixed with ``sin^2 + cos^2 = 1`` and the diagonal with an anchor ``L[0, 0]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from matmech.operator_core import (
    IndexRange,
    commutator,
    diagonal,
    identity,
    interior_view,
    make_banded,
    multiply,
)
from matmech.rotor_model import PhysicalParams, SpectrumTable, level_energy

ANCHORS = ("0", "half")


class LadderSolverError(ValueError):
    pass


@dataclass(frozen=True)
class LadderSolution:
    """Solved ladder on a window.

    ``l_diag[i]`` is ``L[n, n] / hbar`` for ``n = range.labels[i]``;
    ``s_plus[i]`` and ``c_plus[i]`` are ``sin[n, n+1]`` and ``cos[n, n+1]``
    for ``n = range.labels[i]`` (one fewer entry than labels).
    """

    range: IndexRange
    l_diag: np.ndarray
    s_plus: np.ndarray
    c_plus: np.ndarray
    branch: int
    anchor_delta: float

    def L_nn(self, n: int) -> float:
        return float(self.l_diag[self.range.index(n)])


def anchor_value(anchor, params: PhysicalParams) -> float:
    """Translate ``'0'``/``'half'`` (or the numbers 0 and hbar/2) into ``L[0, 0]``."""
    if isinstance(anchor, str):
        if anchor not in ANCHORS:
            raise LadderSolverError(f"anchor must be one of {ANCHORS}, got {anchor!r}")
        return 0.0 if anchor == "0" else params.hbar / 2
    value = float(anchor)
    if value == 0.0 or value == params.hbar / 2:
        return value
    raise LadderSolverError(f"anchor must be 0 or hbar/2, got {anchor!r}")


def pair_system(delta: float, hbar: float) -> np.ndarray:
    return np.array([[delta, 1j * hbar], [-1j * hbar, delta]], dtype=np.complex128)


def branch_roots(hbar: float) -> np.ndarray:
    """Roots of ``det(pair_system(D)) = D**2 - hbar**2`` as a polynomial in ``D``."""
    return np.sort(np.roots([1.0, 0.0, -(hbar**2)]).real)


def _null_vector(m: np.ndarray) -> np.ndarray:
    _, sv, vh = np.linalg.svd(m)
    if sv[-1] > 1e-12 * max(sv[0], 1.0):
        raise LadderSolverError("pair system is not singular on the chosen branch")
    return vh[-1].conj()


def solve_ladder(params: PhysicalParams, rng: IndexRange, anchor_delta=0.0,
                 branch: int = -1) -> LadderSolution:
    """Solve the neighbour equations on every adjacent pair of ``rng``.

    ``branch=-1`` takes ``L[n+1, n+1] - L[n, n] = +hbar`` so that energy
    rises with ``n`` for ``n >= 0``; ``branch=+1`` is the mirrored solution.
    The phase of ``(s, c)`` is fixed by making ``c`` real and positive.
    """
    if not rng.is_symmetric:
        raise LadderSolverError(f"window [{rng.n_min}, {rng.n_max}] is not symmetric")
    if branch not in (-1, 1):
        raise LadderSolverError("branch must be -1 or +1")
    hbar = params.hbar
    anchor = anchor_value(anchor_delta, params)

    roots = branch_roots(hbar)
    delta = roots[0] if branch < 0 else roots[-1]
    # the roots are +-hbar up to rounding
    delta = float(np.copysign(hbar, delta))

    vec = _null_vector(pair_system(delta, hbar))
    s, c = vec
    # sin^2 + cos^2 on the diagonal is 2(|s|^2 + |c|^2) for uniform neighbours
    norm = np.sqrt(2 * (abs(s) ** 2 + abs(c) ** 2))
    s, c = s / norm, c / norm
    gauge = abs(c) / c
    s, c = s * gauge, complex(abs(c), 0.0)

    npairs = rng.size - 1
    # L[n+1] = L[n] - D, anchored at n = 0
    l_diag = (anchor / hbar) - (delta / hbar) * rng.labels.astype(float)
    return LadderSolution(
        range=rng,
        l_diag=l_diag,
        s_plus=np.full(npairs, s, dtype=np.complex128),
        c_plus=np.full(npairs, c, dtype=np.complex128),
        branch=branch,
        anchor_delta=anchor,
    )


def operators_from_solution(sol: LadderSolution, params: PhysicalParams):
    """Rebuild ``(L, sin phi, cos phi)``; the lower bands are the adjoints of the upper."""
    rng = sol.range
    L = diagonal(rng, sol.l_diag * params.hbar)
    sin_phi = make_banded(rng, {1: sol.s_plus, -1: np.conj(sol.s_plus)})
    cos_phi = make_banded(rng, {1: sol.c_plus, -1: np.conj(sol.c_plus)})
    return L, sin_phi, cos_phi


@dataclass(frozen=True)
class ResidualReport:
    sin_commutator: float
    cos_commutator: float
    pythagorean: float
    pythagorean_diagonal: float
    margin: int

    @property
    def max_residual(self) -> float:
        return max(self.sin_commutator, self.cos_commutator, self.pythagorean)

    def as_dict(self) -> dict:
        return {
            "sin_commutator": self.sin_commutator,
            "cos_commutator": self.cos_commutator,
            "pythagorean": self.pythagorean,
            "pythagorean_diagonal": self.pythagorean_diagonal,
        }


def verify_solution(sol: LadderSolution, params: PhysicalParams, margin: int = 2) -> ResidualReport:
    L, sin_phi, cos_phi = operators_from_solution(sol, params)
    ih = 1j * params.hbar
    r_sin = commutator(L, sin_phi) + cos_phi * ih
    r_cos = commutator(L, cos_phi) - sin_phi * ih
    pyth = multiply(sin_phi, sin_phi) + multiply(cos_phi, cos_phi) - identity(sol.range)
    pyth_in = interior_view(pyth, margin)
    return ResidualReport(
        sin_commutator=interior_view(r_sin, margin).max_abs(),
        cos_commutator=interior_view(r_cos, margin).max_abs(),
        pythagorean=pyth_in.max_abs(),
        pythagorean_diagonal=float(np.max(np.abs(pyth_in.band(0)), initial=0.0)),
        margin=margin,
    )


def spectrum_from_solution(sol: LadderSolution, params: PhysicalParams) -> SpectrumTable:
    return SpectrumTable(n=sol.range.labels, energy=level_energy(sol.l_diag, params))
