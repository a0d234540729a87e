"""Matrix mechanics of the planar quantum rotor."""
__version__ = "0.1.0"

from matmech._backend import BACKEND
from matmech.operator_core import (
    BandedOperator,
    IndexRange,
    Tolerance,
    add,
    adjoint,
    commutator,
    identity,
    interior_view,
    is_hermitian,
    is_zero,
    make_banded,
    multiply,
    scale,
)
from matmech.rotor_model import PhysicalParams

__all__ = [
    "BACKEND",
    "BandedOperator",
    "IndexRange",
    "PhysicalParams",
    "Tolerance",
    "add",
    "adjoint",
    "commutator",
    "identity",
    "interior_view",
    "is_hermitian",
    "is_zero",
    "make_banded",
    "multiply",
    "scale",
]
