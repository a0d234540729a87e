"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy
kernels are used. Setting ``MATMECH_PURE_PYTHON=1`` forces the fallback.
"""
import os

from matmech import _kernels_py

if os.environ.get("MATMECH_PURE_PYTHON", "") not in ("", "0"):
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from matmech import _kernels_c as kernels
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"
    else:
        BACKEND = "cython"

__all__ = ["BACKEND", "kernels"]
