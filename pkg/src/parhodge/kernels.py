"""Kernel dispatch: compiled extension when importable, numpy otherwise.

Set ``PARHODGE_PURE=1`` to force the numpy path.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "numpy"
_impl = _kernels_py
if not os.environ.get("PARHODGE_PURE"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "cython"

matmul_series = _impl.matmul_series
const_left = _impl.const_left
const_right = _impl.const_right
field_mul = _impl.field_mul

__all__ = ["BACKEND", "matmul_series", "const_left", "const_right", "field_mul"]
