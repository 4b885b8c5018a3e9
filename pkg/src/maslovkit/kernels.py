"""Kernel dispatch: compiled extension when available, numpy otherwise.

Set ``MASLOVKIT_PURE_PYTHON=1`` before import to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
if not os.environ.get("MASLOVKIT_PURE_PYTHON"):
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

orthonormalize = _impl.orthonormalize
wrapped_increments = _impl.wrapped_increments
left_chain = _impl.left_chain

__all__ = ["BACKEND", "orthonormalize", "wrapped_increments", "left_chain"]
