"""Kernel backend selection.

``GRANFLOW_BACKEND=numba`` (default when numba imports) runs the solver on the
``numba.njit`` loop kernels; ``GRANFLOW_BACKEND=numpy`` runs it on the
vectorized numpy kernels. Both kernel sets stay importable so they can be
benchmarked and cross-checked against each other.
"""

from __future__ import annotations

import os
import warnings

_requested = os.environ.get("GRANFLOW_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"GRANFLOW_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

HAVE_NUMBA = _numba is not None
if _requested == "numba" and not HAVE_NUMBA:  # pragma: no cover
    warnings.warn("numba is not installed; falling back to numpy kernels")

BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` with on-disk caching, or a no-op decorator without numba."""
    if not HAVE_NUMBA:  # pragma: no cover
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    if len(args) == 1 and callable(args[0]):
        return _numba.njit(**kwargs)(args[0])
    return _numba.njit(*args, **kwargs)
