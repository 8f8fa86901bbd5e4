"""Backend selection for the dense simplex kernel.

The kernel source lives in ``_simplex``.  ``QSOLVE_NUMBA=0`` forces the
numpy path; otherwise the source is compiled with numba when it can be
imported.  Compiled code is cached on disk.
"""

from __future__ import annotations

import importlib.util
import os
import sys

import numpy as np

from . import _simplex
from ._simplex import (
    DEGENERATE_SWITCH,
    STATUS_INFEASIBLE,
    STATUS_ITERATION_LIMIT,
    STATUS_OPTIMAL,
    STATUS_UNBOUNDED,
)


def _numba_wanted() -> bool:
    return os.environ.get("QSOLVE_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


def _compile():
    try:
        from numba import njit
    except ImportError:
        return None
    # A private copy of the source module, so the numpy path stays pure.
    spec = importlib.util.spec_from_file_location("qsolve._simplex_jit", _simplex.__file__)
    mod = importlib.util.module_from_spec(spec)
    sys.modules[spec.name] = mod
    spec.loader.exec_module(mod)
    mod._iterate = njit(cache=True)(mod._iterate)
    mod._column_values = njit(cache=True)(mod._column_values)
    return njit(cache=True)(mod.simplex)


USING_NUMBA = False
simplex_numpy = _simplex.simplex
_simplex_impl = _simplex.simplex

if _numba_wanted():
    try:
        _compiled = _compile()
    except Exception:  # numba present but unusable
        _compiled = None
    if _compiled is not None:
        _simplex_impl = _compiled
        USING_NUMBA = True


def solve_dense(A, b, c, lo, hi, max_iter: int = 5000, tol: float = 1e-9):
    """Dispatch to the active backend with contiguous float64 inputs."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    if A.ndim != 2:
        A = A.reshape(0, len(c))
    return _simplex_impl(
        A,
        np.ascontiguousarray(b, dtype=np.float64),
        np.ascontiguousarray(c, dtype=np.float64),
        np.ascontiguousarray(lo, dtype=np.float64),
        np.ascontiguousarray(hi, dtype=np.float64),
        max_iter,
        tol,
    )
