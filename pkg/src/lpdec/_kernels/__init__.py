"""Kernel backend selection.

The hot loops (one interior-point iteration, simplex pivoting) exist twice:
a Cython extension (``_compiled``) and a pure-numpy twin (``_py``). The
backend is picked once at import time; set ``LPDEC_BACKEND=python`` or
``LPDEC_BACKEND=compiled`` to force one (``auto`` prefers the extension).
"""
from __future__ import annotations

import os

from . import _py

STEP_OK = _py.STEP_OK
STEP_FACTORIZATION_FAILED = _py.STEP_FACTORIZATION_FAILED
STEP_NOT_FINITE = _py.STEP_NOT_FINITE
LP_OPTIMAL = _py.LP_OPTIMAL
LP_INFEASIBLE = _py.LP_INFEASIBLE
LP_UNBOUNDED = _py.LP_UNBOUNDED
LP_PIVOT_LIMIT = _py.LP_PIVOT_LIMIT


def _load():
    choice = os.environ.get("LPDEC_BACKEND", "auto").lower()
    if choice not in ("auto", "compiled", "python"):
        raise ValueError(f"LPDEC_BACKEND must be auto|compiled|python, got {choice!r}")
    if choice == "python":
        return _py, "python"
    try:
        from . import _compiled
        return _compiled, "compiled"
    except ImportError:
        if choice == "compiled":
            raise ImportError(
                "LPDEC_BACKEND=compiled but lpdec._kernels._compiled is not built")
        return _py, "python"


_impl, BACKEND = _load()

pd_step_kernel = _impl.pd_step_kernel
simplex_kernel = _impl.simplex_kernel


def get_backend(name: str):
    """Return (pd_step_kernel, simplex_kernel) for an explicit backend name."""
    if name == "python":
        return _py.pd_step_kernel, _py.simplex_kernel
    if name == "compiled":
        from . import _compiled
        return _compiled.pd_step_kernel, _compiled.simplex_kernel
    raise ValueError(f"unknown backend {name!r}")
