"""Solver kernel selection: compiled extension when available, else pure Python.

Set ``POLITEPLAN_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and by tests that exercise both backends).
"""

import os

from .bb_py import mask_less
from .bb_py import solve as solve_py

if os.environ.get("POLITEPLAN_PURE_PYTHON"):
    solve = solve_py
    BACKEND = "python"
else:
    try:
        from ._bb import solve  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        solve = solve_py
        BACKEND = "python"


def available_backends():
    """Name -> solve callable, for benchmarks and cross-checking."""
    backends = {"python": solve_py}
    try:
        from ._bb import solve as solve_c  # type: ignore[attr-defined]

        backends["compiled"] = solve_c
    except ImportError:
        pass
    return backends


__all__ = ["solve", "solve_py", "mask_less", "BACKEND", "available_backends"]
