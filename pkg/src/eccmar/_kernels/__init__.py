"""Kernel selection: compiled Cython extension when available, NumPy otherwise.

Set ``ECMAR_NO_EXT=1`` to force the pure-Python path (used by the parity
tests and the benchmark).
"""

import os

if os.environ.get("ECMAR_NO_EXT"):
    from ._sim_py import simulate_recursion

    KERNEL_BACKEND = "numpy"
else:
    try:
        from ._sim import simulate_recursion

        KERNEL_BACKEND = "cython"
    except ImportError:
        from ._sim_py import simulate_recursion

        KERNEL_BACKEND = "numpy"

__all__ = ["simulate_recursion", "KERNEL_BACKEND"]
