"""Kernel backend selection.

Prefers the compiled extension when it was built; otherwise falls back to
the pure-Python twin.  Both expose the same functions with bit-identical
numerics, so the choice only affects speed.
"""

try:
    from . import _kernels as kernels
except ImportError:  # extension not built on this install
    from . import _kernels_py as kernels


def backend_name() -> str:
    """Either "c" (compiled extension) or "python" (fallback)."""
    return kernels.BACKEND_NAME
