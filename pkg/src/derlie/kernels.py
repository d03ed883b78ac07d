"""Backend selection for the sparse arithmetic kernels.

The compiled ``_speedups`` extension is used when it was built; otherwise
the pure-Python ``_pykernels`` module is used.  Setting the environment
variable ``DERLIE_PURE_PYTHON=1`` forces the pure-Python backend.
"""
import os

from derlie import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("DERLIE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from derlie import _speedups as _impl  # type: ignore[no-redef]
        BACKEND = "compiled"
    except ImportError:
        pass

poly_add = _impl.poly_add
poly_mul = _impl.poly_mul
poly_mul_term = _impl.poly_mul_term
reduce_vector = _impl.reduce_vector
rref = _impl.rref


def backends():
    """Map of every importable backend name to its module."""
    found = {"python": _pykernels}
    try:
        from derlie import _speedups
        found["compiled"] = _speedups
    except ImportError:
        pass
    return found
