"""Backend selection for the integration kernels.

The compiled extension is used when importable. Setting ``LAMTORUS_PURE=1``
forces the pure-Python fallback.
"""
import os

from . import _kernels_py

if os.environ.get("LAMTORUS_PURE") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

shoot = _impl.shoot
limit_shoot = _impl.limit_shoot
rk4_step = _kernels_py.rk4_step

HIT_AXIS = _kernels_py.HIT_AXIS
HORIZONTAL_TANGENT = _kernels_py.HORIZONTAL_TANGENT
RADIAL_SINGULARITY = _kernels_py.RADIAL_SINGULARITY
BUDGET_EXHAUSTED = _kernels_py.BUDGET_EXHAUSTED


def backends():
    """Map of available backend name to kernel module."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        return out
    out["cython"] = _kernels
    return out
