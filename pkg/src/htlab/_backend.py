"""Pick the compiled kernels when available, else the numpy fallback.

Set ``HTL_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("HTL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback


def torus_kernel_sum(fz, z, fw, w, q):
    return float(
        _impl.torus_kernel_sum(
            np.ascontiguousarray(fz, dtype=complex),
            np.ascontiguousarray(z, dtype=complex),
            np.ascontiguousarray(fw, dtype=complex),
            np.ascontiguousarray(w, dtype=complex),
            float(q),
        )
    )


def compensated_cumsum(x):
    return np.asarray(_impl.compensated_cumsum(np.ascontiguousarray(x, dtype=np.float64)))


def use(name):
    """Switch backend at runtime (``"cython"`` or ``"python"``); used by benchmarks."""
    global _impl, BACKEND
    if name == "python":
        _impl, BACKEND = _fallback, "python"
    elif name == "cython":
        from . import _kernels

        _impl, BACKEND = _kernels, "cython"
    else:
        raise ValueError(f"unknown backend {name!r}")
