"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np

_BLOCK = 256


def torus_kernel_sum(fz, z, fw, w, q):
    """Sum of |fz[i] - fw[j]|**q / |z[i] - w[j]|**2 over all (i, j)."""
    fz, z, fw, w = (np.asarray(a, dtype=complex) for a in (fz, z, fw, w))
    half_q = 0.5 * q
    rows = []
    for start in range(0, len(fz), _BLOCK):
        sl = slice(start, start + _BLOCK)
        num = np.abs(fz[sl, None] - fw[None, :]) ** 2
        den = np.abs(z[sl, None] - w[None, :]) ** 2
        if half_q != 1.0:
            num = num**half_q
        rows.append((num / den).sum(axis=1))
    return _neumaier_total(np.concatenate(rows)) if rows else 0.0


def _neumaier_total(x):
    s = 0.0
    c = 0.0
    for v in x.tolist():
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


def compensated_cumsum(x):
    """Running sums of ``x`` with Neumaier compensation."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty_like(x)
    s = 0.0
    c = 0.0
    for k, v in enumerate(x.tolist()):
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[k] = s + c
    return out
