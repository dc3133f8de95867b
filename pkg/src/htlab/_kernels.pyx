# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.  Same contracts as ``htlab._fallback``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, fabs

cnp.import_array()


cdef inline double _ipow(double x, int n) nogil:
    cdef double r = 1.0
    while n > 0:
        if n & 1:
            r *= x
        x *= x
        n >>= 1
    return r


def torus_kernel_sum(double complex[::1] fz, double complex[::1] z,
                     double complex[::1] fw, double complex[::1] w,
                     double q):
    """Sum of |fz[i] - fw[j]|**q / |z[i] - w[j]|**2 over all (i, j)."""
    cdef Py_ssize_t n = fz.shape[0], m = fw.shape[0], i, j
    cdef double half_q = 0.5 * q
    cdef int ihalf = <int>half_q
    cdef bint integral = (<double>ihalf == half_q) and ihalf >= 0
    cdef double[::1] fwr = np.ascontiguousarray(np.real(fw))
    cdef double[::1] fwi = np.ascontiguousarray(np.imag(fw))
    cdef double[::1] wr = np.ascontiguousarray(np.real(w))
    cdef double[::1] wi = np.ascontiguousarray(np.imag(w))
    cdef double row, total = 0.0, comp = 0.0, t, num, den
    cdef double ar, ai, br, bi, dre, dim, xre, xim
    with nogil:
        for i in range(n):
            ar = fz[i].real
            ai = fz[i].imag
            br = z[i].real
            bi = z[i].imag
            row = 0.0
            for j in range(m):
                dre = ar - fwr[j]
                dim = ai - fwi[j]
                xre = br - wr[j]
                xim = bi - wi[j]
                num = dre * dre + dim * dim
                den = xre * xre + xim * xim
                if integral:
                    row += _ipow(num, ihalf) / den
                else:
                    row += pow(num, half_q) / den
            # Neumaier step over row totals
            t = total + row
            if fabs(total) >= fabs(row):
                comp += (total - t) + row
            else:
                comp += (row - t) + total
            total = t
    return total + comp


def compensated_cumsum(double[::1] x):
    """Running sums of ``x`` with Neumaier compensation."""
    cdef Py_ssize_t n = x.shape[0], k
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double s = 0.0, c = 0.0, t, v
    with nogil:
        for k in range(n):
            v = x[k]
            t = s + v
            if fabs(s) >= fabs(v):
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t
            o[k] = s + c
    return out
