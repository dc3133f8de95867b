"""Hankel matrices of holomorphic symbols and their singular spectra.

``H_{conj f}`` on the Hardy space is unitarily equivalent to the matrix
``A[j, k] = f^(j + k + 1)``, ``j, k >= 0``.  For a polynomial of degree
``d`` every nonzero entry sits in the leading ``d x d`` block, so the
truncation with ``N >= d`` has exactly the operator's singular values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import hankel as _scipy_hankel

from .errors import ResourceError
from .symbols import FourierSymbol

__all__ = [
    "MAX_DIMENSION",
    "HankelMatrix",
    "SingularSpectrum",
    "hankel_matrix",
    "singular_values",
    "schatten_norm",
    "truncation_dimension",
]

MAX_DIMENSION = 2**13


@dataclass(frozen=True, eq=False)
class HankelMatrix:
    symbol: FourierSymbol
    dimension: int
    entries: np.ndarray

    @property
    def exact(self) -> bool:
        """True when the truncation carries every nonzero entry of the operator."""
        return self.dimension >= self.symbol.degree


@dataclass(frozen=True, eq=False)
class SingularSpectrum:
    """Nonincreasing nonnegative singular values ``mu_0 >= mu_1 >= ...``.

    ``dimension`` is the truncation size the values came from (``None``
    for spectra given directly); ``exact`` says whether they are the full
    nonzero spectrum of the operator.
    """

    values: np.ndarray
    dimension: int | None = None
    exact: bool = False

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True).ravel()
        if np.any(~np.isfinite(v)) or np.any(v < 0):
            raise ValueError("singular values must be finite and nonnegative")
        if np.any(np.diff(v) > 0):
            raise ValueError("singular values must be sorted nonincreasing")
        if self.dimension is not None and len(v) > self.dimension:
            raise ValueError("more singular values than the truncation dimension")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)

    def power_sum(self, q: float) -> float:
        """``sum_k mu_k**q``."""
        return float(np.sum(self.values**q))


def hankel_matrix(f: FourierSymbol, N: int) -> HankelMatrix:
    """``N x N`` truncation ``A[j, k] = f^(j + k + 1)``."""
    N = int(N)
    if N < 1:
        raise ValueError("dimension must be >= 1")
    if N > MAX_DIMENSION:
        raise ResourceError(f"dimension {N} exceeds the dense SVD bound {MAX_DIMENSION}")
    diag = f.dense(2 * N)[1:]  # f^(1) .. f^(2N-1)
    real = all(v.imag == 0 for v in f.coeffs.values())
    if real:
        diag = diag.real
    A = _scipy_hankel(diag[:N], diag[N - 1 :])
    A.flags.writeable = False
    return HankelMatrix(f, N, A)


def singular_values(A: HankelMatrix) -> SingularSpectrum:
    """Dense SVD (LAPACK divide-and-conquer on a bidiagonal reduction)."""
    if not np.any(A.entries):
        s = np.zeros(A.dimension)
    else:
        s = np.linalg.svd(A.entries, compute_uv=False)
    s = np.maximum(np.sort(s)[::-1], 0.0)
    return SingularSpectrum(s, A.dimension, A.exact)


def schatten_norm(s: SingularSpectrum, q: float) -> float:
    """``(sum_k mu_k**q)**(1/q)`` for ``q >= 1``."""
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if not isinstance(s, SingularSpectrum):
        s = SingularSpectrum(s)
    v = s.values
    top = float(v[0]) if len(v) else 0.0
    if top == 0.0:
        return 0.0
    # scale out the largest value to avoid overflow for large q
    return top * float(np.sum((v / top) ** q)) ** (1.0 / q)


def truncation_dimension(f: FourierSymbol, tol: float) -> int:
    """Smallest ``N`` whose truncation omits entries of total size <= ``tol``.

    Entries left out of the ``N x N`` block all involve frequencies above
    ``N``, so the bound used is ``sum_{k > N} |f^(k)|``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    ks = np.array([k for k in f.coeffs if k >= 1], dtype=np.int64)
    if not len(ks):
        return 1
    mags = np.abs(np.array([f[k] for k in ks]))
    # tail[i] = sum of |f^(k)| over k >= ks[i]; N in [ks[i-1], ks[i]) omits exactly ks[i:]
    tail = np.cumsum(mags[::-1])[::-1]
    for i in range(len(ks)):
        if tail[i] <= tol:
            return int(ks[i - 1]) if i > 0 else 1
    return int(ks[-1])
