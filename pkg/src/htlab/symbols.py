"""Holomorphic symbols on the unit circle, stored by Fourier coefficients."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ResourceError

__all__ = [
    "MAX_DEGREE",
    "MAX_LACUNARY_TERMS",
    "FourierSymbol",
    "monomial",
    "lacunary",
    "evaluate",
    "second_derivative",
]

MAX_DEGREE = 2**23
MAX_LACUNARY_TERMS = 24


@dataclass(frozen=True)
class FourierSymbol:
    """Symbol ``f(z) = sum_k coeffs[k] z**k`` with ``k >= 0``.

    Zero coefficients are dropped on construction, so ``coeffs`` only
    carries the support of ``f``.  Instances are immutable.
    """

    coeffs: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, v in dict(self.coeffs).items():
            k = int(k)
            if k < 0:
                raise ValueError(f"negative frequency {k}: only holomorphic symbols are supported")
            if k > MAX_DEGREE:
                raise ResourceError(f"frequency {k} exceeds the degree cap {MAX_DEGREE}")
            v = complex(v)
            if v != 0:
                clean[k] = v
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @property
    def degree(self) -> int:
        return max(self.coeffs, default=0)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int) -> complex:
        return self.coeffs.get(k, 0j)

    def __add__(self, other: FourierSymbol) -> FourierSymbol:
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0j) + v
        return FourierSymbol(out)

    def __mul__(self, scalar: complex) -> FourierSymbol:
        return FourierSymbol({k: scalar * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def dense(self, size: int | None = None) -> np.ndarray:
        """Coefficient vector ``a[k] = f^(k)`` of length ``size`` (default ``degree + 1``)."""
        n = self.degree + 1 if size is None else int(size)
        a = np.zeros(n, dtype=complex)
        for k, v in self.coeffs.items():
            if k < n:
                a[k] = v
        return a

    def normalized(self) -> FourierSymbol:
        """Drop the constant term; warn if it was present.

        The constant only shifts ``f`` and never changes ``H_{conj f}``.
        """
        if 0 in self.coeffs:
            warnings.warn("dropping constant Fourier coefficient f^(0)", stacklevel=2)
            return FourierSymbol({k: v for k, v in self.coeffs.items() if k != 0})
        return self

    def circle_values(self, nodes: int, shift: float = 0.0) -> np.ndarray:
        """Values ``f(exp(i*(2*pi*m/nodes + shift)))`` for ``m = 0..nodes-1``.

        Uses a single inverse FFT, so it is exact (up to rounding) whenever
        ``nodes > degree``.
        """
        if nodes <= self.degree:
            raise ValueError(f"need more than {self.degree} nodes, got {nodes}")
        a = self.dense(nodes)
        if shift:
            a = a * np.exp(1j * shift * np.arange(nodes))
        return np.fft.ifft(a) * nodes

    # JSON form: {"coeffs": [[k, re, im], ...]}
    def to_json(self) -> dict:
        return {"coeffs": [[k, v.real, v.imag] for k, v in self.coeffs.items()]}

    @classmethod
    def from_json(cls, data: dict | str) -> FourierSymbol:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            rows = data["coeffs"]
        except (KeyError, TypeError):
            raise ValueError("symbol JSON must be an object with a 'coeffs' list") from None
        out = {}
        for row in rows:
            if len(row) not in (2, 3):
                raise ValueError(f"bad coefficient row {row!r}; expected [k, re, im]")
            k = row[0]
            if int(k) != k:
                raise ValueError(f"non-integer frequency {k!r}")
            im = row[2] if len(row) == 3 else 0.0
            out[int(k)] = out.get(int(k), 0j) + complex(row[1], im)
        return cls(out)

    @classmethod
    def from_real(cls, values: Sequence[float] | Iterable[float], start: int = 0) -> FourierSymbol:
        return cls({start + i: float(v) for i, v in enumerate(values)})


def monomial(n: int) -> FourierSymbol:
    """The symbol ``z**n`` for ``n >= 1``."""
    if int(n) != n or n < 1:
        raise ValueError(f"monomial degree must be a positive integer, got {n!r}")
    return FourierSymbol({int(n): 1.0})


def lacunary(p: float, c: Sequence[float], J: int | None = None) -> FourierSymbol:
    """Truncated lacunary series ``sum_{j<J} 2**(-j/p) c_j z**(2**j)``.

    Parameters
    ----------
    p : float
        Schatten exponent, ``p >= 1``.
    c : sequence of float
        Nonnegative coefficients; only the first ``J`` are used.
    J : int, optional
        Number of dyadic terms, defaults to ``len(c)``.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    c = np.asarray(c, dtype=float)
    J = len(c) if J is None else int(J)
    if J < 1:
        raise ValueError("J must be positive")
    if J > MAX_LACUNARY_TERMS:
        raise ResourceError(f"J={J} exceeds {MAX_LACUNARY_TERMS} (degree 2**(J-1) too large)")
    if len(c) < J:
        raise ValueError(f"need {J} coefficients, got {len(c)}")
    c = c[:J]
    if np.any(c < 0) or not np.all(np.isfinite(c)):
        raise ValueError("lacunary coefficients must be finite and nonnegative")
    return FourierSymbol({2**j: 2.0 ** (-j / p) * c[j] for j in range(J) if c[j] > 0})


def evaluate(f: FourierSymbol, theta: float) -> complex:
    """``f(e^{i theta})`` by Horner's rule in ``e^{i theta}``."""
    if f.is_zero:
        return 0j
    z = complex(math.cos(theta), math.sin(theta))
    if 8 * len(f.coeffs) < f.degree:
        # sparse (e.g. lacunary) symbols: Horner would touch every zero
        return sum(v * z**k for k, v in f.coeffs.items())
    acc = 0j
    for k in range(f.degree, -1, -1):
        acc = acc * z + f[k]
    return acc


def second_derivative(f: FourierSymbol) -> FourierSymbol:
    return FourierSymbol({k - 2: k * (k - 1) * v for k, v in f.coeffs.items() if k >= 2})
