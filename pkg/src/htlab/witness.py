"""Non-measurable Hankel operators from lacunary series.

Pipeline: a bounded oscillating profile ``h0`` is slowed down to
``h(t) = h0(log(1 + log(1 + t)))``; ``g = h + (psi~/psi~') h'`` solves
``h(t) = (1/psi~(t)) int_0^t g psi~'``; unit-interval means of ``g`` give
coefficients ``c_n`` whose weighted Cesaro means track ``h + C``.  Those
coefficients feed the lacunary symbol ``sum 2**(-n/p) c_n z**(2**n)``.

The oscillation of ``h`` happens on doubly exponential scales, so the
certificate combines a numerical check of ``R(t) ~ h(t) + C`` at feasible
``t`` with the closed-form gap ``limsup h0 - liminf h0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .besov import StepFunction
from .errors import ResourceError
from .lorentz import PsiFunction, k_psi
from .symbols import FourierSymbol, lacunary

__all__ = [
    "H0Spec",
    "WitnessReport",
    "h_of_t",
    "h_prime",
    "g_of_t",
    "g_bar",
    "witness_coefficients",
    "cesaro_ratio",
    "cesaro_ratios",
    "oscillation_report",
    "witness_symbol",
    "witness_step_function",
]

RESIDUAL_TOL = 0.05
MAX_WITNESS_TERMS = 13
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


@dataclass(frozen=True)
class H0Spec:
    """Bounded profile ``h0`` with closed-form liminf/limsup.

    ``sin``/``cos``: ``amplitude * sin(u + phase) + offset`` (resp. cos).
    ``const``: the constant ``amplitude + offset``.
    """

    family: str = "sin"
    amplitude: float = 1.0
    phase: float = 0.0
    offset: float = 0.0

    def __post_init__(self):
        if self.family not in ("sin", "cos", "const"):
            raise ValueError(f"unknown h0 family {self.family!r}")

    def _arg(self, u):
        shift = self.phase + (math.pi / 2 if self.family == "cos" else 0.0)
        return np.asarray(u, dtype=float) + shift

    def __call__(self, u):
        if self.family == "const":
            return np.full(np.shape(u), self.amplitude + self.offset, dtype=float)
        return self.amplitude * np.sin(self._arg(u)) + self.offset

    def d1(self, u):
        if self.family == "const":
            return np.zeros(np.shape(u))
        return self.amplitude * np.cos(self._arg(u))

    def d2(self, u):
        if self.family == "const":
            return np.zeros(np.shape(u))
        return -self.amplitude * np.sin(self._arg(u))

    @property
    def liminf(self) -> float:
        if self.family == "const":
            return self.amplitude + self.offset
        return self.offset - abs(self.amplitude)

    @property
    def limsup(self) -> float:
        if self.family == "const":
            return self.amplitude + self.offset
        return self.offset + abs(self.amplitude)

    @property
    def sup_d1(self) -> float:
        return 0.0 if self.family == "const" else abs(self.amplitude)


def _inner(t):
    return np.log1p(np.log1p(np.asarray(t, dtype=float)))


def h_of_t(h0: H0Spec, t):
    """``h0(log(1 + log(1 + t)))``."""
    return h0(_inner(t))


def h_prime(h0: H0Spec, t):
    """``h'(t) = h0'(u) / ((1 + log(1+t)) (1 + t))`` with ``u = log(1 + log(1 + t))``."""
    t = np.asarray(t, dtype=float)
    return h0.d1(_inner(t)) / ((1.0 + np.log1p(t)) * (1.0 + t))


def _check_psi(psi: PsiFunction):
    if k_psi(psi) == 0.0:
        raise ValueError("the construction needs A_psi(e) != 1 (k_psi = 0 given)")


def g_of_t(psi: PsiFunction, h0: H0Spec, t):
    """``g = h + (psi~/psi~') h'``."""
    _check_psi(psi)
    return h_of_t(h0, t) + psi.tilde_ratio(t) * h_prime(h0, t)


def g_bar(psi: PsiFunction, h0: H0Spec, n):
    """``int_n^{n+1} g(s) ds`` by 8-point Gauss-Legendre; ``n`` may be an array."""
    _check_psi(psi)
    n = np.asarray(n, dtype=float)
    if h0.family == "const":
        return np.full(n.shape, h0.amplitude + h0.offset)
    nodes = n[..., None] + _GL_X
    return np.sum(g_of_t(psi, h0, nodes) * _GL_W, axis=-1)


def _tilde_weights(psi: PsiFunction, n: np.ndarray) -> np.ndarray:
    w = psi.tilde_derivative(n)
    if len(n) and n[0] == 0 and not np.isfinite(w[0]):
        # psi~' blows up at 0 when beta < 1; use its mean over [0, 1]
        w[0] = float(psi.tilde(1.0) - psi.tilde(0.0))
    return w


def witness_coefficients(psi: PsiFunction, h0: H0Spec, p: float, N: int) -> np.ndarray:
    """``c_n = (|g_bar(n) + C| psi~'(n))**(1/p)``, ``C = -liminf h0``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if p < 1:
        raise ValueError("p must be >= 1")
    n = np.arange(int(N), dtype=float)
    C = -h0.liminf
    return (np.abs(g_bar(psi, h0, n) + C) * _tilde_weights(psi, n)) ** (1.0 / p)


def cesaro_ratios(c, psi: PsiFunction, p: float, t) -> np.ndarray:
    """``sum_{k <= floor(t)} c_k**p / psi~(t)`` for each ``t``."""
    c = np.asarray(c, dtype=float)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    idx = np.floor(t).astype(np.int64)
    if np.any(idx >= len(c)):
        raise ValueError(f"t={t.max():g} needs {idx.max() + 1} coefficients, have {len(c)}")
    cum = _backend.compensated_cumsum(c**p)
    return cum[idx] / psi.tilde(t)


def cesaro_ratio(c, psi: PsiFunction, p: float, t: float) -> float:
    return float(cesaro_ratios(c, psi, p, [t])[0])


@dataclass
class WitnessReport:
    p: float
    psi: str
    h0: H0Spec
    C: float
    t: np.ndarray
    R: np.ndarray
    target: np.ndarray
    decade_max: dict = field(default_factory=dict)
    gap: float = 0.0
    verdict: str = "no-witness"
    tol: float = RESIDUAL_TOL

    @property
    def residual(self) -> np.ndarray:
        return self.R - self.target

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "psi": self.psi,
            "h0": {
                "family": self.h0.family,
                "amplitude": self.h0.amplitude,
                "phase": self.h0.phase,
                "offset": self.h0.offset,
            },
            "C": self.C,
            "analytic_gap": self.gap,
            "liminf_h0": self.h0.liminf,
            "limsup_h0": self.h0.limsup,
            "decade_max_residual": {str(k): v for k, v in self.decade_max.items()},
            "max_abs_residual": float(np.max(np.abs(self.residual))) if len(self.t) else 0.0,
            "residual_tol": self.tol,
            "verdict": self.verdict,
        }

    def rows(self):
        """``(t, R, h + C, residual)`` rows for CSV output."""
        return zip(self.t.tolist(), self.R.tolist(), self.target.tolist(), self.residual.tolist())


def default_t_grid(tmax: float = 1e6, per_decade: int = 25) -> np.ndarray:
    hi = math.log10(tmax)
    k = int(round((hi - 2.0) * per_decade)) + 1
    return np.unique(np.floor(np.logspace(2.0, hi, k)))


def oscillation_report(
    psi: PsiFunction,
    h0: H0Spec,
    p: float = 1.0,
    t_grid=None,
    tmax: float = 1e6,
    tol: float = RESIDUAL_TOL,
) -> WitnessReport:
    """Check ``R(t) = cesaro_ratio(c, t) ~ h(t) + C`` and issue a verdict.

    ``non-measurable`` needs a positive closed-form gap of ``h0`` and
    residual maxima per decade that are nonincreasing with the last decade
    below ``tol``.  A convergent ``h0`` gives ``no-witness``.
    """
    _check_psi(psi)
    t = default_t_grid(tmax) if t_grid is None else np.asarray(t_grid, dtype=float)
    N = int(np.floor(t.max())) + 1
    c = witness_coefficients(psi, h0, p, N)
    R = cesaro_ratios(c, psi, p, t)
    C = -h0.liminf
    target = h_of_t(h0, t) + C
    res = np.abs(R - target)
    decades = {}
    for d in range(int(math.floor(math.log10(t.min()))), int(math.ceil(math.log10(t.max())))):
        mask = (t >= 10.0**d) & (t <= 10.0 ** (d + 1))
        if mask.any():
            decades[d] = float(res[mask].max())
    gap = h0.limsup - h0.liminf
    if gap <= 0:
        verdict = "no-witness"
    else:
        maxima = list(decades.values())
        trend_ok = all(b <= a for a, b in zip(maxima, maxima[1:]))
        verdict = "non-measurable" if trend_ok and maxima and maxima[-1] <= tol else "inconclusive"
    return WitnessReport(p, psi.label, h0, C, t, R, target, decades, gap, verdict, tol)


def witness_symbol(psi: PsiFunction, h0: H0Spec, p: float, J: int) -> FourierSymbol:
    """Lacunary symbol ``sum_{n<J} 2**(-n/p) c_n z**(2**n)``."""
    if J > MAX_WITNESS_TERMS:
        raise ResourceError(f"J={J} exceeds {MAX_WITNESS_TERMS} (Hankel SVD size 2**(J-1))")
    c = witness_coefficients(psi, h0, p, J)
    return lacunary(p, c, J)


def witness_step_function(psi: PsiFunction, h0: H0Spec, p: float, N: int) -> StepFunction:
    """Rearrangement of the Littlewood-Paley blocks of the untruncated witness.

    Block ``j`` has constant modulus ``2**(-j/p) c_j`` and mass ``2**j``;
    kept in log form so ``N`` can reach ``10**6`` dyadic scales.
    """
    c = witness_coefficients(psi, h0, p, N)
    j = np.arange(N, dtype=float)
    with np.errstate(divide="ignore"):
        log_v = np.log(c) - j * math.log(2.0) / p
    log_w = j * math.log(2.0)
    order = np.argsort(-log_v, kind="stable")
    log_v, log_w = log_v[order], log_w[order]
    keep = np.isfinite(log_v)
    log_v, log_w = log_v[keep], log_w[keep]
    if not len(log_v):
        return StepFunction(np.array([-np.inf]), np.array([]))
    log_breaks = np.concatenate([[-np.inf], np.logaddexp.accumulate(log_w)])
    return StepFunction(log_breaks, log_v)
