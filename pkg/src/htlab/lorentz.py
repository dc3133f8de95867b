"""Concave gauges, Lorentz quasi-norms and extrapolation functionals.

The gauge family is ``psi_beta(t) = log(1 + t)**beta`` with ``0 < beta <= 1``;
``beta = 1`` gives the ideal ``M_{1,infinity}``.  Everything that needs
``psi`` at astronomically large arguments goes through
:meth:`PsiFunction.psi_of_exp`, which takes ``log t``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import gamma as _sp_gamma

from . import _backend
from .besov import StepFunction
from .errors import NumericalError, TruncationWarning
from .hankel import SingularSpectrum

__all__ = [
    "PsiFunction",
    "a_psi",
    "k_psi",
    "lorentz_quasinorm",
    "partial_sum_ratio",
    "log_partial_sum_ratios",
    "ExtrapolationResult",
    "extrapolation_functional",
    "SandwichResult",
    "sandwich_check",
    "default_h_grid",
    "spectrum_norm_curve",
    "step_norm_curve",
    "harmonic_norm_curve",
    "psi_derivative_norm",
    "psi_condition_constant",
    "TAIL_POINTS",
]

TAIL_POINTS = 4
SANDWICH_SLACK = 0.05
_A_PSI_SCALES = (1e4, 1e6, 1e8)
_A_PSI_SPREAD = 1e-6


@dataclass(frozen=True)
class PsiFunction:
    """Gauge ``psi(t) = log(1 + t)**beta``."""

    beta: float = 1.0

    def __post_init__(self):
        if not 0 < self.beta <= 1:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta}")

    @classmethod
    def parse(cls, spec: str) -> PsiFunction:
        """``"log"`` or ``"logpow:BETA"``."""
        spec = spec.strip()
        if spec == "log":
            return cls(1.0)
        if spec.startswith("logpow:"):
            return cls(float(spec.split(":", 1)[1]))
        raise ValueError(f"unknown psi {spec!r}; use 'log' or 'logpow:BETA'")

    @property
    def label(self) -> str:
        return "log" if self.beta == 1.0 else f"logpow:{self.beta:g}"

    def __call__(self, t):
        return np.log1p(np.asarray(t, dtype=float)) ** self.beta

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return self.beta * np.log1p(t) ** (self.beta - 1.0) / (1.0 + t)

    def psi_of_exp(self, s):
        """``psi(exp(s))`` without forming ``exp(s)``."""
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore"):
            big = s + np.log1p(np.exp(-np.abs(s)))
            small = np.log1p(np.exp(np.minimum(s, 0.0)))
        return np.where(s >= 0, big, small) ** self.beta

    def tilde(self, t):
        """``psi(2**t - 1) = (t log 2)**beta``."""
        return (np.asarray(t, dtype=float) * math.log(2.0)) ** self.beta

    def tilde_derivative(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return self.beta * math.log(2.0) ** self.beta * t ** (self.beta - 1.0)

    def tilde_ratio(self, t):
        """``psi~(t) / psi~'(t) = t / beta``."""
        return np.asarray(t, dtype=float) / self.beta

    def dilation_limit(self, alpha: float) -> float:
        """Closed form of ``lim psi(t**alpha)/psi(t) = alpha**beta``."""
        return float(alpha) ** self.beta


@lru_cache(maxsize=256)
def a_psi(psi: PsiFunction, alpha: float) -> float:
    """Estimate ``A_psi(alpha) = lim_{t->inf} psi(t**alpha) / psi(t)``.

    The ratio is evaluated on ``log t`` in ``{1e4, 1e6, 1e8}``; the three
    values must agree to ``1e-6`` or :class:`NumericalError` is raised.
    """
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if alpha == 1:
        return 1.0
    s = np.array(_A_PSI_SCALES)
    ratios = psi.psi_of_exp(alpha * s) / psi.psi_of_exp(s)
    if ratios.max() - ratios.min() > _A_PSI_SPREAD:
        raise NumericalError(f"psi(t^alpha)/psi(t) not converged: {ratios}")
    # Richardson step assuming an O(1/log t) error term
    est = ratios[-1] + (ratios[-1] - ratios[-2]) * s[-2] / (s[-1] - s[-2])
    return float(max(est, 1.0))


def k_psi(psi: PsiFunction) -> float:
    return math.log(a_psi(psi, math.e))


# ---------------------------------------------------------------------------
# partial sums of the singular value function


def _spectrum_cumsum(s: SingularSpectrum, p: float) -> np.ndarray:
    return _backend.compensated_cumsum(np.asarray(s.values, dtype=float) ** p)


def log_partial_sum_ratios(s, psi: PsiFunction, p: float, log_t) -> np.ndarray:
    """``log[(1/psi(t)) int_0^t mu(s)**p ds]`` at ``t = exp(log_t)``.

    For a :class:`SingularSpectrum` the integral is the sum over
    ``k < floor(t)``.  A :class:`TruncationWarning` is issued when ``t``
    runs past a spectrum that is not known to be exact.
    """
    log_t = np.atleast_1d(np.asarray(log_t, dtype=float))
    log_psi = np.log(psi.psi_of_exp(log_t))
    if isinstance(s, StepFunction):
        num = s.log_cumulative(p, log_t)
    else:
        if not isinstance(s, SingularSpectrum):
            s = SingularSpectrum(s)
        cum = np.concatenate([[0.0], _spectrum_cumsum(s, p)])
        with np.errstate(over="ignore"):
            n = np.floor(np.exp(np.minimum(log_t, 700.0)) + 1e-9)
        n = np.where(log_t >= 700.0, np.inf, n)
        if not s.exact and np.any(n > len(s)) and len(s) and s.values[-1] > 0:
            warnings.warn(
                f"t up to {n.max():.3g} exceeds the {len(s)} available singular values",
                TruncationWarning,
                stacklevel=2,
            )
        idx = np.minimum(n, len(s)).astype(np.int64)
        with np.errstate(divide="ignore"):
            num = np.log(cum[idx])
    return num - log_psi


def partial_sum_ratio(s, psi: PsiFunction, p: float, t: float) -> float:
    """``(1/psi(t)) * sum_{k < floor(t)} mu_k**p`` (step-function integral)."""
    if t <= 0:
        raise ValueError("t must be positive")
    return float(np.exp(log_partial_sum_ratios(s, psi, p, math.log(t))[0]))


def lorentz_quasinorm(s, psi: PsiFunction, p: float = 1.0) -> float:
    """``sup_t (1/psi(t)) int_0^t mu**p``; the sup is taken over breakpoints."""
    if isinstance(s, StepFunction):
        if not len(s.log_values):
            return 0.0
        lb = s.log_breaks[1:]
        return float(np.exp(np.max(s.log_cumulative(p, lb) - np.log(psi.psi_of_exp(lb)))))
    if not isinstance(s, SingularSpectrum):
        s = SingularSpectrum(s)
    if not len(s) or s.values[0] == 0:
        return 0.0
    cum = _spectrum_cumsum(s, p)
    n = np.arange(1, len(s) + 1, dtype=float)
    return float(np.max(cum / psi(n)))


# ---------------------------------------------------------------------------
# extrapolation


def default_h_grid(h_min: float = 2.0**-16) -> np.ndarray:
    """Geometric grid ``1/2, 1/4, ..., h_min``."""
    k = int(round(-math.log2(h_min)))
    return 2.0 ** -np.arange(1, k + 1, dtype=float)


def spectrum_norm_curve(s) -> Callable[[float], float]:
    """``q -> ||mu||_q`` for a finite spectrum."""
    if not isinstance(s, SingularSpectrum):
        s = SingularSpectrum(s)
    v = np.asarray(s.values, dtype=float)

    def curve(q: float) -> float:
        if not len(v) or v[0] == 0:
            return 0.0
        return float(v[0] * np.sum((v / v[0]) ** q) ** (1.0 / q))

    return curve


def step_norm_curve(H: StepFunction) -> Callable[[float], float]:
    return H.norm


def harmonic_norm_curve() -> Callable[[float], float]:
    """``q -> ||(1/(k+1))_k||_q = zeta(q)**(1/q)`` for the diagonal ``diag(1/(k+1))``."""
    from scipy.special import zeta

    def curve(q: float) -> float:
        return float(zeta(q, 1)) ** (1.0 / q)

    return curve


@dataclass
class ExtrapolationResult:
    h_grid: np.ndarray
    per_h: np.ndarray
    sup_value: float
    tail_limsup: float
    tail_liminf: float

    def to_dict(self) -> dict:
        return {
            "sup": self.sup_value,
            "tail_limsup": self.tail_limsup,
            "tail_liminf": self.tail_liminf,
            "per_h": [[float(h), float(v)] for h, v in zip(self.h_grid, self.per_h)],
        }


def extrapolation_functional(
    norm_curve: Callable[[float], float],
    psi: PsiFunction,
    p: float,
    h_grid: Sequence[float] | None = None,
) -> ExtrapolationResult:
    """``v(h) = ||x||_{p+h}**(p+h) / psi(e**(1/h))`` over a grid of ``h``.

    ``tail_limsup`` is the max of ``v`` over the :data:`TAIL_POINTS`
    smallest ``h`` -- the finite-grid stand-in for ``limsup_{h -> 0}``.
    """
    h = np.sort(np.asarray(default_h_grid() if h_grid is None else h_grid, dtype=float))[::-1]
    if np.any(h <= 0) or np.any(h > 1):
        raise ValueError("h_grid must lie in (0, 1]")
    v = np.empty(len(h))
    for i, hi in enumerate(h):
        nrm = float(norm_curve(p + hi))
        if not np.isfinite(nrm):
            raise NumericalError(f"norm curve returned {nrm} at q={p + hi}")
        v[i] = nrm ** (p + hi) / float(psi.psi_of_exp(1.0 / hi))
    tail = v[-TAIL_POINTS:]
    return ExtrapolationResult(h, v, float(v.max()), float(tail.max()), float(tail.min()))


@dataclass
class SandwichResult:
    lim_psi: float
    limsup_extrap: float
    ratio: float
    limsup_extrap_power: float = field(default=float("nan"))
    within_bounds: bool = True

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def sandwich_check(
    H: StepFunction,
    psi: PsiFunction,
    p: float = 1.0,
    h_grid: Sequence[float] | None = None,
    slack: float = SANDWICH_SLACK,
) -> SandwichResult:
    """Compare the two limsup quantities bracketing a function's gauge growth.

    ``lim_psi`` is ``((1/psi(t)) int_0^t H**p)**(1/p)`` and ``limsup_extrap``
    is ``||H||_{p+h}**(1+h) / psi(e**(1/h))**(1/p)``; both are maximized over
    the tail of the grid, pairing ``t = e**(1/h)``.  Their ratio should lie
    in ``[1, e]``.  ``limsup_extrap_power`` is the same functional written
    with the ``(p+h)``-th power, ``(||H||_{p+h}**(p+h)/psi(e**(1/h)))**(1/p)``.
    """
    h = np.sort(np.asarray(default_h_grid() if h_grid is None else h_grid, dtype=float))[::-1]
    tail_h = h[-TAIL_POINTS:]
    log_t = 1.0 / tail_h
    lim_psi = float(np.max(np.exp(log_partial_sum_ratios(H, psi, p, log_t) / p)))

    log_psi = np.log(psi.psi_of_exp(log_t))
    log_int = np.array([H.log_power_integral(p + hh) for hh in tail_h])
    # log ||H||_{p+h}^{1+h}
    log_lit = (1.0 + tail_h) / (p + tail_h) * log_int - log_psi / p
    log_pow = (log_int - log_psi) / p
    if np.any(np.isnan(log_lit)):
        raise NumericalError("divergent extrapolation surrogate")
    limsup_extrap = float(np.exp(np.max(log_lit)))
    limsup_pow = float(np.exp(np.max(log_pow)))
    if lim_psi == 0.0:
        ratio = 1.0 if limsup_extrap == 0.0 else float("inf")
    else:
        ratio = limsup_extrap / lim_psi
    ok = (1.0 - slack) <= ratio <= (math.e + slack)
    return SandwichResult(lim_psi, limsup_extrap, ratio, limsup_pow, ok)


# ---------------------------------------------------------------------------
# the L^p condition on psi'


def psi_derivative_norm(psi: PsiFunction, p: float) -> float:
    """``||psi'||_{L^p(0, inf)}``; ``inf`` when ``psi'`` is not p-integrable at 0.

    With ``u = log(1+t)``: ``int psi'**p dt = beta**p Gamma(a) / (p-1)**a``,
    ``a = (beta-1) p + 1``.
    """
    if p <= 1:
        raise ValueError("p must be > 1")
    b = psi.beta
    a = (b - 1.0) * p + 1.0
    if a <= 0:
        return float("inf")
    return float((b**p * _sp_gamma(a) / (p - 1.0) ** a) ** (1.0 / p))


def psi_condition_constant(psi: PsiFunction, ps: Sequence[float]) -> float:
    """Smallest ``C`` with ``||psi'||_p <= C psi(e**(1/(p-1)))`` on the given ``p``."""
    ratios = [psi_derivative_norm(psi, p) / float(psi.psi_of_exp(1.0 / (p - 1.0))) for p in ps]
    return float(max(ratios))
