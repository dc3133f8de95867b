"""Dixmier-trace brackets, the extrapolated trace formula and the exact p = 2, 4, 6 identity.

Extended limits cannot be constructed, so every ``lim_{t -> omega}`` is
reported as an interval ``[lo, hi]`` of the quantity over the tail of a
finite evaluation grid.  A collapsed interval is consistent with a
measurable operator; a persistent gap is evidence, not proof, of
non-measurability.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .besov import _si_integral, default_nodes
from .hankel import SingularSpectrum
from .lorentz import (
    TAIL_POINTS,
    PsiFunction,
    extrapolation_functional,
    k_psi,
    log_partial_sum_ratios,
    spectrum_norm_curve,
)
from .symbols import FourierSymbol

__all__ = [
    "JUW_CONSTANTS",
    "DEFAULT_TOL",
    "TraceBracket",
    "log_grid",
    "trace_bracket",
    "extrapolated_trace_bracket",
    "gamma_fn",
    "juw_trace",
    "distance_to_separable",
    "measurability_report",
]

JUW_CONSTANTS = {2: 1.0, 4: 0.5, 6: 1.0 / 6.0}
DEFAULT_TOL = 0.05
DEFAULT_GRID_DEPTH = 8

DISCLAIMER = (
    "Brackets are finite-grid surrogates: lo/hi are the min/max of the trace "
    "functional over the tail of the evaluation grid, not values of an extended limit."
)


@dataclass
class TraceBracket:
    lo: float
    hi: float
    log_grid: list = field(default_factory=list)
    tol: float = DEFAULT_TOL
    truncated: bool = False
    finite_rank: bool = False
    trend: float = 0.0
    method: str = "spectrum"

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi:
            raise ValueError(f"invalid bracket [{self.lo}, {self.hi}]")

    @property
    def collapsed(self) -> bool:
        return self.hi - self.lo <= self.tol * max(1.0, self.hi)

    @property
    def gap(self) -> float:
        return self.hi - self.lo

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "collapsed": self.collapsed,
            "tol": self.tol,
            "truncated": self.truncated,
            "lower_bound_only": self.truncated,
            "finite_rank": self.finite_rank,
            "trend": self.trend,
            "method": self.method,
            "grid": self.grid_description(),
        }

    def grid_description(self) -> dict:
        if self.method == "extrapolate":
            return {"h": [float(math.exp(x)) for x in self.log_grid]}
        return {"log10_t": [x / math.log(10.0) for x in self.log_grid]}


def log_grid(depth: int = DEFAULT_GRID_DEPTH, base: float = 10.0) -> np.ndarray:
    """``log t`` for ``t = base**1 .. base**depth``."""
    return np.arange(1, depth + 1, dtype=float) * math.log(base)


def _tail_window(log_t: np.ndarray) -> np.ndarray:
    log_t = np.sort(np.asarray(log_t, dtype=float))
    return log_t[len(log_t) // 2 :]


def trace_bracket(
    s,
    psi: PsiFunction,
    p: float = 1.0,
    grid: Sequence[float] | None = None,
    tol: float = DEFAULT_TOL,
    log_t: Sequence[float] | None = None,
) -> TraceBracket:
    """Bracket ``(1/psi(t)) int_0^t mu**p`` over the top half of a log grid.

    ``grid`` lists evaluation points ``t``; ``log_t`` gives them as
    logarithms instead (needed beyond ``t ~ 1e308``).  The default is
    ``t = 10**1 .. 10**8``.  An exact finite-rank spectrum has trace zero
    and returns ``[0, 0]``.
    """
    if log_t is None:
        log_t = log_grid() if grid is None else np.log(np.asarray(grid, dtype=float))
    window = _tail_window(log_t)
    if isinstance(s, (list, tuple, np.ndarray)):
        s = SingularSpectrum(s)
    if isinstance(s, SingularSpectrum) and s.exact:
        return TraceBracket(0.0, 0.0, window.tolist(), tol, finite_rank=True)
    truncated = False
    if isinstance(s, SingularSpectrum):
        truncated = bool(len(s) and s.values[-1] > 0 and window[-1] > math.log(len(s) + 1))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = np.exp(log_partial_sum_ratios(s, psi, p, window))
    trend = float(np.polyfit(window / math.log(10.0), r, 1)[0]) if len(window) > 1 else 0.0
    return TraceBracket(float(r.min()), float(r.max()), window.tolist(), tol, truncated, trend=trend)


def extrapolated_trace_bracket(
    norm_curve: Callable[[float], float] | SingularSpectrum,
    psi: PsiFunction,
    p: float = 1.0,
    h_grid: Sequence[float] | None = None,
    tol: float = DEFAULT_TOL,
) -> TraceBracket:
    """Bracket of ``v(h) / Gamma(1 + k_psi)`` over the smallest ``h`` of the grid.

    ``v(h) = ||T||_{p+h}**(p+h) / psi(e**(1/h))``.  ``norm_curve`` maps
    ``q`` to ``||T||_q``; a :class:`SingularSpectrum` is accepted directly.
    """
    if isinstance(norm_curve, SingularSpectrum):
        if norm_curve.exact:
            return TraceBracket(0.0, 0.0, [], tol, finite_rank=True, method="extrapolate")
        norm_curve = spectrum_norm_curve(norm_curve)
    res = extrapolation_functional(norm_curve, psi, p, h_grid)
    scale = 1.0 / gamma_fn(1.0 + k_psi(psi))
    tail_h = res.h_grid[-TAIL_POINTS:]
    tail_v = res.per_h[-TAIL_POINTS:] * scale
    log_inv_h = np.log(1.0 / tail_h)
    trend = float(np.polyfit(np.log10(1.0 / tail_h), tail_v, 1)[0]) if len(tail_h) > 1 else 0.0
    return TraceBracket(
        float(tail_v.min()), float(tail_v.max()), (-log_inv_h).tolist(), tol, trend=trend, method="extrapolate"
    )


# Lanczos approximation, g = 7, 9 terms
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(x: float) -> float:
    """Gamma function on ``[0.5, 4]`` by the Lanczos approximation."""
    if not 0.5 <= x <= 4.0:
        raise ValueError(f"gamma_fn supports x in [0.5, 4], got {x}")
    x = float(x) - 1.0
    a = _LANCZOS[0]
    t = x + _LANCZOS_G + 0.5
    for i in range(1, len(_LANCZOS)):
        a += _LANCZOS[i] / (x + i)
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * a


def juw_trace(f: FourierSymbol, p: int, grid: int | None = None) -> float:
    """``c_p * iint |f(z)-f(w)|**p / |z-w|**2 dV`` for ``p`` in ``{2, 4, 6}``.

    Equals ``Tr |H_{conj f}|**p`` exactly for these three exponents.
    """
    if p not in JUW_CONSTANTS:
        raise ValueError(
            f"p={p}: the exact trace identity holds only for p in {{2, 4, 6}}, "
            "the only possible values"
        )
    if f.is_zero:
        return 0.0
    grid = default_nodes(f) if grid is None else int(grid)
    if grid < 4 * f.degree:
        raise ValueError(f"grid must be >= 4*degree = {4 * f.degree}")
    return JUW_CONSTANTS[p] * _si_integral(f, float(p), grid)


def distance_to_separable(
    s,
    psi: PsiFunction,
    p: float = 1.0,
    grid: Sequence[float] | None = None,
    log_t: Sequence[float] | None = None,
) -> tuple[float, TraceBracket]:
    """Distance of ``|T|**p`` to the separable part of ``M_psi``.

    For atomic algebras it is ``limsup_t (1/psi(t)) int_0^t mu**p``; the
    surrogate is the maximum over the top-of-grid window.  Returns the value
    and the bracket it was read from.
    """
    b = trace_bracket(s, psi, p, grid, log_t=log_t)
    return b.hi, b


def measurability_report(b: TraceBracket) -> dict:
    verdict = "measurable-consistent" if b.collapsed else "gap-detected"
    return {
        "verdict": verdict,
        "gap": b.gap,
        "bracket": [b.lo, b.hi],
        "truncated": b.truncated,
        "disclaimer": DISCLAIMER,
    }
