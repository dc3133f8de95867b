"""Besov norms of holomorphic symbols and decreasing rearrangements.

Three realizations of the ``B^{1/q}_{q,q}`` norm are provided:

* :func:`besov_lp_norm` -- Littlewood-Paley blocks ``W_n * f`` weighted by ``2**n``;
* :func:`besov_disc_norm` -- the weighted area integral of ``f''`` over the disc;
* :func:`besov_si_norm` -- the double integral of ``|f(z)-f(w)|**q / |z-w|**2``
  over the torus with normalized Haar measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.special import logsumexp, roots_jacobi

from . import _backend
from .errors import NumericalError
from .symbols import FourierSymbol, second_derivative

__all__ = [
    "StepFunction",
    "lp_multiplier",
    "lp_block_count",
    "besov_lp_norm",
    "besov_disc_norm",
    "besov_si_norm",
    "norm_with_error",
    "decreasing_rearrangement",
    "lp_rearrangement",
    "disc_rearrangement",
    "default_nodes",
]

DEFAULT_RADIAL_NODES = 200


def default_nodes(f: FourierSymbol) -> int:
    return max(256, 4 * f.degree)


# ---------------------------------------------------------------------------
# Littlewood-Paley multipliers


def lp_multiplier(n: int, k) -> float | np.ndarray:
    """Fourier multiplier of the n-th Littlewood-Paley block at frequency ``k``.

    Block 0 is the indicator of ``|k| <= 1``.  For ``n >= 1`` the weight is the
    hat function that vanishes at ``2**(n-1)`` and ``2**(n+1)`` and equals 1
    at ``2**n``.  The weights sum to one at every integer frequency.
    """
    if n < 0:
        raise ValueError("block index must be >= 0")
    k = np.abs(np.asarray(k, dtype=float))
    if n == 0:
        out = (k <= 1).astype(float)
    else:
        lo, mid, hi = 2.0 ** (n - 1), 2.0**n, 2.0 ** (n + 1)
        out = np.minimum((k - lo) / (mid - lo), (hi - k) / (hi - mid))
        out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def lp_block_count(degree: int) -> int:
    """Number of blocks that can meet frequencies ``0..degree``."""
    if degree <= 1:
        return 1
    return int(math.ceil(math.log2(degree))) + 1


def _lp_blocks(f: FourierSymbol, nodes: int):
    """Yield ``(n, values of W_n * f on the nodes)`` for non-empty blocks."""
    ks = np.array(list(f.coeffs), dtype=np.int64)
    vs = np.array(list(f.coeffs.values()), dtype=complex)
    for n in range(lp_block_count(f.degree)):
        w = lp_multiplier(n, ks)
        mask = w > 0
        if not mask.any():
            continue
        a = np.zeros(nodes, dtype=complex)
        a[ks[mask]] = w[mask] * vs[mask]
        yield n, np.fft.ifft(a) * nodes


def besov_lp_norm(f: FourierSymbol, q: float, nodes: int | None = None) -> float:
    """Littlewood-Paley Besov norm ``(sum_n 2**n * mean_theta |W_n*f|**q)**(1/q)``."""
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if f.is_zero:
        return 0.0
    nodes = default_nodes(f) if nodes is None else int(nodes)
    if nodes <= f.degree:
        raise NumericalError(f"{nodes} nodes cannot resolve degree {f.degree}")
    total = 0.0
    for n, vals in _lp_blocks(f, nodes):
        total += 2.0**n * float(np.mean(np.abs(vals) ** q))
    return total ** (1.0 / q)


# ---------------------------------------------------------------------------
# weighted disc norm


def besov_disc_norm(
    f: FourierSymbol,
    q: float,
    radial_nodes: int = DEFAULT_RADIAL_NODES,
    angular_nodes: int | None = None,
) -> float:
    """``(int_D |f''|**q (1-|z|**2)**(2q-2) dm)**(1/q)``, ``dm`` planar Lebesgue.

    The radial variable is ``s = |z|**2``; the factor ``(1-s)**(2q-2)`` is
    absorbed into Gauss-Jacobi weights so the endpoint ``s = 1`` costs no
    accuracy.  Angles use the periodic trapezoid rule.
    """
    if q <= 1:
        raise ValueError(f"q must be > 1 for the disc norm, got {q}")
    d2 = second_derivative(f)
    if d2.is_zero:
        return 0.0
    angular_nodes = default_nodes(f) if angular_nodes is None else int(angular_nodes)
    if angular_nodes <= d2.degree or radial_nodes < 2:
        raise NumericalError(
            f"insufficient nodes (radial={radial_nodes}, angular={angular_nodes}) "
            f"for f'' of degree {d2.degree}"
        )
    a = 2.0 * q - 2.0
    x, wx = roots_jacobi(int(radial_nodes), a, 0.0)
    s = 0.5 * (1.0 + x)
    r = np.sqrt(s)
    coeffs = d2.dense(angular_nodes)
    k = np.arange(angular_nodes)
    # rows: radii; columns: angles
    vals = np.fft.ifft(coeffs[None, :] * r[:, None] ** k[None, :], axis=1) * angular_nodes
    ang_mean = np.mean(np.abs(vals) ** q, axis=1)
    # int_0^1 ds (1-s)^a G(s) = 2^{-a-1} sum w G ; dm = (1/2) ds dtheta
    total = 0.5 * 2.0 ** (-a - 1.0) * 2.0 * math.pi * float(np.dot(wx, ang_mean))
    return total ** (1.0 / q)


# ---------------------------------------------------------------------------
# torus singular-integral norm


def _si_integral(f: FourierSymbol, q: float, grid: int) -> float:
    theta = 2.0 * np.pi * np.arange(grid) / grid
    shift = np.pi / grid
    z = np.exp(1j * theta)
    w = np.exp(1j * (theta + shift))
    fz = f.circle_values(grid)
    fw = f.circle_values(grid, shift=shift)
    return _backend.torus_kernel_sum(fz, z, fw, w, q) / float(grid) ** 2


def besov_si_norm(f: FourierSymbol, q: float, grid: int | None = None) -> float:
    """``(iint |f(z)-f(w)|**q / |z-w|**2 dV)**(1/q)`` with normalized Haar ``dV``.

    The ``w`` grid is offset by half a cell so ``z != w`` at every node.
    """
    if q <= 1:
        raise ValueError(f"q must be > 1 for the SI norm, got {q}")
    if f.is_zero:
        return 0.0
    grid = default_nodes(f) if grid is None else int(grid)
    if grid < 4 * f.degree:
        raise ValueError(f"grid must be >= 4*degree = {4 * f.degree}, got {grid}")
    return _si_integral(f, q, grid) ** (1.0 / q)


def norm_with_error(kind: str, f: FourierSymbol, q: float, grid: int | None = None) -> tuple[float, float]:
    """Norm value and a quadrature error estimate from a coarser rerun.

    ``kind`` is one of ``"lp"``, ``"disc"``, ``"si"``.  ``grid`` sets the
    angular/torus resolution; the estimate halves it (and the radial count
    for the disc norm).
    """
    grid = default_nodes(f) if grid is None else int(grid)
    if kind == "lp":
        fine = besov_lp_norm(f, q, grid)
        coarse = besov_lp_norm(f, q, max(grid // 2, f.degree + 1))
    elif kind == "disc":
        fine = besov_disc_norm(f, q, DEFAULT_RADIAL_NODES, grid)
        d2 = second_derivative(f).degree
        coarse = besov_disc_norm(f, q, DEFAULT_RADIAL_NODES // 2, max(grid // 2, d2 + 1))
    elif kind == "si":
        fine = besov_si_norm(f, q, grid)
        half = grid // 2
        coarse = fine if f.is_zero or half <= f.degree else _si_integral(f, q, half) ** (1.0 / q)
    else:
        raise ValueError(f"unknown norm kind {kind!r}")
    return fine, abs(fine - coarse)


# ---------------------------------------------------------------------------
# decreasing rearrangements


def _log_diff(lb_hi, lb_lo):
    """log(exp(lb_hi) - exp(lb_lo)) for lb_hi > lb_lo, lb_lo may be -inf."""
    with np.errstate(divide="ignore"):
        return lb_hi + np.log1p(-np.exp(lb_lo - lb_hi))


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Nonnegative nonincreasing step function on ``(0, inf)``.

    Value ``values[i]`` on ``[breakpoints[i], breakpoints[i+1])`` and zero
    after the last breakpoint.  Internally everything is kept as logarithms
    so supports reaching ``t ~ exp(10**6)`` are representable.
    """

    log_breaks: np.ndarray
    log_values: np.ndarray

    def __post_init__(self):
        lb = np.asarray(self.log_breaks, dtype=float)
        lv = np.asarray(self.log_values, dtype=float)
        if lb.ndim != 1 or lv.ndim != 1 or len(lb) != len(lv) + 1:
            raise ValueError("need len(breakpoints) == len(values) + 1")
        if len(lv) and not np.all(np.diff(lb) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(np.diff(lv) > 1e-12 * np.maximum(1.0, np.abs(lv[:-1]))):
            raise ValueError("values must be nonincreasing")
        if np.any(np.isnan(lv)) or np.any(lv == np.inf):
            raise ValueError("values must be finite and nonnegative")
        lb.flags.writeable = False
        lv.flags.writeable = False
        object.__setattr__(self, "log_breaks", lb)
        object.__setattr__(self, "log_values", lv)

    @classmethod
    def from_values(cls, breakpoints: Iterable[float], values: Iterable[float]) -> StepFunction:
        b = np.asarray(list(breakpoints), dtype=float)
        v = np.asarray(list(values), dtype=float)
        if np.any(v < 0) or np.any(b < 0):
            raise ValueError("breakpoints and values must be nonnegative")
        with np.errstate(divide="ignore"):
            return cls(np.log(b), np.log(v))

    @property
    def breakpoints(self) -> np.ndarray:
        return np.exp(self.log_breaks)

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)

    @property
    def log_lengths(self) -> np.ndarray:
        return _log_diff(self.log_breaks[1:], self.log_breaks[:-1])

    @property
    def log_support_end(self) -> float:
        return float(self.log_breaks[-1]) if len(self.log_values) else -np.inf

    def log_power_integral(self, q: float) -> float:
        """``log int_0^inf H(t)**q dt``."""
        if not len(self.log_values):
            return -np.inf
        with np.errstate(invalid="ignore"):
            terms = q * self.log_values + self.log_lengths
        terms = np.where(np.isnan(terms), -np.inf, terms)
        return float(logsumexp(terms))

    def norm(self, q: float) -> float:
        """``L^q(0, inf)`` norm."""
        return math.exp(self.log_power_integral(q) / q)

    def log_cumulative(self, q: float, log_t) -> np.ndarray:
        """``log int_0^t H(s)**q ds`` for each ``t = exp(log_t)``."""
        log_t = np.atleast_1d(np.asarray(log_t, dtype=float))
        if not len(self.log_values):
            return np.full(log_t.shape, -np.inf)
        with np.errstate(invalid="ignore"):
            pieces = q * self.log_values + self.log_lengths
        pieces = np.where(np.isnan(pieces), -np.inf, pieces)
        cum = np.concatenate([[-np.inf], np.logaddexp.accumulate(pieces)])
        idx = np.searchsorted(self.log_breaks, log_t, side="right") - 1
        out = np.empty(log_t.shape)
        for j, (i, lt) in enumerate(zip(idx, log_t)):
            if i < 0:
                out[j] = -np.inf
            elif i >= len(self.log_values):
                out[j] = cum[-1]
            else:
                with np.errstate(invalid="ignore", divide="ignore"):
                    partial = q * self.log_values[i] + _log_diff(lt, self.log_breaks[i])
                if np.isnan(partial) or lt == self.log_breaks[i]:
                    partial = -np.inf
                out[j] = np.logaddexp(cum[i], partial)
        return out

    def cumulative(self, q: float, t) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.exp(self.log_cumulative(q, np.log(np.asarray(t, dtype=float))))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            idx = np.searchsorted(self.log_breaks, np.log(t), side="right") - 1
        inside = (idx >= 0) & (idx < len(self.log_values))
        vals = np.zeros(t.shape)
        vals[inside] = np.exp(self.log_values[idx[inside]])
        return vals


_MERGE_RTOL = 1e-13


def decreasing_rearrangement(samples: Iterable[tuple[float, float]]) -> StepFunction:
    """Decreasing rearrangement of a weighted sample ``[(value, weight), ...]``.

    Each value occupies an interval whose length is its weight, so
    ``norm(q)`` equals the weighted ``l^q`` norm of the sample.
    """
    samples = list(samples)
    if not samples:
        return StepFunction.from_values([0.0], [])
    vals = np.array([s[0] for s in samples], dtype=float)
    wts = np.array([s[1] for s in samples], dtype=float)
    if np.any(wts < 0):
        raise ValueError("weights must be nonnegative")
    if np.any(vals < 0):
        raise ValueError("values must be nonnegative")
    keep = wts > 0
    vals, wts = vals[keep], wts[keep]
    order = np.argsort(-vals, kind="stable")
    vals, wts = vals[order], wts[order]
    if len(vals) > 1:
        # merge runs of equal values (to rounding) into one step
        starts = np.concatenate([[True], vals[1:] < vals[:-1] * (1.0 - _MERGE_RTOL)])
        run = np.cumsum(starts) - 1
        wts = np.bincount(run, weights=wts)
        vals = vals[starts]
    breaks = np.concatenate([[0.0], np.cumsum(wts)])
    return StepFunction.from_values(breaks, vals)


def lp_rearrangement(f: FourierSymbol, nodes: int | None = None) -> StepFunction:
    """``Phi_f``: rearrangement of ``(theta, n) -> |W_n*f|`` under ``dtheta/2pi x 2**n``."""
    if f.is_zero:
        return decreasing_rearrangement([])
    nodes = default_nodes(f) if nodes is None else int(nodes)
    vals, wts = [], []
    for n, block in _lp_blocks(f, nodes):
        vals.append(np.abs(block))
        wts.append(np.full(nodes, 2.0**n / nodes))
    return decreasing_rearrangement(zip(np.concatenate(vals), np.concatenate(wts)))


def disc_rearrangement(
    f: FourierSymbol,
    radial_nodes: int = DEFAULT_RADIAL_NODES,
    angular_nodes: int | None = None,
) -> StepFunction:
    """``F_f``: rearrangement of ``(1-|z|**2)**2 |f''(z)|`` under ``(1-|z|**2)**-2 dm``.

    Cells come from Gauss-Legendre nodes in ``|z|**2`` times trapezoid angles.
    """
    d2 = second_derivative(f)
    if d2.is_zero:
        return decreasing_rearrangement([])
    angular_nodes = default_nodes(f) if angular_nodes is None else int(angular_nodes)
    x, wx = np.polynomial.legendre.leggauss(int(radial_nodes))
    s = 0.5 * (1.0 + x)
    ws = 0.5 * wx
    k = np.arange(angular_nodes)
    vals = np.fft.ifft(d2.dense(angular_nodes)[None, :] * np.sqrt(s)[:, None] ** k, axis=1) * angular_nodes
    heights = (1.0 - s)[:, None] ** 2 * np.abs(vals)
    # dm = (1/2) ds dtheta
    cell = (ws * np.pi / angular_nodes / (1.0 - s) ** 2)[:, None] * np.ones((1, angular_nodes))
    return decreasing_rearrangement(zip(heights.ravel(), cell.ravel()))
