"""Limit-law numerics: the fragmentation exponent, moments of the heavy-path
limit, the theta height law, the heavy fragmentation of an excursion and a
log-log power-law fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .errors import DomainError

SQRT_2PI = math.sqrt(2 * math.pi)
PHI_HALF_CLOSED_FORM = 2 * math.sqrt(2 / math.pi) * (math.sqrt(2) - math.log(1 + math.sqrt(2)))


def _phi_integrand(u, q):
    # x = 1 - u^2 turns (1 - x)^(-3/2) dx into a bounded integrand
    if u == 0.0:
        return 4 * q / SQRT_2PI
    x = 1.0 - u * u
    return 4.0 * (-math.expm1(q * math.log(x))) / (SQRT_2PI * x**1.5 * u * u)


def phi(q: float) -> float:
    """Laplace exponent ``int_{1/2}^1 (1 - x^q) nu(dx)`` of the heavy fragmentation.

    ``nu(dx) = 2 (2 pi x^3 (1-x)^3)^{-1/2} dx`` on ``[1/2, 1)``.
    """
    if not q > 0:
        raise DomainError("phi needs q > 0")
    val, err = integrate.quad(_phi_integrand, 0.0, 1 / math.sqrt(2), args=(float(q),), epsabs=1e-12, epsrel=1e-12, limit=200)
    if err > 1e-10:
        raise DomainError(f"quadrature for phi({q}) did not converge (error {err:.2e})")
    return val


def t_infinity_moment(k: int) -> float:
    """``E[T^k] = k! / (phi(1/2) phi(1) ... phi(k/2))``."""
    if k < 0 or int(k) != k:
        raise DomainError("moment order must be a non-negative integer")
    out = 1.0
    for j in range(1, int(k) + 1):
        out *= j / phi(j / 2)
    return out


def theta_cdf(x):
    """Theta distribution function ``sum_j (1 - 2 j^2 x^2) exp(-j^2 x^2)``.

    The direct series loses all accuracy for small ``x`` (large cancelling
    terms), so below ``x = 1`` the Jacobi-transformed series
    ``4 pi^{5/2} x^{-3} sum_{j>=1} j^2 exp(-pi^2 j^2 / x^2)`` is summed instead.
    """
    xs = np.asarray(x, dtype=float)
    if np.any(~(xs > 0)):
        raise DomainError("theta_cdf needs x > 0")
    out = np.empty_like(xs)
    flat = xs.ravel()
    res = out.ravel()
    for i, v in enumerate(flat):
        res[i] = _theta_direct(v) if v >= 1.0 else _theta_dual(v)
    out = np.clip(res.reshape(xs.shape), 0.0, 1.0)
    return float(out) if np.ndim(x) == 0 else out


def _theta_direct(x):
    total = 1.0
    j = 1
    while True:
        jx2 = (j * x) ** 2
        term = 2.0 * (1.0 - 2.0 * jx2) * math.exp(-jx2)
        total += term
        if abs(term) < 1e-16 and jx2 > 1:
            return total
        j += 1


def _theta_dual(x):
    total = 0.0
    j = 1
    while True:
        term = j * j * math.exp(-((math.pi * j / x) ** 2))
        total += term
        if term < 1e-16 * max(total, 1e-300) or term == 0.0:
            return 4.0 * math.pi**2.5 / x**3 * total
        j += 1


@dataclass(frozen=True, eq=False)
class FragmentationTrace:
    """Length of the tracked component of ``{f > t}`` as the level rises.

    ``levels[0] = 0`` carries the whole excursion length; later levels are
    the thresholds at which a component survived.
    """

    levels: np.ndarray
    measures: np.ndarray
    t_infinity: float

    def zeta(self, ell):
        """First recorded level at which the tracked length is ``<= ell``."""
        ell = np.atleast_1d(np.asarray(ell, dtype=float))
        out = np.empty(ell.shape)
        for i, e in enumerate(ell):
            hit = np.flatnonzero(self.measures <= e)
            out[i] = self.levels[hit[0]] if hit.size else self.t_infinity
        return out


def heavy_fragmentation(excursion, level_step: float = 1.0, dx: float = 1.0) -> FragmentationTrace:
    """Follow the longest superlevel component of a piecewise-linear excursion.

    At each threshold ``t = (i + 1/2) * level_step`` the current interval is
    split into the components of ``{f > t}``; the longest (leftmost on ties)
    is kept.  ``t_infinity`` is ``level_step`` times the number of
    thresholds with a non-empty component.  For the contour of a tree with
    ``level_step = 1`` a depth-``d`` subtree of size ``s`` gives a component
    of length ``2s - 1``, so the steps follow the heavy path exactly.
    """
    f = np.asarray(excursion, dtype=float)
    if f.ndim != 1 or f.size < 2:
        raise DomainError("excursion needs at least two grid values")
    if not level_step > 0 or not dx > 0:
        raise DomainError("level_step and dx must be positive")
    if f[0] != 0 or f[-1] != 0 or np.any(f < 0) or not np.all(np.isfinite(f)):
        raise DomainError("excursion must be finite, non-negative and vanish at both ends")
    lo, hi = 0, f.size - 1  # grid indices bounding the current component
    levels = [0.0]
    measures = [dx * (f.size - 1)]
    i = 0
    while True:
        t = (i + 0.5) * level_step
        seg = f[lo : hi + 1]
        above = seg > t
        if not above.any():
            break
        # runs of grid points above t; each run plus its two crossings is a component
        edges = np.diff(np.concatenate(([False], above, [False])).astype(np.int8))
        starts = np.flatnonzero(edges == 1)
        ends = np.flatnonzero(edges == -1) - 1
        s_abs = starts + lo
        e_abs = ends + lo
        # crossing points by linear interpolation; endpoints of f are 0 <= t
        left = (s_abs - 1) + (t - f[s_abs - 1]) / (f[s_abs] - f[s_abs - 1])
        right = e_abs + (f[e_abs] - t) / (f[e_abs] - f[e_abs + 1])
        lengths = (right - left) * dx
        best = int(np.argmax(lengths))  # first maximum = leftmost
        levels.append(t)
        measures.append(float(lengths[best]))
        lo, hi = int(s_abs[best] - 1), int(e_abs[best] + 1)
        i += 1
    return FragmentationTrace(np.array(levels), np.array(measures), i * level_step)


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    r2: float
    slope_stderr: float

    def slope_ci(self, level=0.95, npoints=None):
        """Normal-approximation confidence interval for the slope."""
        z = stats.norm.ppf(0.5 + level / 2)
        return float(self.slope - z * self.slope_stderr), float(self.slope + z * self.slope_stderr)


def fit_power_law(points) -> PowerLawFit:
    """Least squares of ``log y`` on ``log x``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise DomainError("need at least three (x, y) pairs")
    if np.any(pts <= 0) or not np.all(np.isfinite(pts)):
        raise DomainError("power-law fit needs finite positive x and y")
    lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
    if np.ptp(lx) == 0:
        raise DomainError("x values are all equal; slope undefined")
    res = stats.linregress(lx, ly)
    return PowerLawFit(float(res.slope), float(res.intercept), float(res.rvalue**2), float(res.stderr))
