"""Critical offspring distributions and the exact law of their random walk.

A distribution ``p_0, ..., p_K`` drives the Lukasiewicz walk
``S_m = (xi_1 - 1) + ... + (xi_m - 1)``.  Everything here is exact up to
floating point: walk probabilities come from repeated convolution, never
from the local limit approximation.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.stats import poisson

from .errors import (
    ConfigurationError,
    DegenerateError,
    DomainError,
    NonCriticalError,
    ResourceError,
)

NAMED = ("catalan", "full_binary", "poisson1", "apollonian_ternary")
POISSON_TRUNCATION = 64
WALK_GUARD = 10_000


@dataclass(frozen=True)
class OffspringDistribution:
    probs: tuple
    name: str = "custom"
    mean: float = field(init=False)
    sigma2: float = field(init=False)
    span: int = field(init=False)
    alpha: float = field(init=False)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        i = np.arange(len(p))
        mean = math.fsum(i * p)
        second = math.fsum(i * i * p)
        positive = [int(k) for k in np.flatnonzero(p > 0) if k > 0]
        span = functools.reduce(math.gcd, positive, 0)
        sigma2 = second - 1.0
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "sigma2", sigma2)
        object.__setattr__(self, "span", span)
        alpha = span / (math.sqrt(sigma2) * math.sqrt(2 * math.pi)) if sigma2 > 0 else math.nan
        object.__setattr__(self, "alpha", alpha)

    @property
    def p(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    @property
    def support(self) -> np.ndarray:
        """Offspring values carrying positive mass."""
        return np.flatnonzero(self.p > 0)

    @property
    def max_degree(self) -> int:
        return int(self.support[-1])

    def moment(self, r: float) -> float:
        i = np.arange(len(self.probs), dtype=float)
        return math.fsum(i**r * self.p)

    def __repr__(self):
        return f"OffspringDistribution({self.name!r}, sigma2={self.sigma2:.6g}, span={self.span})"


def from_weights(probs, name="custom") -> OffspringDistribution:
    """Validate weights and build a distribution.

    Raises
    ------
    ConfigurationError
        Negative entries or total mass away from 1.
    NonCriticalError
        Mean differs from 1 by more than 1e-9.
    DegenerateError
        Zero variance (``p_1 = 1``).
    """
    p = np.asarray(probs, dtype=float).ravel()
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise ConfigurationError("weights must be a non-empty finite sequence")
    if np.any(p < 0):
        raise ConfigurationError("weights must be non-negative")
    if abs(math.fsum(p) - 1.0) > 1e-12:
        raise ConfigurationError(f"weights sum to {math.fsum(p)!r}, expected 1")
    # trailing zeros carry no information and only widen convolutions
    last = int(np.flatnonzero(p > 0)[-1])
    dist = OffspringDistribution(tuple(float(x) for x in p[: last + 1]), name)
    if abs(dist.mean - 1.0) > 1e-9:
        raise NonCriticalError(f"offspring mean is {dist.mean!r}; a critical law needs mean 1")
    if not dist.sigma2 > 1e-15:
        raise DegenerateError("offspring variance is zero")
    return dist


def make_named(name: str) -> OffspringDistribution:
    if name == "catalan":
        return from_weights([0.25, 0.5, 0.25], name)
    if name == "full_binary":
        return from_weights([0.5, 0.0, 0.5], name)
    if name == "poisson1":
        # deficit ~1e-89 is left in place; see criticality tolerance
        return from_weights(poisson.pmf(np.arange(POISSON_TRUNCATION + 1), 1.0), name)
    if name == "apollonian_ternary":
        return from_weights([2 / 3, 0.0, 0.0, 1 / 3], name)
    raise ConfigurationError(f"unknown distribution {name!r}; choose from {', '.join(NAMED)}")


def parse_distribution(spec) -> OffspringDistribution:
    """Accept a named law, a comma separated weight string (``"1/4,1/2,1/4"``) or a sequence."""
    if isinstance(spec, OffspringDistribution):
        return spec
    if isinstance(spec, str):
        if "," in spec:
            try:
                weights = [float(Fraction(x.strip())) for x in spec.split(",")]
            except (ValueError, ZeroDivisionError):
                raise ConfigurationError(f"cannot parse weights {spec!r}") from None
            return from_weights(weights)
        return make_named(spec)
    return from_weights(spec)


def size_biased(dist: OffspringDistribution) -> np.ndarray:
    return np.arange(len(dist.probs)) * dist.p


@dataclass(frozen=True)
class WalkPmf:
    """Exact law of ``S_m``; ``values[j] = P(S_m = offset + j)``."""

    m: int
    offset: int
    values: np.ndarray

    def prob(self, s: int) -> float:
        j = s - self.offset
        if j < 0 or j >= len(self.values):
            return 0.0
        return float(self.values[j])

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self.values))

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("s,probability\n")
            for s, v in zip(self.support, self.values):
                fh.write(f"{s},{v!r}\n")


@njit(cache=True)
def _convolve_steps(p, m):
    # schoolbook convolution, Neumaier-compensated per output cell
    K = p.shape[0] - 1
    cur = np.zeros(m * K + 1)
    cur[0] = 1.0
    width = 1
    for _ in range(m):
        new_width = width + K
        new = np.zeros(new_width)
        for s in range(new_width):
            acc = 0.0
            comp = 0.0
            lo = max(0, s - width + 1)
            hi = min(K, s)
            for j in range(lo, hi + 1):
                term = p[j] * cur[s - j]
                t = acc + term
                if abs(acc) >= abs(term):
                    comp += (acc - t) + term
                else:
                    comp += (term - t) + acc
                acc = t
            new[s] = acc + comp
        # drop cells that underflowed to exact zero at the top end
        while new_width > 1 and new[new_width - 1] == 0.0:
            new_width -= 1
        cur[:new_width] = new[:new_width]
        width = new_width
    return cur[:width].copy()


@functools.lru_cache(maxsize=256)
def _walk_values(probs: tuple, m: int) -> np.ndarray:
    out = _convolve_steps(np.asarray(probs, dtype=float), m)
    out.setflags(write=False)
    return out


def walk_pmf(dist: OffspringDistribution, m: int, guard: int = WALK_GUARD) -> WalkPmf:
    """Exact distribution of ``S_m``, the sum of ``m`` steps ``xi - 1``."""
    if m < 0:
        raise DomainError("step count must be non-negative")
    if m > guard:
        raise ResourceError(f"walk length {m} exceeds guard {guard}; raise the guard explicitly")
    return WalkPmf(m, -m, _walk_values(dist.probs, m))


def gw_total_size_pmf(dist: OffspringDistribution, n: int) -> float:
    """``P(|T| = n) = P(S_n = -1) / n``."""
    if n < 1:
        raise DomainError("tree size must be >= 1")
    return walk_pmf(dist, n, guard=max(WALK_GUARD, n)).prob(-1) / n


def gw_total_size_pmf_upto(dist: OffspringDistribution, nmax: int) -> np.ndarray:
    """Vector ``P(|T| = n)`` for ``n = 0..nmax`` (entry 0 is zero).

    Uses one incremental convolution pass instead of ``nmax`` separate ones.
    """
    p = dist.p
    out = np.zeros(nmax + 1)
    cur = np.array([1.0])
    for n in range(1, nmax + 1):
        # cur[j] = P(xi_1 + ... + xi_n = j); S_n = -1 <=> sum = n - 1
        cur = np.convolve(cur, p)[:nmax]
        out[n] = cur[n - 1] / n if n - 1 < len(cur) else 0.0
    return out


def forest_size_pmf(dist: OffspringDistribution, k: int, n: int) -> float:
    """``P(|T_1| + ... + |T_k| = n) = (k / n) P(S_n = -k)``."""
    if k < 1 or n < k:
        raise DomainError("need k >= 1 and n >= k")
    return k / n * walk_pmf(dist, n, guard=max(WALK_GUARD, n)).prob(-k)


def expected_zk(dist: OffspringDistribution, n: int, k: int):
    """Exact mean and second factorial moment of the fringe count ``Z_k``.

    ``Z_k`` counts nodes of the size-``n`` conditional tree whose subtree
    has exactly ``k`` nodes.

    Returns
    -------
    (mean, second_factorial_moment)
    """
    if not 1 <= k <= n:
        raise DomainError("need 1 <= k <= n")
    guard = max(WALK_GUARD, n)
    p_n = walk_pmf(dist, n, guard).prob(-1)
    if p_n <= 0:
        raise DomainError(f"n={n} is not in the size support I = {{n >= 1 : P(S_n = -1) > 0}}")
    p_k = walk_pmf(dist, k, guard).prob(-1)
    # ratios of same-scale quantities first so nothing underflows
    mean = (p_k / k) * (n * (walk_pmf(dist, n - k, guard).prob(0) / p_n))
    if 2 * k <= n - 1:
        ratio = walk_pmf(dist, n - 2 * k, guard).prob(1) / p_n
        second = (p_k / k) * (p_k / k) * n * (n - 2 * k + 1) * ratio
    else:
        second = 0.0
    return mean, second


@njit(cache=True)
def _semigroup_reach(positive, limit):
    reach = np.zeros(limit + 1, dtype=np.bool_)
    reach[0] = True
    for s in range(1, limit + 1):
        for d in positive:
            if d <= s and reach[s - d]:
                reach[s] = True
                break
    return reach


def size_support(dist: OffspringDistribution, nmax: int) -> set:
    """Exact ``I ∩ [1, nmax]`` by reachability over achievable degree sums.

    ``n`` is a feasible size iff ``n - 1`` is a sum of at most ``n``
    positive offspring values; zeros fill the remaining slots (``p_0 > 0``
    for every critical non-degenerate law).
    """
    return set(int(n) for n in np.flatnonzero(_size_mask(dist, nmax)))


def _size_mask(dist, nmax):
    positive = np.array([d for d in dist.support if d > 0], dtype=np.int64)
    reach = _semigroup_reach(positive, max(nmax - 1, 0))
    mask = np.zeros(nmax + 1, dtype=bool)
    # every positive value is >= 1, so a sum of n - 1 uses at most n - 1 parts
    mask[1:] = reach[: nmax]
    if dist.p[0] <= 0:
        mask[:] = False
    return mask


@functools.lru_cache(maxsize=1024)
def in_support(dist: OffspringDistribution, n: int) -> bool:
    if n < 1:
        return False
    return bool(_size_mask(dist, n)[n])


def nearest_sizes(dist: OffspringDistribution, n: int, count: int = 2) -> list:
    """Closest feasible sizes around ``n`` (used for error messages)."""
    hi = max(n + 4 * max(dist.span, 1) * count, 2)
    sizes = sorted(size_support(dist, hi), key=lambda s: (abs(s - n), s))
    return sorted(sizes[:count])
