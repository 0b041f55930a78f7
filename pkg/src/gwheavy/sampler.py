"""Exact samplers for Galton-Watson trees.

Conditional samplers draw an exchangeable degree sequence with the right
total and rotate it with the cycle lemma: each tree of size ``n`` owns
exactly ``n`` rotations, all of equal weight, so rotating a uniformly
placed sequence yields the conditional law exactly.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ConfigurationError, DomainError, InvariantViolation, ResourceError, UnsupportedError
from .offspring import OffspringDistribution, in_support, nearest_sizes, size_biased
from .tree import INDEX, OrderedTree, from_degrees, from_valid_degrees

ALGORITHM_ID = "pcg64/splitmix64-v1"
MASK64 = (1 << 64) - 1
DEFAULT_MAX_ATTEMPTS = 10**7
DEFAULT_CAP = 10**7


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def substream_seed(master: int, *keys: int) -> int:
    """Deterministic 64-bit seed for the replication identified by ``keys``."""
    h = splitmix64(int(master) & MASK64)
    for key in keys:
        h = splitmix64(h ^ (int(key) & MASK64))
    return h


def make_rng(master: int, *keys: int) -> np.random.Generator:
    """PCG64 generator for ``(master, *keys)``; identical streams on every platform."""
    return np.random.Generator(np.random.PCG64(substream_seed(master, *keys)))


def draw_offspring(dist: OffspringDistribution, size, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. offspring counts by inversion of the cumulative weights."""
    cdf = np.cumsum(dist.p)
    cdf[-1] = 1.0  # absorbs truncation deficit
    return np.searchsorted(cdf, rng.random(size), side="right").astype(INDEX)


def cycle_rotate(increments) -> np.ndarray:
    """Rotate a ``{-1, 0, 1, ...}`` sequence summing to -1 into a valid walk.

    The rotation starts right after the leftmost minimum of the prefix
    sums; it is the only rotation whose proper prefix sums are all >= 0.
    """
    x = np.asarray(increments, dtype=INDEX)
    if x.ndim != 1 or x.size == 0:
        raise DomainError("increments must be a non-empty sequence")
    if np.any(x < -1):
        raise DomainError("increments must be >= -1")
    walk = np.cumsum(x)
    if walk[-1] != -1:
        raise DomainError(f"increments sum to {int(walk[-1])}, expected -1")
    start = int(np.argmin(walk)) + 1
    out = np.concatenate((x[start:], x[:start]))
    check = np.cumsum(out)
    if np.any(check[:-1] < 0):
        raise InvariantViolation("cycle lemma rotation failed validation")
    return out


def _check_size(dist, n):
    if not in_support(dist, n):
        near = nearest_sizes(dist, n)
        raise DomainError(
            f"n={n} is not a feasible size for {dist.name} (nearest valid sizes: {near})"
        )


def sample_conditional_rejection(dist, n, rng, max_attempts=DEFAULT_MAX_ATTEMPTS) -> OrderedTree:
    """Draw i.i.d. degree vectors until one sums to ``n - 1``, then rotate."""
    _check_size(dist, n)
    if n == 1:
        return from_degrees([0])
    batch = int(max(1, min(4096, (1 << 20) // n)))
    used = 0
    while used < max_attempts:
        b = min(batch, max_attempts - used)
        draws = draw_offspring(dist, (b, n), rng)
        hit = np.flatnonzero(draws.sum(axis=1) == n - 1)
        if hit.size:
            return from_valid_degrees(cycle_rotate(draws[hit[0]] - 1) + 1)
        used += b
    raise ResourceError(f"no acceptance in {max_attempts} attempts at n={n}")


@functools.lru_cache(maxsize=64)
def multiset_counts_law(dist: OffspringDistribution, n: int):
    """Exact law of the degree-count vector of a size-``n`` conditional tree.

    Returns ``(values, counts, cdf)``: ``counts[r]`` is one feasible count
    vector for the support ``values``; ``cdf`` is the cumulative law over rows.
    Only supports of at most three points are handled.
    """
    values = dist.support
    if len(values) > 3:
        raise UnsupportedError(f"multiset sampler needs <= 3 support points, {dist.name} has {len(values)}")
    target = n - 1
    rows = []
    if len(values) == 2:
        a, b = values
        # a == 0 for any critical law
        if (target - a * n) % (b - a) == 0:
            nb = (target - a * n) // (b - a)
            if 0 <= nb <= n:
                rows.append((n - nb, nb))
    else:
        a, b, c = (int(x) for x in values)
        nc = np.arange(0, target // c + 1, dtype=INDEX)
        rest = n - nc
        num = target - c * nc - a * rest
        nb = num // (b - a)
        na = rest - nb
        ok = (num >= 0) & (num % (b - a) == 0) & (na >= 0)
        rows = np.column_stack((na[ok], nb[ok], nc[ok]))
    if len(rows) == 0:
        raise DomainError(f"n={n} is not a feasible size for {dist.name}")
    counts = np.asarray(rows, dtype=INDEX)
    logp = np.log(dist.p[values])
    logw = gammaln(n + 1) - gammaln(counts + 1).sum(axis=1) + counts @ logp
    w = np.exp(logw - logw.max())
    cdf = np.cumsum(w / w.sum())
    cdf[-1] = 1.0
    for a in (values, counts, cdf):
        a.setflags(write=False)
    return values, counts, cdf


def sample_conditional_multiset(dist, n, rng) -> OrderedTree:
    """Draw the degree counts exactly, shuffle the multiset, rotate."""
    _check_size(dist, n)
    values, counts, cdf = multiset_counts_law(dist, n)
    row = 0 if len(cdf) == 1 else int(np.searchsorted(cdf, rng.random(), side="right"))
    seq = np.repeat(values.astype(INDEX), counts[row])
    rng.shuffle(seq)
    return from_valid_degrees(cycle_rotate(seq - 1) + 1)


def sample_conditional(dist, n, rng, method=None) -> OrderedTree:
    """Conditional tree of size ``n``; multiset sampler whenever it applies."""
    if method is None:
        method = "multiset" if len(dist.support) <= 3 else "rejection"
    if method == "multiset":
        return sample_conditional_multiset(dist, n, rng)
    if method == "rejection":
        return sample_conditional_rejection(dist, n, rng)
    raise ConfigurationError(f"unknown sampling method {method!r}")


@dataclass(frozen=True)
class Overflow:
    """Unconditional tree censored at ``size`` nodes."""

    size: int


def unconditional_degrees(dist, rng, cap=DEFAULT_CAP):
    """Preorder degrees of an unconditional tree, or ``None`` once it reaches ``cap`` nodes."""
    walk_end = 0
    parts = []
    chunk = 64
    drawn = 0
    # a tree that has not closed after cap - 1 nodes has size >= cap
    while drawn < cap - 1:
        b = min(chunk, cap - 1 - drawn)
        xi = draw_offspring(dist, b, rng)
        walk = walk_end + np.cumsum(xi - 1)
        hit = np.flatnonzero(walk == -1)
        if hit.size:
            parts.append(xi[: hit[0] + 1])
            return np.concatenate(parts)
        parts.append(xi)
        walk_end = int(walk[-1])
        drawn += b
        chunk *= 2
    return None


def sample_unconditional(dist, rng, cap=DEFAULT_CAP):
    """Unconditional GW tree, or :class:`Overflow` when its size is ``>= cap``.

    Nodes are generated in preorder along the Lukasiewicz walk; the law is
    the same as breadth-first generation and the cap censors at the same
    total size.
    """
    if cap < 1:
        raise DomainError("cap must be >= 1")
    deg = unconditional_degrees(dist, rng, cap)
    if deg is None:
        return Overflow(cap)
    return from_degrees(deg)


@dataclass(frozen=True, eq=False)
class SizeBiasedSample:
    tree: OrderedTree
    spine: np.ndarray
    censored: bool


def sample_size_biased_truncated(dist, max_depth, rng) -> SizeBiasedSample:
    """Kesten's size-biased tree cut at depth ``max_depth``.

    Spine nodes take a size-biased number of children, one of them chosen
    uniformly to continue the spine; all other nodes reproduce with the
    original law.  Nodes at ``max_depth`` are leaves; ``censored`` records
    whether any of them would have had children.
    """
    if max_depth < 0:
        raise DomainError("max_depth must be >= 0")
    sb = size_biased(dist)
    sb_cdf = np.cumsum(sb)
    sb_cdf[-1] = 1.0
    cdf = np.cumsum(dist.p)
    cdf[-1] = 1.0
    degrees = []
    spine = []
    censored = False
    # (depth, on_spine); popped in preorder
    stack = [(0, True)]
    while stack:
        d, on_spine = stack.pop()
        idx = len(degrees)
        if on_spine:
            spine.append(idx)
        table = sb_cdf if on_spine else cdf
        k = int(np.searchsorted(table, rng.random(), side="right"))
        if d == max_depth:
            if k > 0 and not on_spine:
                censored = True
            degrees.append(0)
            continue
        degrees.append(k)
        flags = [False] * k
        if on_spine:
            flags[int(rng.integers(k))] = True
        for f in reversed(flags):
            stack.append((d + 1, f))
    return SizeBiasedSample(from_degrees(degrees), np.array(spine, dtype=INDEX), censored)
