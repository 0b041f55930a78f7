"""Brute-force enumeration of small conditional trees.

This is the ground truth for the samplers and for the exact fringe
formulas.  It is deliberately simple: backtracking over degree sequences,
statistics computed by the same public functions used everywhere else.
"""

from __future__ import annotations

import math
import re
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import heavy
from .errors import ConfigurationError, ResourceError
from .offspring import OffspringDistribution, expected_zk, gw_total_size_pmf, size_support
from .tree import fringe_counts, from_degrees, height

ENUMERATION_GUARD = 16


def enumerate_degree_sequences(dist: OffspringDistribution, n: int, guard: int = ENUMERATION_GUARD):
    """Yield ``(degrees, weight)`` for every tree of size ``n`` with positive weight."""
    if n > guard:
        raise ResourceError(f"enumeration at n={n} exceeds guard {guard}")
    if n < 1:
        return
    support = [int(d) for d in dist.support]
    p = dist.p
    seq = [0] * n

    def rec(i, walk, weight):
        # walk = S_i after i nodes; the remaining n - i steps drop at most 1 each
        if i == n:
            if walk == -1:
                yield tuple(seq), weight
            return
        for d in support:
            nw = walk + d - 1
            last = i == n - 1
            if last and nw != -1:
                continue
            if not last and (nw < 0 or nw > n - i - 2):
                continue
            seq[i] = d
            yield from rec(i + 1, nw, weight * p[d])

    yield from rec(0, 0, 1.0)


def enumerate_trees(dist: OffspringDistribution, n: int, guard: int = ENUMERATION_GUARD):
    """Stream of ``(OrderedTree, weight)``; weight is the product of ``p_{xi_i}``."""
    for deg, w in enumerate_degree_sequences(dist, n, guard):
        yield from_degrees(deg), w


@dataclass
class ExactDistribution:
    support: list
    probs: list
    total: float

    def as_dict(self):
        return dict(zip(self.support, self.probs))

    def mean(self):
        return math.fsum(float(s) * p for s, p in zip(self.support, self.probs))


_STAT = re.compile(r"^\s*(?P<name>[a-z_0-9]+?)\s*(?:\((?P<arg>[^)]*)\))?\s*$")


def statistic_function(statistic):
    """Resolve a statistic name such as ``"z_k(3)"`` to a callable on trees."""
    if callable(statistic):
        return statistic
    m = _STAT.match(str(statistic))
    if not m:
        raise ConfigurationError(f"unknown statistic {statistic!r}")
    name, arg = m.group("name"), m.group("arg")

    def need_int():
        try:
            return int(arg)
        except (TypeError, ValueError):
            raise ConfigurationError(f"statistic {name} needs an integer argument") from None

    if name == "heavy_path_length" and arg is None:
        return lambda t: heavy.heavy_path(t).length
    if name == "two_heavy_size" and arg is None:
        return lambda t: heavy.k_heavy_size(t, 2)[0]
    if name == "height" and arg is None:
        return height
    if name == "z_k":
        k = need_int()
        return lambda t: int(fringe_counts(t)[k - 1]) if k <= t.n else 0
    if name == "max_distance_k":
        k = need_int()
        return lambda t: heavy.max_distance_to_k_heavy(t, k)
    if name == "n_k_root":
        k = need_int()

        def nk_root(t):
            stats = heavy.root_order_stats(t)
            return int(stats[k - 1]) if k <= stats.size else 0

        return nk_root
    if name == "pattern":
        if arg is None:
            raise ConfigurationError("pattern statistic needs a pattern argument")
        spec = heavy.PatternSpec.parse(arg)
        return lambda t: heavy.pattern_count(t, None, spec)
    raise ConfigurationError(f"unknown statistic {statistic!r}")


def exact_statistic_distribution(dist, n, statistic, guard=ENUMERATION_GUARD) -> ExactDistribution:
    """Exact law of ``statistic`` under the size-``n`` conditional tree."""
    f = statistic_function(statistic)
    buckets = defaultdict(list)
    weights = []
    for tree, w in enumerate_trees(dist, n, guard):
        buckets[f(tree)].append(w)
        weights.append(w)
    total = math.fsum(weights)
    keys = sorted(buckets)
    probs = [math.fsum(buckets[k]) / total for k in keys]
    return ExactDistribution(keys, probs, total)


def shape_distribution(dist, n, guard=ENUMERATION_GUARD) -> dict:
    """``{degree tuple: conditional probability}`` over all trees of size ``n``."""
    seqs = list(enumerate_degree_sequences(dist, n, guard))
    total = math.fsum(w for _, w in seqs)
    return {deg: w / total for deg, w in seqs}


@dataclass
class IdentityReport:
    dist: str
    sizes: list
    max_discrepancy: float
    failures: list = field(default_factory=list)
    tolerance: float = 1e-12

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_identities(dist: OffspringDistribution, nmax: int, tol: float = 1e-12) -> IdentityReport:
    """Compare enumeration with the size identity and the fringe moment formulas."""
    if nmax > 12:
        raise ResourceError("verify_identities is limited to nmax <= 12")
    sizes = sorted(size_support(dist, nmax))
    worst = 0.0
    failures = []

    def check(label, got, want):
        nonlocal worst
        diff = float(abs(got - want))
        worst = max(worst, diff)
        if diff > tol:
            failures.append((label, got, want))

    for n in sizes:
        weights = []
        z_first = np.zeros(n)
        z_second = np.zeros(n)
        rows = []
        for tree, w in enumerate_trees(dist, n):
            z = fringe_counts(tree).astype(float)
            rows.append((w, z))
            weights.append(w)
        total = math.fsum(weights)
        check(f"size n={n}", total, gw_total_size_pmf(dist, n))
        for k in range(1, n + 1):
            z_first[k - 1] = math.fsum(w * z[k - 1] for w, z in rows) / total
            z_second[k - 1] = math.fsum(w * z[k - 1] * (z[k - 1] - 1) for w, z in rows) / total
            mean, second = expected_zk(dist, n, k)
            check(f"E[Z_{k}] n={n}", z_first[k - 1], mean)
            check(f"E[Z_{k}(Z_{k}-1)] n={n}", z_second[k - 1], second)
    return IdentityReport(dist.name, sizes, worst, failures, tol)


def tree_count(dist: OffspringDistribution, n: int) -> int:
    return sum(1 for _ in enumerate_degree_sequences(dist, n))


def to_csv(result: ExactDistribution, path_or_file) -> None:
    lines = ["value,probability"] + [f"{s},{p!r}" for s, p in zip(result.support, result.probs)]
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w") as fh:
            fh.write(text)

