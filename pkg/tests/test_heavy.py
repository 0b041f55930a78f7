import re
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwheavy import heavy as Hv
from gwheavy.errors import ConfigurationError, DomainError
from gwheavy.offspring import make_named
from gwheavy.sampler import cycle_rotate, make_rng, sample_conditional
from gwheavy.tree import from_degrees, height

SEVEN = from_degrees([3, 0, 1, 0, 2, 0, 0])


@st.composite
def trees(draw, max_n=80, max_deg=5):
    n = draw(st.integers(1, max_n))
    deg = draw(st.lists(st.integers(0, max_deg), min_size=n, max_size=n))
    # push the total to n - 1 by trimming or padding degrees
    deg = np.asarray(deg)
    while deg.sum() > n - 1:
        deg[np.argmax(deg)] -= 1
    i = 0
    while deg.sum() < n - 1:
        deg[i % n] += 1
        i += 1
    return from_degrees(cycle_rotate(deg - 1) + 1)


def naive_ranks(t):
    rank = np.zeros(t.n, dtype=int)
    for v in range(t.n):
        kids = t.children(v).tolist()
        order = sorted(kids, key=lambda c: (-int(t.subtree_size[c]), c))
        for r, c in enumerate(order, 1):
            rank[c] = r
    return rank


def kappa(t, rank, v):
    seq = []
    while v > 0:
        seq.append(int(rank[v]))
        v = int(t.parent[v])
    return seq[::-1]


def encode(seq):
    return "".join(chr(ord("A") + min(r, 25) - 1) for r in seq)


def pattern_regex(p: Hv.PatternSpec):
    if p.kind == Hv.HEAVY_PATH:
        return r"A*"
    if p.kind == Hv.BINARY_BLOCKS:
        return rf"(?:A*B){{{p.k}}}A*"
    if p.kind == Hv.BLOCKS_THEN_BIG:
        big = chr(ord("A") + p.j - 1)
        return rf"(?:A*B){{{p.k}}}A*[{big}-Z].*"
    return r"[B-Z]*"


def naive_distance(t, mask):
    adj = [[] for _ in range(t.n)]
    for v in range(1, t.n):
        u = int(t.parent[v])
        adj[u].append(v)
        adj[v].append(u)
    dist = np.full(t.n, -1)
    q = deque(np.flatnonzero(mask).tolist())
    for v in q:
        dist[v] = 0
    while q:
        u = q.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                q.append(w)
    return int(dist.max())


def test_seven_ranks():
    d = Hv.compute(SEVEN)
    # 0-based ids; the 1-based labels are one larger
    assert {4: 1, 2: 2, 1: 3, 3: 1, 5: 1, 6: 2} == {v: int(d.rank[v]) for v in range(1, 7)}
    assert d.rank[0] == 0
    assert d.rho_star.tolist() == [0, 3, 2, 2, 1, 1, 2]


def test_seven_heavy():
    assert Hv.k_heavy_size(SEVEN, 2)[0] == 6
    assert Hv.k_heavy_size(SEVEN, 1)[0] == 3
    assert Hv.k_heavy_size(SEVEN, 3)[0] == 7
    mask = Hv.k_heavy_size(SEVEN, 2)[1]
    assert mask.tolist() == [True, False, True, True, True, True, True]
    prof = Hv.heavy_path(SEVEN)
    assert prof.nodes.tolist() == [0, 4, 5]
    assert prof.length == 2
    assert prof.sizes.tolist() == [7, 3, 1]
    assert Hv.max_distance_to_k_heavy(SEVEN, 2) == 1
    assert Hv.max_distance_to_k_heavy(SEVEN, 1) == 2
    assert Hv.max_distance_to_k_heavy(SEVEN, 3) == 0
    assert Hv.max_kth_subtree(SEVEN, 2)[0] == 2
    assert Hv.max_kth_subtree(SEVEN, 3)[0] == 1
    assert Hv.max_kth_subtree(SEVEN, 4) == (0, 0)


def test_seven_patterns():
    assert Hv.pattern_count(SEVEN, None, Hv.PatternSpec.heavy_path()) == 3
    assert Hv.pattern_count(SEVEN, None, Hv.PatternSpec.binary_blocks(1)) == 3
    assert Hv.pattern_count(SEVEN, None, Hv.PatternSpec.all_ge2()) == 3
    assert Hv.pattern_count(SEVEN, None, "binary_blocks:1") == 3


def test_singleton_and_path():
    s = from_degrees([0])
    d = Hv.compute(s)
    assert Hv.heavy_path(s, d).length == 0 and Hv.heavy_path(s, d).sizes.tolist() == [1]
    assert Hv.max_distance_to_k_heavy(s, 1) == 0
    assert Hv.heavy_path(from_degrees([1, 1, 0])).length == 2


def test_q_function():
    prof = Hv.heavy_path(SEVEN)
    assert prof.q(7) == 0
    assert prof.q_values().tolist() == [2, 2, 1, 1, 1, 1, 0]
    with pytest.raises(DomainError):
        prof.q(0)
    with pytest.raises(DomainError):
        prof.q(8)


def test_run_length():
    prof = Hv.heavy_path(from_degrees([2, 0, 2, 0, 2, 0, 0]))
    assert prof.sizes.tolist() == [7, 5, 3, 1]
    assert prof.run_length_sizes() == {"start": 7, "drops": [[2, 3]]}


def test_pattern_parse():
    assert str(Hv.PatternSpec.parse("blocks_then_big:2:4")) == "blocks_then_big:2:4"
    assert Hv.PatternSpec.parse("heavy_path") == Hv.PatternSpec.heavy_path()
    for bad in ("nope", "binary_blocks", "heavy_path:1", "blocks_then_big:1:2", "binary_blocks:x"):
        with pytest.raises(ConfigurationError):
            Hv.PatternSpec.parse(bad)
    with pytest.raises(ConfigurationError):
        Hv.pattern_count(SEVEN, None, 42)


def test_k_domain():
    with pytest.raises(DomainError):
        Hv.k_heavy_size(SEVEN, 0)
    with pytest.raises(DomainError):
        Hv.max_distance_to_k_heavy(SEVEN, 0)


@settings(max_examples=200, deadline=None)
@given(trees())
def test_against_naive(t):
    d = Hv.compute(t)
    rank = naive_ranks(t)
    assert d.rank[1:].tolist() == rank[1:].tolist()
    for v in range(1, t.n):
        assert d.rho_star[v] == max(d.rho_star[t.parent[v]], d.rank[v])
    for k in (1, 2, 3):
        size, mask = Hv.k_heavy_size(t, k, d)
        want = np.array([all(r <= k for r in kappa(t, rank, v)) for v in range(t.n)])
        assert mask.tolist() == want.tolist()
        # ancestor-closed
        assert np.all(mask[t.parent[1:]] | ~mask[1:])
        assert Hv.max_distance_to_k_heavy(t, k, d) == naive_distance(t, mask)
        stats = [sorted((int(t.subtree_size[c]) for c in t.children(v)), reverse=True) for v in range(t.n)]
        nk = max((s[k - 1] for s in stats if len(s) >= k), default=0)
        nkp = max((sum(s[k - 1 :]) for s in stats if len(s) >= k), default=0)
        assert Hv.max_kth_subtree(t, k, d) == (nk, nkp)
    words = [encode(kappa(t, rank, v)) for v in range(t.n)]
    patterns = [Hv.PatternSpec.heavy_path(), Hv.PatternSpec.all_ge2()]
    patterns += [Hv.PatternSpec.binary_blocks(k) for k in range(3)]
    patterns += [Hv.PatternSpec.blocks_then_big(k, j) for k in range(3) for j in (3, 4)]
    for p in patterns:
        rx = re.compile(pattern_regex(p))
        assert Hv.pattern_count(t, d, p) == sum(1 for w in words if rx.fullmatch(w)), str(p)


@settings(max_examples=200, deadline=None)
@given(trees())
def test_decomposition_identities(t):
    d = Hv.compute(t)
    H = height(t)
    prof = Hv.heavy_path(t, d)
    assert prof.length <= H
    assert prof.length + 1 == Hv.pattern_count(t, d, Hv.PatternSpec.heavy_path())
    assert np.all(np.diff(prof.sizes) < 0) and prof.sizes[0] == t.n and prof.sizes[-1] == 1
    q = prof.q_values()
    for ell in range(1, t.n + 1):
        assert q[ell - 1] == min(k for k in range(prof.length + 1) if prof.sizes[k] <= ell)
    sizes = [Hv.k_heavy_size(t, k, d)[0] for k in range(1, max(int(t.degrees.max()), 1) + 2)]
    assert sizes == sorted(sizes)
    assert sizes[-1] == t.n
    B = sizes[1]
    assert B == sum(Hv.pattern_count(t, d, Hv.PatternSpec.binary_blocks(k)) for k in range(H + 1))
    rest = sum(Hv.pattern_count(t, d, Hv.PatternSpec.blocks_then_big(k, 3)) for k in range(H + 1))
    assert B + rest == t.n
    for k in (1, 2, 3):
        m = Hv.max_distance_to_k_heavy(t, k, d)
        assert 0 <= m <= H
        assert (m == 0) == bool(Hv.k_heavy_mask(t, k, d).all())


@settings(max_examples=100, deadline=None)
@given(trees())
def test_sibling_rank_structure(t):
    d = Hv.compute(t)
    for v in range(t.n):
        kids = t.children(v)
        if kids.size == 0:
            continue
        r = d.rank[kids]
        assert sorted(r.tolist()) == list(range(1, kids.size + 1))
        by_rank = t.subtree_size[kids[np.argsort(r)]]
        assert np.all(np.diff(by_rank) <= 0)
        for a in range(kids.size):
            for b in range(a + 1, kids.size):
                if t.subtree_size[kids[a]] == t.subtree_size[kids[b]]:
                    assert r[a] < r[b]


def test_large_tree_fast_and_consistent():
    t = sample_conditional(make_named("catalan"), 10**6, make_rng(1))
    rep = Hv.report(t)
    assert rep["L"] <= rep["H"]
    assert rep["B"] == t.n  # binary trees: every rank is <= 2
    assert rep["maxdist"]["2"] == 0
    assert rep["maxdist"]["1"] > 0


def test_report_keys():
    rep = Hv.report(SEVEN)
    assert rep["B"] == 6 and rep["L"] == 2
    assert rep["P_rle"] == {"start": 7, "drops": [[4, 1], [2, 1]]}
    assert rep["maxdist"] == {"1": 2, "2": 1, "3": 0, "4": 0}
    assert rep["patterns"]["heavy_path"] == 3


def test_wrong_decomposition():
    with pytest.raises(DomainError):
        Hv.heavy_path(SEVEN, Hv.compute(from_degrees([1, 0])))
