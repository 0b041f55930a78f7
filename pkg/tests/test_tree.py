import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwheavy import tree as T
from gwheavy.errors import DomainError, MalformedTreeError
from gwheavy.sampler import cycle_rotate

SEVEN = [3, 0, 1, 0, 2, 0, 0]


def random_degrees(draw_list):
    """Any list of non-negative ints can be rotated into a tree after fixing the sum."""
    inc = np.asarray(draw_list, dtype=np.int64) - 1
    return cycle_rotate(inc) + 1


@st.composite
def trees(draw, max_n=60):
    n = draw(st.integers(1, max_n))
    # choose n-1 total children spread over n slots
    cuts = sorted(draw(st.lists(st.integers(0, n - 1), min_size=n - 1, max_size=n - 1)))
    counts = np.bincount(np.asarray(cuts, dtype=np.int64), minlength=n) if n > 1 else np.zeros(1, np.int64)
    perm = draw(st.permutations(list(range(n))))
    return T.from_degrees(random_degrees(counts[perm]))


def naive_sizes(deg):
    # recursive definition, fine for small trees
    pos = 0
    sizes = [0] * len(deg)

    def rec():
        nonlocal pos
        v = pos
        pos += 1
        s = 1
        for _ in range(deg[v]):
            s += rec()
        sizes[v] = s
        return s

    rec()
    return sizes


def test_seven():
    t = T.from_degrees(SEVEN)
    assert t.n == 7
    assert t.subtree_size.tolist() == [7, 1, 2, 1, 3, 1, 1]
    assert T.lukasiewicz_path(t).tolist() == [0, 2, 1, 1, 0, 1, 0, -1]
    assert T.contour_process(t).tolist() == [0, 1, 0, 1, 2, 1, 0, 1, 2, 1, 2, 1, 0]
    assert T.fringe_counts(t).tolist() == [4, 1, 1, 0, 0, 0, 1]
    assert T.height(t) == 2
    assert T.subtree_order_stats(t, 0).tolist() == [3, 2, 1]
    assert T.subtree_order_stats(t, 4).tolist() == [1, 1]
    assert T.subtree_order_stats(t, 1).tolist() == []
    assert t.parent.tolist() == [-1, 0, 0, 2, 0, 4, 4]
    assert t.children(0).tolist() == [1, 2, 4]


def test_small_cases():
    s = T.from_degrees([0])
    assert s.n == 1 and s.depth.tolist() == [0]
    assert T.lukasiewicz_path(s).tolist() == [0, -1]
    assert T.contour_process(s).tolist() == [0]
    assert T.fringe_counts(s).tolist() == [1]
    p = T.from_degrees([1, 1, 0])
    assert T.lukasiewicz_path(p).tolist() == [0, 0, 0, -1]
    assert T.contour_process(p).tolist() == [0, 1, 2, 1, 0]
    assert T.fringe_counts(p).tolist() == [1, 1, 1]
    assert T.height(T.from_degrees([1] * 9 + [0])) == 9


def test_malformed():
    with pytest.raises(MalformedTreeError) as e:
        T.from_degrees([2, 0])
    assert e.value.index == 1
    with pytest.raises(MalformedTreeError) as e:
        T.from_degrees([1, 0, 0])
    assert e.value.index == 1
    with pytest.raises(MalformedTreeError):
        T.from_degrees([])
    with pytest.raises(MalformedTreeError):
        T.from_degrees([1, -1, 1])
    assert issubclass(MalformedTreeError, DomainError)


def test_deep_path_no_recursion():
    n = 10**6
    t = T.from_degrees(np.r_[np.ones(n - 1, np.int64), 0])
    assert T.height(t) == n - 1
    assert t.subtree_size[0] == n
    assert T.contour_process(t).shape == (2 * n - 1,)


@settings(max_examples=150, deadline=None)
@given(trees())
def test_structural_invariants(t):
    n = t.n
    deg = t.degrees
    S = T.lukasiewicz_path(t)
    assert S[0] == 0 and S[-1] == -1 and np.all(S[:-1] >= 0)
    assert t.subtree_size.tolist() == naive_sizes(deg.tolist())
    assert t.subtree_size[0] == n
    assert np.all(t.depth[1:] == t.depth[t.parent[1:]] + 1)
    C = T.contour_process(t)
    assert C.size == 2 * n - 1 and C[0] == 0 and C[-1] == 0
    assert np.all(np.abs(np.diff(C)) == 1)
    assert C.max() == T.height(t)
    assert int((C == 0).sum()) == deg[0] + 1
    Z = T.fringe_counts(t)
    assert Z.sum() == n and Z[-1] == 1
    assert (np.arange(1, n + 1) * Z).sum() == t.subtree_size.sum()
    assert T.from_degrees(deg) == t


@settings(max_examples=100, deadline=None)
@given(trees())
def test_navigation_matches_children(t):
    for v in range(t.n):
        kids = t.children(v).tolist()
        walk = []
        c = t.first_child[v]
        while c != -1:
            walk.append(int(c))
            c = t.next_sibling[c]
        assert walk == kids
        assert int(t.subtree_size[v]) == 1 + sum(int(t.subtree_size[c]) for c in kids)


@settings(max_examples=100, deadline=None)
@given(trees())
def test_contour_superlevel_components(t):
    # components of {C > d - 1/2} at grid resolution: runs with values >= d
    C = T.contour_process(t)
    for d in range(1, T.height(t) + 1):
        above = np.r_[False, C >= d, False].astype(np.int8)
        edges = np.diff(above)
        runs = np.flatnonzero(edges == -1) - np.flatnonzero(edges == 1)
        # a depth-d subtree of size s covers 2s - 1 consecutive grid points
        got = sorted(runs.tolist())
        want = sorted((2 * t.subtree_size[t.depth == d] - 1).tolist())
        assert got == want


def test_order_stats_domain():
    with pytest.raises(DomainError):
        T.subtree_order_stats(T.from_degrees(SEVEN), 7)


def test_gwtree_round_trip(tmp_path):
    from gwheavy.offspring import make_named
    from gwheavy.sampler import make_rng, sample_conditional

    t = sample_conditional(make_named("catalan"), 500, make_rng(0))
    path = tmp_path / "a.gwtree"
    T.write_gwtree(path, t, "catalan", 2**63 + 5, rng="pcg64")
    text = path.read_text().splitlines()
    assert text[0].startswith("# gwtree v1 n=500 dist=catalan seed=9223372036854775813")
    back, header = T.read_gwtree(path)
    assert back == t
    assert np.array_equal(back.degrees, t.degrees)
    assert header["seed"] == 2**63 + 5 and header["rng"] == "pcg64"


def test_gwtree_bad_header(tmp_path):
    path = tmp_path / "b.gwtree"
    path.write_text("3 0 0 0\n")
    with pytest.raises(DomainError):
        T.read_gwtree(path)
    path.write_text("# gwtree v1 n=5 dist=x seed=0\n1 0\n")
    with pytest.raises(DomainError):
        T.read_gwtree(path)
