"""Random Apollonian networks through their ternary dual tree.

Triangle ``{a, b, c}`` (corners sorted, center ``d``) has the three
children ``{a, b, d}``, ``{b, c, d}``, ``{a, c, d}`` in that order.  Vertex
ids start at 1, 2, 3 for the outer triangle; centers are numbered in
preorder of the subdivided triangles.

Long simple paths are built recursively.  A path entering a subdivided
triangle at corner ``a`` and leaving at corner ``b`` goes ``a -> center ->
b`` through two of the three children; any two of them can be chosen, so
at every triangle the path descends into the two children with the most
subdivisions.  The visited triangles are therefore exactly the 2-heavy
tree of the dual tree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from . import heavy
from .errors import DomainError, InvariantViolation
from .offspring import make_named
from .sampler import sample_conditional_multiset
from .tree import INDEX, OrderedTree, from_degrees


@dataclass(frozen=True, eq=False)
class ApollonianNetwork:
    num_vertices: int
    edges: np.ndarray  # (E, 2), u < v, lexicographically sorted
    triangles: np.ndarray  # (N, 3) sorted corner ids per dual node
    centers: np.ndarray  # (N,) center id, 0 for leaves
    dual: OrderedTree

    @property
    def num_subdivisions(self) -> int:
        return int((self.centers > 0).sum())

    def edge_keys(self) -> np.ndarray:
        return self.edges[:, 0] * (self.num_vertices + 1) + self.edges[:, 1]


@dataclass(frozen=True, eq=False)
class SimplePath:
    vertices: np.ndarray
    selected_internal: int

    def __len__(self):
        return int(self.vertices.shape[0])


@njit(cache=True)
def _replay(deg, size):
    n = deg.shape[0]
    tri = np.zeros((n, 3), np.int64)
    center = np.zeros(n, np.int64)
    m = 0
    for v in range(n):
        if deg[v] != 0:
            m += 1
    edges = np.empty((3 + 3 * m, 2), np.int64)
    edges[0, 0], edges[0, 1] = 1, 2
    edges[1, 0], edges[1, 1] = 1, 3
    edges[2, 0], edges[2, 1] = 2, 3
    ne = 3
    tri[0, 0], tri[0, 1], tri[0, 2] = 1, 2, 3
    nxt = 4
    for v in range(n):
        if deg[v] == 0:
            continue
        a, b, c = tri[v, 0], tri[v, 1], tri[v, 2]
        d = nxt
        nxt += 1
        center[v] = d
        for x in (a, b, c):
            edges[ne, 0] = x
            edges[ne, 1] = d
            ne += 1
        c0 = v + 1
        c1 = c0 + size[c0]
        c2 = c1 + size[c1]
        tri[c0, 0], tri[c0, 1], tri[c0, 2] = a, b, d
        tri[c1, 0], tri[c1, 1], tri[c1, 2] = b, c, d
        tri[c2, 0], tri[c2, 1], tri[c2, 2] = a, c, d
    return tri, center, edges, nxt - 1


def build_from_dual(tree: OrderedTree) -> ApollonianNetwork:
    """Deterministic network for a dual tree with all degrees in ``{0, 3}``."""
    bad = np.flatnonzero((tree.degrees != 0) & (tree.degrees != 3))
    if bad.size:
        raise DomainError(f"dual tree node {int(bad[0])} has {int(tree.degrees[bad[0]])} children; need 0 or 3")
    tri, center, edges, nv = _replay(tree.degrees, tree.subtree_size)
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    return ApollonianNetwork(int(nv), edges[order], tri, center, tree)


def sample_uniform(m: int, rng) -> ApollonianNetwork:
    """Uniform Apollonian network with ``m`` subdivisions (dual tree of size 3m+1)."""
    if m < 0:
        raise DomainError("m must be >= 0")
    dual = sample_conditional_multiset(make_named("apollonian_ternary"), 3 * m + 1, rng)
    return build_from_dual(dual)


def dual_tree(net: ApollonianNetwork) -> OrderedTree:
    return from_degrees(net.dual.degrees)


@njit(cache=True)
def _path(deg, size, rank, tri, center, a0, b0):
    n = deg.shape[0]
    out = np.empty(n + 2, np.int64)
    k = 0
    selected = 0
    # frames (triangle, entry corner, exit corner); each emits entry .. before exit
    st_t = np.empty(n + 1, np.int64)
    st_a = np.empty(n + 1, np.int64)
    st_b = np.empty(n + 1, np.int64)
    top = 0
    st_t[0], st_a[0], st_b[0] = 0, a0, b0
    kids = np.empty(3, np.int64)
    while top >= 0:
        t = st_t[top]
        a = st_a[top]
        b = st_b[top]
        top -= 1
        if deg[t] == 0:
            out[k] = a
            k += 1
            continue
        selected += 1
        c = center[t]
        kids[0] = t + 1
        kids[1] = kids[0] + size[kids[0]]
        kids[2] = kids[1] + size[kids[1]]
        # children missing a, missing b, missing the third corner
        miss_a = -1
        miss_b = -1
        miss_x = -1
        for i in range(3):
            ch = kids[i]
            has_a = tri[ch, 0] == a or tri[ch, 1] == a or tri[ch, 2] == a
            has_b = tri[ch, 0] == b or tri[ch, 1] == b or tri[ch, 2] == b
            if not has_a:
                miss_a = ch
            elif not has_b:
                miss_b = ch
            else:
                miss_x = ch
        if rank[miss_x] == 3:
            first, second = miss_b, miss_a
        elif rank[miss_b] == 3:
            first, second = miss_x, miss_a
        else:
            first, second = miss_b, miss_x
        top += 1
        st_t[top], st_a[top], st_b[top] = second, c, b
        top += 1
        st_t[top], st_a[top], st_b[top] = first, a, c
    out[k] = b0
    k += 1
    return out[:k].copy(), selected


def heavy_simple_path(net: ApollonianNetwork) -> SimplePath:
    """Simple path from corner 1 to corner 2 through the 2-heavy triangles."""
    dual = net.dual
    d = heavy.compute(dual)
    # every entry pair reaches the same two heaviest children, so the
    # smallest ids are as good as any
    verts, selected = _path(dual.degrees, dual.subtree_size, d.rank, net.triangles, net.centers, 1, 2)
    path = SimplePath(verts, int(selected))
    if len(path) != 2 + path.selected_internal:
        raise InvariantViolation(
            f"path has {len(path)} vertices but {path.selected_internal} triangles were used"
        )
    return path


def verify_simple_path(net: ApollonianNetwork, path) -> bool:
    """True iff the vertices are distinct and consecutive ones are adjacent."""
    v = np.asarray(path.vertices if isinstance(path, SimplePath) else path, dtype=INDEX)
    if v.size == 0:
        return False
    if np.any(v < 1) or np.any(v > net.num_vertices):
        return False
    if np.unique(v).size != v.size:
        return False
    if v.size == 1:
        return True
    lo = np.minimum(v[:-1], v[1:])
    hi = np.maximum(v[:-1], v[1:])
    keys = lo * (net.num_vertices + 1) + hi
    return bool(np.all(np.isin(keys, net.edge_keys())))
