"""Ordered rooted trees stored as preorder flat arrays.

Nodes are numbered ``0..n-1`` in preorder, root ``0``; ``parent[0] == -1``.
All derived arrays are produced by single iterative passes so path-like
trees of size 10^6 never touch the recursion limit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numba import njit

from .errors import DomainError, MalformedTreeError

INDEX = np.int64


@njit(cache=True)
def _structure(deg):
    n = deg.shape[0]
    parent = np.empty(n, np.int64)
    depth = np.empty(n, np.int64)
    size = np.ones(n, np.int64)
    # stack of nodes still expecting children
    stack = np.empty(n, np.int64)
    remaining = np.empty(n, np.int64)
    top = -1
    parent[0] = -1
    depth[0] = 0
    if deg[0] > 0:
        top = 0
        stack[0] = 0
        remaining[0] = deg[0]
    for v in range(1, n):
        u = stack[top]
        parent[v] = u
        depth[v] = depth[u] + 1
        remaining[top] -= 1
        if remaining[top] == 0:
            top -= 1
        if deg[v] > 0:
            top += 1
            stack[top] = v
            remaining[top] = deg[v]
    for v in range(n - 1, 0, -1):
        size[parent[v]] += size[v]
    return parent, depth, size


@njit(cache=True)
def _navigation(deg, parent, size):
    n = deg.shape[0]
    first = np.full(n, -1, np.int64)
    nxt = np.full(n, -1, np.int64)
    for v in range(n):
        if deg[v] > 0:
            first[v] = v + 1
        if v > 0:
            u = parent[v]
            w = v + size[v]
            if w < u + size[u]:
                nxt[v] = w
    return first, nxt


@njit(cache=True)
def _contour(depth, parent):
    n = depth.shape[0]
    out = np.empty(2 * n - 1, np.int64)
    out[0] = 0
    j = 1
    for v in range(1, n):
        d = depth[v - 1]
        target = depth[parent[v]]
        while d > target:
            d -= 1
            out[j] = d
            j += 1
        out[j] = depth[v]
        j += 1
    d = depth[n - 1]
    while d > 0:
        d -= 1
        out[j] = d
        j += 1
    return out


@dataclass(frozen=True, eq=False)
class OrderedTree:
    degrees: np.ndarray
    parent: np.ndarray
    depth: np.ndarray
    subtree_size: np.ndarray

    @cached_property
    def first_child(self) -> np.ndarray:
        self._fill_navigation()
        return self.__dict__["first_child"]

    @cached_property
    def next_sibling(self) -> np.ndarray:
        self._fill_navigation()
        return self.__dict__["next_sibling"]

    def _fill_navigation(self):
        first, nxt = _navigation(self.degrees, self.parent, self.subtree_size)
        first.setflags(write=False)
        nxt.setflags(write=False)
        self.__dict__["first_child"] = first
        self.__dict__["next_sibling"] = nxt

    @property
    def n(self) -> int:
        return int(self.degrees.shape[0])

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return isinstance(other, OrderedTree) and np.array_equal(self.degrees, other.degrees)

    def __hash__(self):
        return hash(self.degrees.tobytes())

    def children(self, v: int) -> np.ndarray:
        out = np.empty(int(self.degrees[v]), INDEX)
        c = v + 1
        for i in range(out.shape[0]):
            out[i] = c
            c += self.subtree_size[c]
        return out

    def __repr__(self):
        head = " ".join(map(str, self.degrees[:12]))
        return f"OrderedTree(n={self.n}, degrees=[{head}{' ...' if self.n > 12 else ''}])"


def validate_degrees(seq) -> np.ndarray:
    deg = np.asarray(seq)
    if deg.ndim != 1 or deg.size == 0:
        raise MalformedTreeError("degree sequence must be a non-empty 1-d sequence")
    if not np.issubdtype(deg.dtype, np.integer):
        if not np.all(np.equal(np.mod(deg, 1), 0)):
            raise MalformedTreeError("degrees must be integers")
    deg = deg.astype(INDEX)
    if np.any(deg < 0):
        i = int(np.flatnonzero(deg < 0)[0])
        raise MalformedTreeError(f"negative degree at preorder index {i}", i)
    walk = np.cumsum(deg - 1)
    n = deg.size
    early = np.flatnonzero(walk[:-1] < 0)
    if early.size:
        i = int(early[0])
        raise MalformedTreeError(
            f"walk reaches -1 at preorder index {i} before the last node (n={n})", i
        )
    if walk[-1] != -1:
        raise MalformedTreeError(
            f"degrees sum to {int(deg.sum())}, a tree of {n} nodes needs {n - 1}", n - 1
        )
    return deg


def from_degrees(seq) -> OrderedTree:
    """Build a validated tree from its preorder child counts."""
    return from_valid_degrees(validate_degrees(seq))


def from_valid_degrees(deg: np.ndarray) -> OrderedTree:
    """Like :func:`from_degrees` for int64 sequences already known to be valid."""
    parent, depth, size = _structure(deg)
    for a in (deg, parent, depth, size):
        a.setflags(write=False)
    return OrderedTree(deg, parent, depth, size)


def lukasiewicz_path(tree: OrderedTree) -> np.ndarray:
    out = np.zeros(tree.n + 1, INDEX)
    np.cumsum(tree.degrees - 1, out=out[1:])
    return out


def contour_process(tree: OrderedTree) -> np.ndarray:
    """Depths along the depth-first walk, ``2n - 1`` entries."""
    return _contour(tree.depth, tree.parent)


def subtree_order_stats(tree: OrderedTree, v: int) -> np.ndarray:
    """Child subtree sizes of ``v``, largest first, ties kept in preorder."""
    if not 0 <= v < tree.n:
        raise DomainError(f"node {v} outside 0..{tree.n - 1}")
    sizes = tree.subtree_size[tree.children(v)]
    return sizes[np.argsort(-sizes, kind="stable")]


def fringe_counts(tree: OrderedTree) -> np.ndarray:
    """``Z[k-1]`` = number of nodes whose subtree has exactly ``k`` nodes."""
    return np.bincount(tree.subtree_size, minlength=tree.n + 1)[1:]


def height(tree: OrderedTree) -> int:
    return int(tree.depth.max())


HEADER = re.compile(r"^#\s*gwtree\s+v1\b(?P<rest>.*)$")


def write_gwtree(path, tree: OrderedTree, dist: str = "custom", seed: int = 0, **extra) -> None:
    """Write the ``gwtree v1`` text format (header line + degrees line)."""
    tokens = [f"n={tree.n}", f"dist={dist}", f"seed={int(seed)}"]
    tokens += [f"{k}={v}" for k, v in extra.items()]
    with open(path, "w") as fh:
        fh.write("# gwtree v1 " + " ".join(tokens) + "\n")
        fh.write(" ".join(map(str, tree.degrees.tolist())) + "\n")


def read_gwtree(path):
    """Return ``(tree, header)``; header values are strings except n, seed."""
    with open(path) as fh:
        first = fh.readline()
        body = fh.read().split()
    m = HEADER.match(first.strip())
    if not m:
        raise DomainError(f"{path}: missing '# gwtree v1' header")
    header = dict(tok.split("=", 1) for tok in m.group("rest").split() if "=" in tok)
    tree = from_degrees(np.array([int(x) for x in body], dtype=INDEX))
    if "n" in header:
        header["n"] = int(header["n"])
        if header["n"] != tree.n:
            raise DomainError(f"{path}: header says n={header['n']} but {tree.n} degrees follow")
    if "seed" in header:
        header["seed"] = int(header["seed"])
    return tree, header
