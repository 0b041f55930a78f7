"""Sibling ranks, k-heavy subtrees, the heavy path and index-sequence patterns.

Every child gets a rank among its siblings: 1 for the largest subtree,
ties going to the earlier node in preorder.  ``rho_star`` is the largest
rank seen on the way down from the root; the k-heavy tree is the set of
nodes with ``rho_star <= k`` (the root has ``rho_star = 0``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConfigurationError, DomainError
from .tree import OrderedTree


@njit(cache=True)
def _ranks(deg, size):
    n = deg.shape[0]
    rank = np.zeros(n, np.int64)
    kids = np.empty(max(1, deg.max()), np.int64)
    for v in range(n):
        d = deg[v]
        if d == 0:
            continue
        c = v + 1
        for i in range(d):
            kids[i] = c
            c += size[c]
        # stable insertion sort on decreasing size keeps preorder among ties
        for i in range(1, d):
            x = kids[i]
            j = i - 1
            while j >= 0 and size[kids[j]] < size[x]:
                kids[j + 1] = kids[j]
                j -= 1
            kids[j + 1] = x
        for i in range(d):
            rank[kids[i]] = i + 1
    return rank


@njit(cache=True)
def _rho_star(rank, parent):
    n = rank.shape[0]
    out = np.zeros(n, np.int64)
    for v in range(1, n):
        r = out[parent[v]]
        out[v] = rank[v] if rank[v] > r else r
    return out


@dataclass(frozen=True, eq=False)
class HeavyDecomposition:
    tree: OrderedTree
    rank: np.ndarray
    rho_star: np.ndarray


def compute(tree: OrderedTree) -> HeavyDecomposition:
    rank = _ranks(tree.degrees, tree.subtree_size)
    rho = _rho_star(rank, tree.parent)
    rank.setflags(write=False)
    rho.setflags(write=False)
    return HeavyDecomposition(tree, rank, rho)


def _decomp(tree, decomp):
    if decomp is None:
        return compute(tree)
    if decomp.tree is not tree and decomp.tree != tree:
        raise DomainError("decomposition belongs to a different tree")
    return decomp


def k_heavy_mask(tree: OrderedTree, k: int, decomp: HeavyDecomposition | None = None) -> np.ndarray:
    if k < 1:
        raise DomainError("k must be >= 1")
    return _decomp(tree, decomp).rho_star <= k


def k_heavy_size(tree: OrderedTree, k: int, decomp: HeavyDecomposition | None = None):
    """Size of the k-heavy tree and its (ancestor-closed) membership mask."""
    mask = k_heavy_mask(tree, k, decomp)
    return int(mask.sum()), mask


@dataclass(frozen=True, eq=False)
class HeavyPathProfile:
    """Nodes of the heavy path and the subtree sizes along it.

    ``sizes[k]`` is the subtree size at level ``k`` of the heavy path.
    ``q(ell)`` is the first level whose size is at most ``ell``; it is
    defined for ``1 <= ell <= n`` only (sizes never reach 0).
    """

    nodes: np.ndarray
    sizes: np.ndarray

    @property
    def length(self) -> int:
        return int(self.nodes.shape[0] - 1)

    @property
    def n(self) -> int:
        return int(self.sizes[0])

    def q(self, ell):
        ell = np.asarray(ell)
        if np.any(ell < 1) or np.any(ell > self.n):
            raise DomainError(f"Q is defined for 1 <= ell <= {self.n}")
        # sizes strictly decrease, so count the levels still above ell
        return np.searchsorted(-self.sizes, -ell, side="left")

    def q_values(self) -> np.ndarray:
        """``Q(ell)`` for ``ell = 1..n``."""
        return self.q(np.arange(1, self.n + 1))

    def run_length_sizes(self) -> dict:
        """``{"start": n, "drops": [[drop, repeat], ...]}`` for the size profile.

        Long heavy paths mostly shed one leaf per level, so the drop
        sequence compresses well.
        """
        drops = []
        for s in (-np.diff(self.sizes)).tolist():
            if drops and drops[-1][0] == s:
                drops[-1][1] += 1
            else:
                drops.append([s, 1])
        return {"start": self.n, "drops": drops}


@njit(cache=True)
def _heavy_path(deg, size, rank):
    n = deg.shape[0]
    nodes = np.empty(n, np.int64)
    v = 0
    L = 0
    nodes[0] = 0
    while deg[v] > 0:
        c = v + 1
        for _ in range(deg[v]):
            if rank[c] == 1:
                break
            c += size[c]
        v = c
        L += 1
        nodes[L] = v
    return nodes[: L + 1].copy()


def heavy_path(tree: OrderedTree, decomp: HeavyDecomposition | None = None) -> HeavyPathProfile:
    d = _decomp(tree, decomp)
    nodes = _heavy_path(tree.degrees, tree.subtree_size, d.rank)
    return HeavyPathProfile(nodes, tree.subtree_size[nodes])


@njit(cache=True)
def _max_distance(depth, parent, rho_star, k):
    n = depth.shape[0]
    anchor = np.empty(n, np.int64)
    anchor[0] = 0
    best = 0
    for v in range(1, n):
        if rho_star[v] <= k:
            anchor[v] = depth[v]
        else:
            anchor[v] = anchor[parent[v]]
            d = depth[v] - anchor[v]
            if d > best:
                best = d
    return best


def max_distance_to_k_heavy(tree: OrderedTree, k: int, decomp: HeavyDecomposition | None = None) -> int:
    """Largest distance from a node to the k-heavy tree.

    The k-heavy tree is ancestor-closed, so the closest member of any node
    is its deepest ancestor inside it.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    d = _decomp(tree, decomp)
    return int(_max_distance(tree.depth, tree.parent, d.rho_star, k))


def max_kth_subtree(tree: OrderedTree, k: int, decomp: HeavyDecomposition | None = None):
    """``(max_v N_k(v), max_v N_{k+}(v))`` over all nodes."""
    if k < 1:
        raise DomainError("k must be >= 1")
    d = _decomp(tree, decomp)
    sel = d.rank == k
    nk = int(tree.subtree_size[sel].max()) if sel.any() else 0
    tail = d.rank >= k
    if not tail.any():
        return nk, 0
    acc = np.bincount(tree.parent[tail], weights=tree.subtree_size[tail], minlength=tree.n)
    return nk, int(acc.max())


def root_order_stats(tree: OrderedTree, decomp: HeavyDecomposition | None = None) -> np.ndarray:
    """``N_1, N_2, ...`` at the root."""
    d = _decomp(tree, decomp)
    kids = tree.children(0)
    return tree.subtree_size[kids][np.argsort(d.rank[kids])]


# pattern kinds
HEAVY_PATH, BINARY_BLOCKS, BLOCKS_THEN_BIG, ALL_GE2 = range(4)
_KIND_NAMES = {
    "heavy_path": HEAVY_PATH,
    "binary_blocks": BINARY_BLOCKS,
    "blocks_then_big": BLOCKS_THEN_BIG,
    "all_ge2": ALL_GE2,
}


@dataclass(frozen=True)
class PatternSpec:
    """A language of index sequences from a fixed family.

    - ``heavy_path``: ``1*``
    - ``binary_blocks(k)``: ``(1*2)^k 1*``
    - ``blocks_then_big(k, j)``: ``(1*2)^k 1* (j+) N*`` with ``j >= 3``
    - ``all_ge2``: ``{2, 3, ...}*``
    """

    kind: int
    k: int = 0
    j: int = 3

    def __post_init__(self):
        if self.kind not in range(4):
            raise ConfigurationError(f"unknown pattern kind {self.kind!r}")
        if self.k < 0:
            raise ConfigurationError("block count must be >= 0")
        if self.kind == BLOCKS_THEN_BIG and self.j < 3:
            raise ConfigurationError("blocks_then_big needs j >= 3 so the split point is unambiguous")

    @classmethod
    def heavy_path(cls):
        return cls(HEAVY_PATH)

    @classmethod
    def binary_blocks(cls, k):
        return cls(BINARY_BLOCKS, k)

    @classmethod
    def blocks_then_big(cls, k, j=3):
        return cls(BLOCKS_THEN_BIG, k, j)

    @classmethod
    def all_ge2(cls):
        return cls(ALL_GE2)

    @classmethod
    def parse(cls, text: str) -> "PatternSpec":
        """Parse ``heavy_path``, ``binary_blocks:1``, ``blocks_then_big:0:3``, ``all_ge2``."""
        parts = re.split(r"[:(),\s]+", text.strip())
        parts = [p for p in parts if p]
        if not parts or parts[0] not in _KIND_NAMES:
            raise ConfigurationError(f"unknown pattern {text!r}")
        kind = _KIND_NAMES[parts[0]]
        try:
            args = [int(x) for x in parts[1:]]
        except ValueError:
            raise ConfigurationError(f"bad pattern arguments in {text!r}") from None
        if kind == BINARY_BLOCKS and len(args) != 1:
            raise ConfigurationError("binary_blocks takes one argument k")
        if kind == BLOCKS_THEN_BIG and len(args) not in (1, 2):
            raise ConfigurationError("blocks_then_big takes k and optionally j")
        if kind in (HEAVY_PATH, ALL_GE2) and args:
            raise ConfigurationError(f"{parts[0]} takes no arguments")
        return cls(kind, *args)

    def __str__(self):
        name = {v: k for k, v in _KIND_NAMES.items()}[self.kind]
        if self.kind == BINARY_BLOCKS:
            return f"{name}:{self.k}"
        if self.kind == BLOCKS_THEN_BIG:
            return f"{name}:{self.k}:{self.j}"
        return name


DEAD = -1
TAIL = -2


@njit(cache=True)
def _pattern_states(rank, parent, kind, k, j):
    n = rank.shape[0]
    state = np.empty(n, np.int64)
    state[0] = 0
    count = 0
    for v in range(n):
        if v > 0:
            s = state[parent[v]]
            r = rank[v]
            if s == DEAD:
                ns = DEAD
            elif kind == 0:
                ns = 0 if r == 1 else DEAD
            elif kind == 1:
                if r == 1:
                    ns = s
                elif r == 2:
                    ns = s + 1 if s < k else DEAD
                else:
                    ns = DEAD
            elif kind == 2:
                if s == TAIL:
                    ns = TAIL
                elif r == 1:
                    ns = s
                elif r == 2:
                    ns = s + 1 if s < k else DEAD
                elif r >= j:
                    ns = TAIL if s == k else DEAD
                else:
                    ns = DEAD
            else:
                ns = 0 if r >= 2 else DEAD
            state[v] = ns
        s = state[v]
        if kind == 0 or kind == 3:
            if s == 0:
                count += 1
        elif kind == 1:
            if s == k:
                count += 1
        elif s == TAIL:
            count += 1
    return count


def pattern_count(tree: OrderedTree, decomp: HeavyDecomposition | None, pattern) -> int:
    """Number of nodes whose index sequence lies in ``pattern``."""
    if isinstance(pattern, str):
        pattern = PatternSpec.parse(pattern)
    if not isinstance(pattern, PatternSpec):
        raise ConfigurationError(f"unknown pattern {pattern!r}")
    d = _decomp(tree, decomp)
    return int(_pattern_states(d.rank, tree.parent, pattern.kind, pattern.k, pattern.j))


def report(tree: OrderedTree, k: int = 2, kmax: int = 4, decomp=None) -> dict:
    """Summary used by the ``heavy`` CLI subcommand."""
    d = _decomp(tree, decomp)
    prof = heavy_path(tree, d)
    return {
        "n": tree.n,
        "k": k,
        "B": k_heavy_size(tree, 2, d)[0],
        "k_heavy_size": k_heavy_size(tree, k, d)[0],
        "L": prof.length,
        "H": int(tree.depth.max()),
        "P_rle": prof.run_length_sizes(),
        "maxdist": {str(i): max_distance_to_k_heavy(tree, i, d) for i in range(1, kmax + 1)},
        "max_Nk": {str(i): list(max_kth_subtree(tree, i, d)) for i in range(1, kmax + 1)},
        "patterns": {
            str(p): pattern_count(tree, d, p)
            for p in (
                PatternSpec.heavy_path(),
                PatternSpec.binary_blocks(1),
                PatternSpec.blocks_then_big(0),
                PatternSpec.all_ge2(),
            )
        },
    }
