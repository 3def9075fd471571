"""Rooted weighted trees.

Vertices are stored as dense integer ids ``0..n-1``; the caller's labels
(any hashable, typically ints or strings) are kept alongside so that every
public function can speak in labels.  A non-root vertex ``v`` names the edge
to its parent, with ``weight[v]`` its length.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Sequence

import numpy as np

from .errors import CycleDetected, Disconnected, NonPositiveWeight, UnknownRoot, UnknownVertex

__all__ = [
    "Edge",
    "MetricTree",
    "build_tree",
    "tree_from_parents",
    "path_distance",
    "subtree_of",
]


@dataclass(frozen=True)
class Edge:
    """Edge named by its lower endpoint (the child)."""

    child: Hashable
    weight: object


@dataclass(frozen=True, eq=False)
class MetricTree:
    n: int
    root: int
    parent: tuple  # parent[root] == -1
    weight: tuple  # weight[root] == 0
    depth: tuple
    order: tuple  # vertex ids, deepest levels first
    labels: tuple
    children: tuple = field(repr=False)
    index: dict = field(repr=False)
    rank: tuple = field(repr=False)  # rank[v] = position of v in ``order``
    levels: tuple = field(repr=False)  # levels[d] = ids at depth d, ascending rank

    def id(self, label) -> int:
        try:
            return self.index[label]
        except (KeyError, TypeError):
            raise UnknownVertex(f"unknown vertex {label!r}") from None

    def label(self, vid: int):
        return self.labels[vid]

    @property
    def root_label(self):
        return self.labels[self.root]

    @property
    def height(self) -> int:
        return len(self.levels) - 1

    def edges(self) -> Iterator[Edge]:
        for v in self.order:
            if v != self.root:
                yield Edge(self.labels[v], self.weight[v])

    def edge_list(self) -> list[tuple]:
        """``(parent, child, weight)`` triples in label space."""
        lab = self.labels
        return [(lab[self.parent[v]], lab[v], self.weight[v]) for v in self.order if v != self.root]

    @cached_property
    def sweep_plan(self):
        """Arrays for a vectorized bottom-up sweep, indexed by position in ``order``.

        Returns ``(weight, segments)`` where ``weight[k]`` is the edge weight of
        ``order[k]`` and ``segments`` lists, deepest level first, tuples
        ``(lo, hi, seg_starts, targets)``: positions ``lo:hi`` form one level,
        split at ``seg_starts`` into runs sharing the parent at position
        ``targets``.  Parents are non-decreasing along a level because levels
        are filled in breadth-first order.
        """
        rank = np.asarray(self.rank, dtype=np.int64)
        order = np.asarray(self.order, dtype=np.int64)
        parent = np.asarray(self.parent, dtype=np.int64)
        weight = np.asarray([float(w) for w in self.weight])[order]
        parent_pos = np.where(parent[order] >= 0, rank[np.maximum(parent[order], 0)], -1)
        segments = []
        lo = 0
        for level in reversed(self.levels[1:]):
            hi = lo + len(level)
            p = parent_pos[lo:hi]
            starts = np.concatenate(([0], np.flatnonzero(np.diff(p)) + 1))
            segments.append((lo, hi, starts, p[starts]))
            lo = hi
        return weight, segments

    def rerooted(self, new_root) -> "MetricTree":
        return build_tree(self.edge_list(), new_root)

    def __len__(self) -> int:
        return self.n

    def __contains__(self, label) -> bool:
        try:
            return label in self.index
        except TypeError:
            return False


def _assign_ids(labels: list) -> list:
    if all(isinstance(x, int) and not isinstance(x, bool) for x in labels):
        return sorted(labels)
    return labels


def build_tree(edges: Iterable[Sequence], root) -> MetricTree:
    """Build a :class:`MetricTree` from an undirected edge list hung from ``root``.

    Raises ``NonPositiveWeight``, ``CycleDetected``, ``Disconnected`` or
    ``UnknownRoot``, each naming the offending edge or vertex.
    """
    edges = [tuple(e) for e in edges]
    seen: dict = {}
    for u, v, w in edges:
        if not w > 0:
            raise NonPositiveWeight(f"edge ({u!r}, {v!r}) has non-positive weight {w!r}")
        seen.setdefault(u, None)
        seen.setdefault(v, None)
    if not edges:
        seen[root] = None
    elif root not in seen:
        raise UnknownRoot(f"root {root!r} does not appear in the edge list")

    labels = _assign_ids(list(seen))
    index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)

    # union-find pass pins the first edge that closes a cycle
    uf = list(range(n))

    def find(a: int) -> int:
        while uf[a] != a:
            uf[a] = uf[uf[a]]
            a = uf[a]
        return a

    adj: list[list] = [[] for _ in range(n)]
    for u, v, w in edges:
        a, b = index[u], index[v]
        ra, rb = find(a), find(b)
        if ra == rb:
            raise CycleDetected(f"edge ({u!r}, {v!r}) closes a cycle")
        uf[ra] = rb
        adj[a].append((b, w))
        adj[b].append((a, w))

    r = index[root]
    parent = [-1] * n
    weight: list = [0] * n
    visited = [False] * n
    visited[r] = True
    queue = deque([r])
    while queue:
        a = queue.popleft()
        for b, w in adj[a]:
            if not visited[b]:
                visited[b] = True
                parent[b] = a
                weight[b] = w
                queue.append(b)
    if not all(visited):
        missing = labels[visited.index(False)]
        raise Disconnected(f"vertex {missing!r} is not connected to root {root!r}")
    # children keep edge-list order, which fixes the left-to-right convention
    children: list[list[int]] = [[] for _ in range(n)]
    for a in range(n):
        for b, _ in adj[a]:
            if parent[b] == a:
                children[a].append(b)
    return _finish(n, r, parent, weight, children, labels, index)


def tree_from_parents(parent: Sequence[int], weight: Sequence, root: int, labels: Sequence | None = None) -> MetricTree:
    """Fast constructor from a parent array (``parent[root] == -1``).

    Trusts the caller on acyclicity; only weights and connectivity are checked.
    """
    n = len(parent)
    parent = list(parent)
    weight = list(weight)
    weight[root] = 0
    children: list[list[int]] = [[] for _ in range(n)]
    for v, p in enumerate(parent):
        if v == root:
            continue
        if not weight[v] > 0:
            raise NonPositiveWeight(f"edge ({p}, {v}) has non-positive weight {weight[v]!r}")
        children[p].append(v)
    labels = list(range(n)) if labels is None else list(labels)
    index = {lab: i for i, lab in enumerate(labels)}
    return _finish(n, root, parent, weight, children, labels, index)


def _finish(n, r, parent, weight, children, labels, index) -> MetricTree:
    depth = [0] * n
    levels: list[list[int]] = [[r]]
    frontier = [r]
    count = 1
    while frontier:
        nxt = []
        d = len(levels)
        for a in frontier:
            for b in children[a]:
                depth[b] = d
                nxt.append(b)
        if nxt:
            levels.append(nxt)
            count += len(nxt)
        frontier = nxt
    if count != n:
        raise Disconnected(f"{n - count} vertices unreachable from root {labels[r]!r}")
    order = [v for level in reversed(levels) for v in level]
    rank = [0] * n
    for i, v in enumerate(order):
        rank[v] = i
    return MetricTree(
        n=n,
        root=r,
        parent=tuple(parent),
        weight=tuple(weight),
        depth=tuple(depth),
        order=tuple(order),
        labels=tuple(labels),
        children=tuple(tuple(c) for c in children),
        index=index,
        rank=tuple(rank),
        levels=tuple(tuple(lv) for lv in levels),
    )


def path_distance(t: MetricTree, u, v):
    """Sum of edge weights on the unique ``u``-``v`` path."""
    a, b = t.id(u), t.id(v)
    return _path_distance_ids(t, a, b)


def _path_distance_ids(t: MetricTree, a: int, b: int):
    if a > b:
        a, b = b, a
    parent, weight, depth = t.parent, t.weight, t.depth
    up_a = []
    up_b = []
    while depth[a] > depth[b]:
        up_a.append(weight[a])
        a = parent[a]
    while depth[b] > depth[a]:
        up_b.append(weight[b])
        b = parent[b]
    while a != b:
        up_a.append(weight[a])
        up_b.append(weight[b])
        a, b = parent[a], parent[b]
    # fixed summation order keeps float results symmetric
    total = 0
    for w in up_a:
        total = total + w
    for w in reversed(up_b):
        total = total + w
    return total


def subtree_of(t: MetricTree, v) -> Iterator:
    """Yield the labels of all descendants of ``v``, ``v`` included."""
    stack = [t.id(v)]
    while stack:
        a = stack.pop()
        yield t.labels[a]
        stack.extend(reversed(t.children[a]))
