"""Earthmover distance on finite metric trees.

Three views of the same quantity:

* the closed formula ``sum_e w_e |mu(T_e) - nu(T_e)|`` (:func:`tree_wasserstein`),
* the isometric edge embedding into l1 (:func:`embed_measure`, :func:`l1_distance`),
* an explicit optimal coupling built by moving surplus mass up towards the
  root and then letting it fall into deficit subtrees (:func:`optimal_coupling`).

Everything here is generic over the number type: pass ``Fraction`` weights and
masses to get exact rational results.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from itertools import islice

import numpy as np

from ._numeric import FLUSH_TOL, MASS_TOL
from .errors import MassLeak
from .measure import DiscreteMeasure
from .tree import MetricTree, _path_distance_ids

# float inputs on trees with at least this many vertices per level on average
# take the vectorized sweep
VECTOR_MIN_LEVEL_SIZE = 32

__all__ = [
    "EmbeddingVector",
    "Coupling",
    "subtree_masses",
    "tree_wasserstein",
    "embed_measure",
    "l1_distance",
    "optimal_coupling",
    "coupling_cost",
]


@dataclass(frozen=True)
class EmbeddingVector:
    """Sparse l1 vector; missing coordinates read as zero."""

    entries: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.entries.get(key, 0)

    def __len__(self) -> int:
        return len(self.entries)

    def norm(self):
        return sum((abs(v) for v in self.entries.values()), 0)


@dataclass(frozen=True, eq=False)
class Coupling:
    """Sparse joint measure; ``entries[(x, y)]`` is mass sent from ``x`` to ``y``."""

    entries: dict
    left: DiscreteMeasure
    right: DiscreteMeasure

    def row_sums(self) -> dict:
        out: dict = {}
        for (x, _), m in self.entries.items():
            out[x] = out.get(x, 0) + m
        return out

    def col_sums(self) -> dict:
        out: dict = {}
        for (_, y), m in self.entries.items():
            out[y] = out.get(y, 0) + m
        return out

    def marginal_error(self):
        """Largest absolute deviation of either marginal from ``left``/``right``."""
        err = 0
        for sums, target in ((self.row_sums(), self.left), (self.col_sums(), self.right)):
            for k in set(sums) | set(target):
                err = max(err, abs(sums.get(k, 0) - target.get(k, 0)))
        return err


def _ids(t: MetricTree, m: DiscreteMeasure) -> list[tuple[int, object]]:
    return [(t.id(x), mass) for x, mass in m.items()]


def _accumulate(t: MetricTree, acc: list) -> list:
    """In-place bottom-up prefix: ``acc[v]`` becomes the total over ``T_v``."""
    parent = t.parent
    for v in islice(t.order, t.n - 1):  # root is last in order
        d = acc[v]
        if d:
            acc[parent[v]] += d
    return acc


def _subtree_array(t: MetricTree, m: DiscreteMeasure) -> list:
    acc: list = [0] * t.n
    for v, mass in _ids(t, m):
        acc[v] += mass
    return _accumulate(t, acc)


def subtree_masses(t: MetricTree, m: DiscreteMeasure) -> dict:
    """``{child label of e: m(T_e)}`` for every edge with non-zero subtree mass."""
    acc = _subtree_array(t, m)
    labels = t.labels
    return {labels[v]: acc[v] for v in t.order if v != t.root and acc[v]}


def tree_wasserstein(t: MetricTree, mu: DiscreteMeasure, nu: DiscreteMeasure):
    """Earthmover distance between ``mu`` and ``nu`` in one O(n) sweep."""
    if not (mu.exact and nu.exact) and t.height * VECTOR_MIN_LEVEL_SIZE <= t.n:
        return _tree_wasserstein_levels(t, mu, nu)
    acc: list = [0] * t.n
    for v, mass in _ids(t, mu):
        acc[v] += mass
    for v, mass in _ids(t, nu):
        acc[v] -= mass
    parent, weight = t.parent, t.weight
    total = 0
    for v in islice(t.order, t.n - 1):
        d = acc[v]
        if d:
            total += weight[v] * abs(d)
            acc[parent[v]] += d
    return total


def _tree_wasserstein_levels(t: MetricTree, mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    # same sweep, one segmented sum per depth level, indexed by position in order
    weight, segments = t.sweep_plan
    acc = np.zeros(t.n)
    rank = t.rank
    for m, sign in ((mu, 1.0), (nu, -1.0)):
        for x, mass in m.items():
            acc[rank[t.id(x)]] += sign * mass
    for lo, hi, starts, targets in segments:
        acc[targets] += np.add.reduceat(acc[lo:hi], starts)
    return float(np.dot(weight, np.abs(acc)))


def embed_measure(t: MetricTree, m: DiscreteMeasure) -> EmbeddingVector:
    """Coordinates ``w_e * m(T_e)`` indexed by edge child label."""
    acc = _subtree_array(t, m)
    labels, weight = t.labels, t.weight
    return EmbeddingVector({labels[v]: weight[v] * acc[v] for v in t.order if v != t.root and acc[v]})


def l1_distance(a: EmbeddingVector, b: EmbeddingVector):
    ea, eb = a.entries, b.entries
    total = 0
    for k, va in ea.items():
        total += abs(va - eb.get(k, 0))
    for k, vb in eb.items():
        if k not in ea:
            total += abs(vb)
    return total


# --- explicit coupling -------------------------------------------------------
#
# holdings[v] is the provenance list of mass currently sitting at v:
# [rank(source), source, mass] rows sorted by rank, so the lowest-numbered
# sources move first.


def _take(rows: list, x, tol, flush):
    """Split ``rows`` into (moved, kept) with ``moved`` totalling ``x``."""
    moved = []
    i = 0
    need = x
    while i < len(rows) and need > flush:
        rk, src, m = rows[i]
        if m - need <= flush:
            moved.append([rk, src, m])
            need -= m
            i += 1
        else:
            moved.append([rk, src, need])
            rest = m - need
            need = 0
            kept = [[rk, src, rest]] + rows[i + 1 :]
            break
    else:
        kept = rows[i:]
    if need > tol:
        raise MassLeak(f"vertex holds {x - need} but {x} must move")
    return moved, kept


def _merge(a: list, b: list) -> list:
    if not a:
        return b
    if not b:
        return a
    out: list = []
    for row in heapq.merge(a, b, key=lambda r: r[0]):
        if out and out[-1][0] == row[0]:
            out[-1] = [row[0], row[1], out[-1][2] + row[2]]
        else:
            out.append(list(row))
    return out


def optimal_coupling(t: MetricTree, mu: DiscreteMeasure, nu: DiscreteMeasure) -> Coupling:
    """Optimal coupling of ``mu`` and ``nu`` via the two-sweep transport.

    Sweep 1 walks levels from the deepest up to depth 1 and lifts the surplus
    ``mu(T_e) - nu(T_e) > 0`` of each edge to its parent vertex.  Sweep 2 walks
    from the root level down and lets the deficit ``nu(T_s) - mu(T_s) > 0`` of
    each child subtree fall into it.  Every move transfers whole provenance
    rows in ascending order number, splitting only the last one, so each unit
    of mass crosses each edge at most once and the coupling cost equals
    :func:`tree_wasserstein`.

    Entries are ``(source in mu, destination in nu) -> mass``.
    """
    exact = mu.exact and nu.exact
    tol = 0 if exact else MASS_TOL
    flush = 0 if exact else FLUSH_TOL
    smu = _subtree_array(t, mu)
    snu = _subtree_array(t, nu)
    rank, parent, children = t.rank, t.parent, t.children

    holdings: dict[int, list] = {}
    for v, mass in _ids(t, mu):
        holdings[v] = [[rank[v], v, mass]]

    def move(src: int, dst: int, x) -> None:
        moved, kept = _take(holdings.get(src, []), x, tol, flush)
        if kept:
            holdings[src] = kept
        else:
            holdings.pop(src, None)
        holdings[dst] = _merge(holdings.get(dst, []), moved)

    for depth in range(t.height, 0, -1):
        for v in t.levels[depth]:
            x = smu[v] - snu[v]
            if x > tol:
                move(v, parent[v], x)

    for depth in range(0, t.height):
        for r in t.levels[depth]:
            for s in children[r]:
                x = snu[s] - smu[s]
                if x > tol:
                    move(r, s, x)

    labels = t.labels
    entries: dict = {}
    for holder, rows in holdings.items():
        for _, src, m in rows:
            if m > flush:
                key = (labels[src], labels[holder])
                entries[key] = entries.get(key, 0) + m
    coupling = Coupling(entries, mu, nu)
    err = coupling.marginal_error()
    if err > (0 if exact else 1e-10):
        raise MassLeak(f"final marginals deviate by {err}")
    return coupling


def coupling_cost(t: MetricTree, c: Coupling):
    total = 0
    for (x, y), m in c.entries.items():
        total += m * _path_distance_ids(t, t.id(x), t.id(y))
    return total
