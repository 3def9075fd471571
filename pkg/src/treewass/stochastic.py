"""Stochastic tree embeddings and the l1 embedding of Wasserstein space they induce.

A :class:`StochasticTreeEmbedding` is a probability-weighted family of
non-contracting maps ``f_i`` from a finite metric into trees.  Pushing a
measure through every ``f_i`` and concatenating the tree edge embeddings,
scaled by ``p_i``, gives a map ``F`` with

    W(mu, nu) <= |F(mu) - F(nu)|_1 = sum_i p_i W_i(f_i mu, f_i nu) <= D W(mu, nu)

where ``D`` is the point-level distortion of the family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._numeric import MASS_TOL, is_exact
from .errors import EmptyMetric, NonContractionViolated, SinglePoint, TreeWassError, UnmappedPoint
from .measure import DiscreteMeasure, make_measure, pushforward
from .oracle import FiniteMetric, pairwise_distances, transport_lp
from .tree import MetricTree, _path_distance_ids, tree_from_parents
from .tree_ot import EmbeddingVector, embed_measure, l1_distance, tree_wasserstein

__all__ = [
    "Component",
    "StochasticTreeEmbedding",
    "DistortionReport",
    "identity_embedding",
    "validate_embedding",
    "frt_sample",
    "lift_measure",
    "wasserstein_l1_map",
    "wasserstein_distortion_audit",
    "random_measure",
    "random_measure_pairs",
]

CONTRACTION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Component:
    p: object
    tree: MetricTree
    f: dict  # source point label -> tree vertex label


@dataclass(frozen=True, eq=False)
class StochasticTreeEmbedding:
    components: tuple
    source: FiniteMetric

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        ps = [c.p for c in self.components]
        if not ps:
            raise TreeWassError("embedding needs at least one component")
        if any(p < 0 for p in ps):
            raise TreeWassError("component probabilities must be non-negative")
        total = sum(ps, 0)
        if abs(total - 1) > (0 if is_exact(*ps) else MASS_TOL):
            raise TreeWassError(f"component probabilities sum to {total}")
        for i, c in enumerate(self.components):
            for x in self.source.labels:
                if x not in c.f:
                    raise UnmappedPoint(f"component {i} does not map point {x!r}")
                if c.f[x] not in c.tree:
                    raise UnmappedPoint(f"component {i} maps {x!r} to unknown vertex {c.f[x]!r}")

    def __len__(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class DistortionReport:
    min_ratio: object
    max_ratio: object
    argmax_pair: tuple
    per_component_noncontraction: list
    mean_ratio: float = float("nan")
    pairs: int = 0

    def sandwich_holds(self, bound, tol: float = CONTRACTION_TOL) -> bool:
        """``1 <= min_ratio`` and ``max_ratio <= bound`` up to relative ``tol``."""
        return self.min_ratio >= 1 - tol and self.max_ratio <= bound * (1 + tol)


def identity_embedding(t: MetricTree) -> StochasticTreeEmbedding:
    """A tree metric embedded into its own tree with probability one."""
    source = pairwise_distances(t, cap=max(t.n, 1))
    p = Fraction(1) if is_exact(*t.weight) else 1.0
    return StochasticTreeEmbedding((Component(p, t, {x: x for x in t.labels}),), source)


def _contracts(tree_d, d, tol) -> bool:
    if tol == 0:
        return tree_d < d
    return tree_d < d - tol * max(1.0, float(d))


def validate_embedding(
    e: StochasticTreeEmbedding, strict: bool = True, tol: float = CONTRACTION_TOL
) -> DistortionReport:
    """Exhaustive pairwise audit of the expected stretch ``sum_i p_i d_i / d``.

    With ``strict`` a contracting component raises
    :class:`NonContractionViolated`; otherwise it is flagged in the report.
    """
    src = e.source
    n = src.n
    if n < 2:
        raise SinglePoint("distortion is undefined on fewer than two points")
    exact = src.exact and all(is_exact(c.p, *c.tree.weight) for c in e.components)
    tol = 0 if exact else tol
    labels = src.labels
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    stretch = [0] * len(pairs)
    ok = []
    for ci, comp in enumerate(e.components):
        t = comp.tree
        img = [t.id(comp.f[x]) for x in labels]
        good = True
        for k, (a, b) in enumerate(pairs):
            td = _path_distance_ids(t, img[a], img[b])
            d = src.dist[a][b]
            if _contracts(td, d, tol):
                if strict:
                    raise NonContractionViolated(ci, (labels[a], labels[b]), td, d)
                good = False
            stretch[k] += comp.p * td
        ok.append(good)
    ratios = [s / src.dist[a][b] for s, (a, b) in zip(stretch, pairs)]
    kmax = max(range(len(ratios)), key=ratios.__getitem__)
    a, b = pairs[kmax]
    return DistortionReport(
        min_ratio=min(ratios),
        max_ratio=ratios[kmax],
        argmax_pair=(labels[a], labels[b]),
        per_component_noncontraction=ok,
        mean_ratio=float(sum(float(r) for r in ratios) / len(ratios)),
        pairs=len(ratios),
    )


def frt_sample(m: FiniteMetric, seed: int, count: int) -> StochasticTreeEmbedding:
    """Sample ``count`` hierarchically separated trees, each with weight ``1/count``.

    Distances are rescaled so the smallest is 1.  Each tree draws a random
    point order and a scale ``beta = 2**U`` with ``U ~ Uniform[0, 1)``.  At
    level ``i`` (top ``delta = max(1, ceil(log2 diam))`` down to 0) every
    cluster is split by assigning each point to the first point in the order
    lying within ``beta * 2**(i-1)``; level-0 clusters are single points.  A
    level-``i`` cluster hangs from its parent by an edge of length
    ``beta * 2**i``, so two points first separated below level ``i`` sit
    ``2 * beta * (2**i - 1) >= beta * 2**i`` apart in the tree, at least the
    diameter of their common cluster: every tree dominates the metric.
    """
    n = m.n
    if n == 0:
        raise EmptyMetric("cannot embed an empty metric")
    if count < 1:
        raise TreeWassError("count must be at least 1")
    p = Fraction(1, count)
    if n == 1:
        t = tree_from_parents([-1], [0], 0, labels=["p0"])
        comps = [Component(p, t, {m.labels[0]: "p0"}) for _ in range(count)]
        return StochasticTreeEmbedding(comps, m)

    D = m.as_array()
    dmin = float(D[D > 0].min())
    Dn = D / dmin
    delta = max(1, math.ceil(math.log2(float(Dn.max()))))
    streams = np.random.SeedSequence(seed).spawn(count)
    comps = [_frt_tree(Dn, dmin, delta, np.random.default_rng(s), p, m.labels) for s in streams]
    return StochasticTreeEmbedding(comps, m)


def _frt_tree(Dn: np.ndarray, scale: float, delta: int, rng, p: Fraction, point_labels) -> Component:
    n = Dn.shape[0]
    beta = 2.0 ** rng.uniform(0.0, 1.0)
    perm = rng.permutation(n)
    within = Dn[:, perm]  # column k: distance to the k-th point in the order

    parent = [-1]
    weight = [0.0]
    labels = [f"c{delta}.0"]
    node_of = np.zeros(n, dtype=np.int64)  # current cluster node of each point
    for level in range(delta - 1, -1, -1):
        first = np.argmax(within <= beta * 2.0 ** (level - 1), axis=1)
        children: dict = {}
        new_nodes = np.empty(n, dtype=np.int64)
        for v in range(n):
            key = (int(node_of[v]), int(first[v]))
            node = children.get(key)
            if node is None:
                node = len(parent)
                children[key] = node
                parent.append(key[0])
                weight.append(beta * 2.0**level * scale)
                labels.append(f"p{v}" if level == 0 else f"c{level}.{len(children) - 1}")
            new_nodes[v] = node
        node_of = new_nodes
    t = tree_from_parents(parent, weight, 0, labels=labels)
    f = {point_labels[v]: f"p{v}" for v in range(n)}
    return Component(p, t, f)


def lift_measure(e: StochasticTreeEmbedding, m: DiscreteMeasure) -> list[DiscreteMeasure]:
    return [pushforward(c.f, m) for c in e.components]


def wasserstein_l1_map(e: StochasticTreeEmbedding, m: DiscreteMeasure) -> EmbeddingVector:
    """Concatenated, ``p_i``-scaled edge embeddings keyed by ``(component, edge)``."""
    out: dict = {}
    for i, (c, mi) in enumerate(zip(e.components, lift_measure(e, m))):
        for edge, val in embed_measure(c.tree, mi).entries.items():
            out[(i, edge)] = c.p * val
    return EmbeddingVector(out)


def wasserstein_distortion_audit(
    e: StochasticTreeEmbedding, samples: Sequence[tuple[DiscreteMeasure, DiscreteMeasure]], tol: float = CONTRACTION_TOL
) -> DistortionReport:
    """Ratios ``|F(mu) - F(nu)|_1 / W(mu, nu)`` with ``W`` from the exact oracle.

    ``per_component_noncontraction[i]`` records whether tree ``i`` alone never
    shrank a sampled pair.  Pairs with ``mu == nu`` are skipped.
    """
    ratios = []
    worst = None
    ok = [True] * len(e.components)
    for mu, nu in samples:
        wx, _ = transport_lp(e.source, mu, nu)
        if wx == 0:
            continue
        lifted_mu, lifted_nu = lift_measure(e, mu), lift_measure(e, nu)
        for i, c in enumerate(e.components):
            wi = tree_wasserstein(c.tree, lifted_mu[i], lifted_nu[i])
            if _contracts(wi, wx, 0 if (mu.exact and nu.exact and is_exact(wi)) else tol):
                ok[i] = False
        r = l1_distance(wasserstein_l1_map(e, mu), wasserstein_l1_map(e, nu)) / wx
        if worst is None or r > ratios[worst]:
            worst = len(ratios)
            pair = (mu, nu)
        ratios.append(r)
    if not ratios:
        raise SinglePoint("no sample pair with positive distance")
    return DistortionReport(
        min_ratio=min(ratios),
        max_ratio=ratios[worst],
        argmax_pair=pair,
        per_component_noncontraction=ok,
        mean_ratio=float(sum(float(r) for r in ratios) / len(ratios)),
        pairs=len(ratios),
    )


def random_measure(points: Sequence, rng: np.random.Generator, max_support: int = 8, exact: bool = False) -> DiscreteMeasure:
    """Support size uniform in ``[1, min(len(points), max_support)]``, Dirichlet(1) masses.

    In exact mode the Dirichlet draw is rounded to a rational grid and
    renormalized so the masses sum to exactly 1.
    """
    k = int(rng.integers(1, min(len(points), max_support) + 1))
    idx = rng.choice(len(points), size=k, replace=False)
    w = rng.dirichlet(np.ones(k))
    if exact:
        ints = [int(x * 10**6) + 1 for x in w]
        total = sum(ints)
        return make_measure([(points[int(i)], Fraction(q, total)) for i, q in zip(idx, ints)])
    w = w / w.sum()
    return make_measure([(points[int(i)], float(x)) for i, x in zip(idx, w)])


def random_measure_pairs(points: Sequence, count: int, seed: int, max_support: int = 8, exact: bool = False) -> list:
    rng = np.random.default_rng(seed)
    return [
        (random_measure(points, rng, max_support, exact), random_measure(points, rng, max_support, exact))
        for _ in range(count)
    ]
