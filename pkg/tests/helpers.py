"""Shared generators and the brute-force transport oracle used across tests."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from treewass import make_measure, tree_from_parents


def random_tree(rng: np.random.Generator, n: int, exact: bool = True, lo: float = 0.1, hi: float = 10.0):
    parent = [-1] + [int(rng.integers(0, i)) for i in range(1, n)]
    if exact:
        # uniform on the grid lo, lo + 0.1, ..., hi
        weight = [0] + [Fraction(int(k), 10) for k in rng.integers(round(lo * 10), round(hi * 10) + 1, size=n - 1)]
    else:
        weight = [0.0] + rng.uniform(lo, hi, size=n - 1).tolist()
    return tree_from_parents(parent, weight, 0)


def random_measure(rng: np.random.Generator, points, max_support: int = 8, exact: bool = True):
    k = int(rng.integers(1, min(len(points), max_support) + 1))
    idx = rng.choice(len(points), size=k, replace=False)
    if exact:
        ints = [int(v) for v in rng.integers(1, 50, size=k)]
        total = sum(ints)
        return make_measure([(points[int(i)], Fraction(v, total)) for i, v in zip(idx, ints)])
    w = rng.dirichlet(np.ones(k))
    return make_measure([(points[int(i)], float(v)) for i, v in zip(idx, w / w.sum())])


def instances(seed: int, count: int, n_range=(2, 40), max_support: int = 8, exact: bool = True):
    """Random ``(tree, mu, nu)`` triples."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        t = random_tree(rng, n, exact)
        pts = list(t.labels)
        yield t, random_measure(rng, pts, max_support, exact), random_measure(rng, pts, max_support, exact)


def brute_force_transport(dist, mu, nu):
    """Minimum cost over all basic feasible transports (spanning-tree supports).

    Only for tiny supports: enumerates every (a+b-1)-subset of the a*b cells.
    ``dist`` is a callable ``dist(x, y)``.
    """
    src = list(mu.items())
    dst = list(nu.items())
    a, b = len(src), len(dst)
    cells = [(i, j) for i in range(a) for j in range(b)]
    best = None
    for chosen in itertools.combinations(cells, a + b - 1):
        flows = _tree_flows(chosen, [m for _, m in src], [m for _, m in dst])
        if flows is None:
            continue
        cost = sum((f * dist(src[i][0], dst[j][0]) for (i, j), f in flows.items()), 0)
        if best is None or cost < best:
            best = cost
    return best


def _tree_flows(chosen, supply, demand):
    a = len(supply)
    uf = list(range(a + len(demand)))

    def find(x):
        while uf[x] != x:
            x = uf[x]
        return x

    for i, j in chosen:
        ri, rj = find(i), find(a + j)
        if ri == rj:
            return None
        uf[ri] = rj
    supply, demand = list(supply), list(demand)
    left = set(chosen)
    flows = {}
    while left:
        for i, j in list(left):
            row = [c for c in left if c[0] == i]
            col = [c for c in left if c[1] == j]
            if len(row) == 1:
                f = supply[i]
            elif len(col) == 1:
                f = demand[j]
            else:
                continue
            if f < 0:
                return None
            flows[(i, j)] = f
            supply[i] -= f
            demand[j] -= f
            left.discard((i, j))
            break
        else:
            return None
    if any(s != 0 for s in supply) or any(d != 0 for d in demand):
        return None
    return flows


@st.composite
def exact_trees(draw, min_n: int = 1, max_n: int = 12):
    n = draw(st.integers(min_n, max_n))
    parent = [-1] + [draw(st.integers(0, i - 1)) for i in range(1, n)]
    weight = [0] + [Fraction(draw(st.integers(1, 40)), 4) for _ in range(1, n)]
    return tree_from_parents(parent, weight, 0)


@st.composite
def exact_measures(draw, points, max_support: int = 6):
    pts = draw(st.lists(st.sampled_from(list(points)), min_size=1, max_size=max_support, unique=True))
    ints = draw(st.lists(st.integers(1, 30), min_size=len(pts), max_size=len(pts)))
    total = sum(ints)
    return make_measure([(p, Fraction(v, total)) for p, v in zip(pts, ints)])


@st.composite
def tree_and_measures(draw, count: int = 2, max_n: int = 12):
    t = draw(exact_trees(max_n=max_n))
    return (t, *[draw(exact_measures(t.labels)) for _ in range(count)])
