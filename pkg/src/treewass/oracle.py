"""Ground-truth transport solvers for small finite metric spaces.

These are verification tools, not production solvers: the primal is a
successive-shortest-path min-cost flow on the bipartite support graph, the
dual is a linear program over 1-Lipschitz potentials.  Both run over
``Fraction`` inputs without losing exactness.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from ._numeric import FLUSH_TOL, MASS_TOL, is_exact
from .errors import InfeasibleMarginals, InvalidMetric, TooLarge
from .measure import DiscreteMeasure
from .tree import MetricTree, _path_distance_ids
from .tree_ot import Coupling

__all__ = [
    "ORACLE_CAP",
    "FiniteMetric",
    "make_metric",
    "euclidean_metric",
    "pairwise_distances",
    "transport_lp",
    "kr_dual_value",
]

ORACLE_CAP = 256


@dataclass(frozen=True, eq=False)
class FiniteMetric:
    """Dense symmetric distance matrix over ``labels`` (default ``0..n-1``)."""

    dist: tuple  # tuple of row tuples
    labels: tuple
    index: dict = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.dist)

    def __call__(self, x, y):
        return self.dist[self.index[x]][self.index[y]]

    def id(self, label) -> int:
        try:
            return self.index[label]
        except (KeyError, TypeError):
            raise InvalidMetric(f"point {label!r} is not in the metric space") from None

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.dist])

    @property
    def exact(self) -> bool:
        return all(is_exact(*row) for row in self.dist)


def make_metric(matrix, labels: Sequence | None = None, tol: float = MASS_TOL, validate: bool = True) -> FiniteMetric:
    """Wrap and validate a distance matrix.

    Float matrices are checked within ``tol``; int/Fraction matrices exactly.
    """
    rows = [list(r) for r in (matrix.tolist() if isinstance(matrix, np.ndarray) else matrix)]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise InvalidMetric("distance matrix is not square")
    labels = tuple(range(n)) if labels is None else tuple(labels)
    if len(labels) != n or len(set(labels)) != n:
        raise InvalidMetric("labels must be distinct and match the matrix size")
    if validate and n:
        _validate(rows, tol)
    return FiniteMetric(tuple(tuple(r) for r in rows), labels, {lab: i for i, lab in enumerate(labels)})


def _validate(rows: list, tol: float) -> None:
    exact = all(is_exact(*r) for r in rows)
    n = len(rows)
    eps = 0 if exact else tol
    for i in range(n):
        if rows[i][i] != 0:
            raise InvalidMetric(f"non-zero diagonal at {i}")
        for j in range(i + 1, n):
            if abs(rows[i][j] - rows[j][i]) > eps:
                raise InvalidMetric(f"asymmetric entry ({i}, {j})")
            if not rows[i][j] > 0:
                raise InvalidMetric(f"distinct points {i}, {j} at distance {rows[i][j]!r}")
    if exact:
        D = np.array(rows, dtype=object)
        for k in range(n):
            bad = D > D[:, k : k + 1] + D[k : k + 1, :]
            if bad.any():
                i, j = map(int, np.argwhere(bad)[0])
                raise InvalidMetric(f"triangle inequality fails for ({i}, {j}) via {k}")
    else:
        D = np.asarray(rows, dtype=float)
        for k in range(n):
            bad = D > D[:, k : k + 1] + D[k : k + 1, :] + tol
            if bad.any():
                i, j = map(int, np.argwhere(bad)[0])
                raise InvalidMetric(f"triangle inequality fails for ({i}, {j}) via {k}")


def euclidean_metric(points, labels: Sequence | None = None) -> FiniteMetric:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    diff = pts[:, None, :] - pts[None, :, :]
    D = np.sqrt((diff**2).sum(-1))
    return make_metric(D, labels)


def pairwise_distances(t: MetricTree, cap: int = ORACLE_CAP, points: Sequence | None = None) -> FiniteMetric:
    """All-pairs path distances, labelled by the tree's vertex labels.

    ``points`` restricts the matrix to a subset of vertices, which is all the
    transport oracle needs and keeps it usable on large trees.
    """
    labels = list(t.labels) if points is None else list(dict.fromkeys(points))
    n = len(labels)
    if n > cap:
        raise TooLarge(f"{n} points requested, oracle cap is {cap}")
    ids = [t.id(x) for x in labels]
    rows = [[0] * n for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            rows[a][b] = rows[b][a] = _path_distance_ids(t, ids[a], ids[b])
    return make_metric(rows, labels, validate=False)


# --- primal ------------------------------------------------------------------


def _marginals(m: FiniteMetric, mu: DiscreteMeasure, nu: DiscreteMeasure, cap: int, tol):
    src = [(m.id(x), w) for x, w in mu.items() if w != 0]
    dst = [(m.id(y), w) for y, w in nu.items() if w != 0]
    if len(src) > cap or len(dst) > cap:
        raise TooLarge(f"support sizes {len(src)}, {len(dst)} exceed oracle cap {cap}")
    tm = sum((w for _, w in src), 0)
    tn = sum((w for _, w in dst), 0)
    if abs(tm - 1) > tol or abs(tn - 1) > tol:
        raise InfeasibleMarginals(f"marginals sum to {tm} and {tn}, expected 1")
    return src, dst


def transport_lp(m: FiniteMetric, mu: DiscreteMeasure, nu: DiscreteMeasure, cap: int = ORACLE_CAP):
    """Exact optimal transport value and an optimal coupling.

    Successive shortest paths from the remaining supplies, with Bellman-Ford
    on the residual bipartite graph.  Returns ``(value, Coupling)``.
    """
    exact = mu.exact and nu.exact and m.exact
    tol = 0 if exact else MASS_TOL
    eps = 0 if exact else FLUSH_TOL
    src, dst = _marginals(m, mu, nu, cap, tol)
    a, b = len(src), len(dst)
    cost = [[m.dist[i][j] for j, _ in dst] for i, _ in src]
    supply = [w for _, w in src]
    demand = [w for _, w in dst]
    flow = [[0] * b for _ in range(a)]
    nodes = a + b
    # float mode ignores sub-rounding improvements, which would otherwise
    # form spurious negative cycles in the residual graph
    slack = 0 if exact else 1e-12 * max([1.0] + [float(c) for row in cost for c in row])

    for _ in range(4 * nodes * nodes + 10):
        if all(d <= eps for d in demand) or all(s <= eps for s in supply):
            break
        # nodes 0..a-1 are sources, a..a+b-1 sinks
        dist: list = [None] * nodes
        pred: list = [-1] * nodes
        for i in range(a):
            if supply[i] > eps:
                dist[i] = 0
        for _ in range(nodes):
            changed = False
            for i in range(a):
                di = dist[i]
                if di is None:
                    continue
                for j in range(b):
                    nd = di + cost[i][j]
                    if dist[a + j] is None or nd < dist[a + j] - slack:
                        dist[a + j] = nd
                        pred[a + j] = i
                        changed = True
            for j in range(b):
                dj = dist[a + j]
                if dj is None:
                    continue
                for i in range(a):
                    if flow[i][j] > eps:
                        nd = dj - cost[i][j]
                        if dist[i] is None or nd < dist[i] - slack:
                            dist[i] = nd
                            pred[i] = a + j
                            changed = True
            if not changed:
                break
        best = None
        for j in range(b):
            if demand[j] > eps and dist[a + j] is not None:
                if best is None or dist[a + j] < dist[a + best]:
                    best = j
        if best is None:
            break
        path = []
        node = a + best
        while pred[node] != -1:
            path.append((pred[node], node))
            node = pred[node]
            if len(path) > nodes:
                raise RuntimeError("cycle in shortest-path tree")
        start = node
        delta = min(supply[start], demand[best])
        for u, v in path:
            if u >= a:  # backward arc sink u -> source v cancels flow
                delta = min(delta, flow[v][u - a])
        for u, v in path:
            if u < a:
                flow[u][v - a] += delta
            else:
                flow[v][u - a] -= delta
        supply[start] -= delta
        demand[best] -= delta
    else:
        raise RuntimeError("transport solver did not converge")

    entries: dict = {}
    value = 0
    for i, (x, _) in enumerate(src):
        for j, (y, _) in enumerate(dst):
            f = flow[i][j]
            if f > eps:
                entries[(m.labels[x], m.labels[y])] = f
                value += f * cost[i][j]
    return value, Coupling(entries, mu, nu)


# --- dual --------------------------------------------------------------------


def kr_dual_value(m: FiniteMetric, mu: DiscreteMeasure, nu: DiscreteMeasure, cap: int = ORACLE_CAP):
    """``max sum_x f(x) (mu(x) - nu(x))`` over 1-Lipschitz ``f`` on the joint support.

    The LP is solved in floating point; in rational mode the optimal vertex is
    rebuilt exactly from its tight constraints (falling back to an exact
    simplex when that is ambiguous) and its value is returned as a Fraction.
    """
    exact = mu.exact and nu.exact and m.exact
    tol = 0 if exact else MASS_TOL
    src, dst = _marginals(m, mu, nu, cap, tol)
    charge: dict = {}
    for x, w in src:
        charge[x] = charge.get(x, 0) + w
    for y, w in dst:
        charge[y] = charge.get(y, 0) - w
    pts = sorted(charge)
    k = len(pts)
    if k <= 1:
        return Fraction(0) if exact else 0.0
    D = [[m.dist[p][q] for q in pts] for p in pts]
    c = [charge[p] for p in pts]

    # variables f(pts[1:]), f(pts[0]) pinned to 0
    nv = k - 1
    Df = np.array([[float(v) for v in row] for row in D])
    rows, rhs = [], []
    for i in range(1, k):
        for j in range(1, k):
            if i != j:
                r = np.zeros(nv)
                r[i - 1] = 1.0
                r[j - 1] = -1.0
                rows.append(r)
                rhs.append(Df[i, j])
    bounds = [(-Df[0, i], Df[0, i]) for i in range(1, k)]
    obj = -np.array([float(v) for v in c[1:]])
    res = linprog(
        obj,
        A_ub=np.array(rows) if rows else None,
        b_ub=np.array(rhs) if rhs else None,
        bounds=bounds,
        method="highs-ds",
    )
    if res.status != 0:
        raise RuntimeError(f"dual LP failed: {res.message}")
    if not exact:
        return float(-res.fun)

    f = _rebuild_exact(D, res.x)
    if f is None:
        f = _exact_simplex_potential(D, c)
    return sum((fi * ci for fi, ci in zip(f, c)), Fraction(0))


def _rebuild_exact(D: list, xf: np.ndarray):
    """Exact potentials from the tight-constraint graph of a float LP vertex."""
    k = len(D)
    f_float = np.concatenate([[0.0], xf])
    scale = max(1.0, max(float(v) for row in D for v in row))
    atol = 1e-7 * scale
    adj: list[list] = [[] for _ in range(k)]
    for i in range(k):
        for j in range(k):
            if i != j and abs(f_float[i] - f_float[j] - float(D[i][j])) <= atol:
                # f(i) = f(j) + D[i][j]
                adj[j].append((i, D[i][j]))
                adj[i].append((j, -D[i][j]))
    f: list = [None] * k
    f[0] = Fraction(0)
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v, delta in adj[u]:
            if f[v] is None:
                f[v] = f[u] + delta
                queue.append(v)
    if any(v is None for v in f):
        return None
    for i in range(k):
        for j in range(k):
            if f[i] - f[j] > D[i][j]:
                return None
    return f


def _exact_simplex_potential(D: list, c: list) -> list:
    """Rational simplex (Bland's rule) on the shifted dual ``g = f + D[0]``.

    With ``g >= 0`` the origin is feasible because every right-hand side
    ``D[i][j] + D[i][0] - D[j][0]`` is non-negative by the triangle inequality.
    """
    k = len(D)
    nv = k - 1
    A: list = []
    b: list = []
    for i in range(1, k):
        for j in range(1, k):
            if i != j:
                row = [Fraction(0)] * nv
                row[i - 1] += 1
                row[j - 1] -= 1
                A.append(row)
                b.append(Fraction(D[i][j] + D[i][0] - D[j][0]))
        row = [Fraction(0)] * nv
        row[i - 1] = Fraction(1)
        A.append(row)
        b.append(Fraction(2 * D[i][0]))
    obj = [Fraction(v) for v in c[1:]]
    g = _simplex_max(A, b, obj)
    return [Fraction(0)] + [g[i] - D[i + 1][0] for i in range(nv)]


def _simplex_max(A: list, b: list, c: list) -> list:
    """Maximize ``c.x`` s.t. ``A x <= b``, ``x >= 0`` with ``b >= 0``, exactly."""
    m, n = len(A), len(c)
    # dictionary form: basic_i = b_i - sum_j T[i][j] * nonbasic_j
    T = [list(r) for r in A]
    rhs = list(b)
    z = list(c)
    nonbasic = list(range(n))
    basic = list(range(n, n + m))
    while True:
        enter = None
        for j in sorted(range(n), key=lambda j: nonbasic[j]):
            if z[j] > 0:
                enter = j
                break
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = rhs[i] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basic[i] < basic[leave]):
                    leave, best = i, ratio
        if leave is None:
            raise RuntimeError("dual LP unbounded")
        piv = T[leave][enter]
        prow = [v / piv for v in T[leave]]
        prow[enter] = 1 / piv
        prhs = rhs[leave] / piv
        for i in range(m):
            if i == leave:
                continue
            f = T[i][enter]
            if f:
                Ti = T[i]
                for j in range(n):
                    Ti[j] = Ti[j] - f * prow[j] if j != enter else -f * prow[enter]
                rhs[i] -= f * prhs
        f = z[enter]
        z = [z[j] - f * prow[j] if j != enter else -f * prow[enter] for j in range(n)]
        T[leave] = prow
        rhs[leave] = prhs
        basic[leave], nonbasic[enter] = nonbasic[enter], basic[leave]
    x = [Fraction(0)] * n
    for i, var in enumerate(basic):
        if var < n:
            x[var] = rhs[i]
    return x
