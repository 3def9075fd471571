"""JSON and CSV formats for trees, measures, couplings, embeddings and metrics.

Numbers may be JSON numbers or strings such as ``"3/7"``.  With
``exact=True`` every number is read as a :class:`~fractions.Fraction`
(``0.1`` becomes ``1/10``, not the nearest double); Fractions are written
back as strings so files round-trip without loss.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path

from .errors import TreeWassError
from .measure import DiscreteMeasure, make_measure
from .oracle import FiniteMetric, euclidean_metric, make_metric
from .stochastic import Component, StochasticTreeEmbedding
from .tree import MetricTree, build_tree
from .tree_ot import Coupling, EmbeddingVector

__all__ = [
    "FormatError",
    "read_json",
    "parse_number",
    "encode_number",
    "tree_from_json",
    "tree_to_json",
    "measure_from_json",
    "measure_to_json",
    "coupling_to_json",
    "vector_to_json",
    "metric_from_json",
    "metric_to_json",
    "embedding_from_json",
    "embedding_to_json",
    "load_tree",
    "load_measure",
    "load_embedding",
    "load_metric_csv",
    "load_points_csv",
    "load_metric_or_points",
]


class FormatError(TreeWassError):
    """Malformed input; the message names the file and location."""


def parse_number(value, exact: bool, where: str = "?"):
    if isinstance(value, bool):
        raise FormatError(f"{where}: expected a number, got {value!r}")
    try:
        if exact:
            return value if isinstance(value, Fraction) else Fraction(str(value) if isinstance(value, float) else value)
        if isinstance(value, str):
            return float(Fraction(value)) if "/" in value else float(value)
        return float(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise FormatError(f"{where}: expected a number, got {value!r}") from None


def encode_number(value):
    if isinstance(value, Fraction):
        return str(value)
    return value


def read_json(path, exact: bool = False):
    text = Path(path).read_text()
    try:
        if exact:
            return json.loads(text, parse_float=Fraction, parse_int=Fraction)
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise FormatError(f"{path}:{err.lineno}:{err.colno}: {err.msg}") from None


def _get(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"{where}: missing key {key!r}")
    return obj[key]


def tree_from_json(obj, exact: bool = False, where: str = "tree") -> MetricTree:
    root = str(_get(obj, "root", where))
    edges = []
    for i, e in enumerate(_get(obj, "edges", where)):
        loc = f"{where}.edges[{i}]"
        edges.append((str(_get(e, "u", loc)), str(_get(e, "v", loc)), parse_number(_get(e, "w", loc), exact, loc + ".w")))
    try:
        return build_tree(edges, root)
    except TreeWassError as err:
        raise type(err)(f"{where}: {err}") from None


def tree_to_json(t: MetricTree) -> dict:
    return {
        "root": str(t.root_label),
        "edges": [{"u": str(u), "v": str(v), "w": encode_number(w)} for u, v, w in t.edge_list()],
    }


def measure_from_json(obj, exact: bool = False, where: str = "measure") -> DiscreteMeasure:
    masses = _get(obj, "masses", where)
    if not isinstance(masses, dict):
        raise FormatError(f"{where}.masses: expected an object")
    pairs = [(str(k), parse_number(v, exact, f"{where}.masses[{k!r}]")) for k, v in masses.items()]
    try:
        return make_measure(pairs)
    except TreeWassError as err:
        raise type(err)(f"{where}: {err}") from None


def measure_to_json(m: DiscreteMeasure) -> dict:
    return {"masses": {str(k): encode_number(v) for k, v in m.items()}}


def coupling_to_json(c: Coupling, cost) -> dict:
    return {
        "entries": [
            {"from": str(x), "to": str(y), "mass": encode_number(m)} for (x, y), m in sorted(c.entries.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1])))
        ],
        "cost": encode_number(cost),
    }


def vector_to_json(v: EmbeddingVector) -> dict:
    def key(k):
        return ":".join(map(str, k)) if isinstance(k, tuple) else str(k)

    return {"entries": {key(k): encode_number(x) for k, x in v.entries.items()}}


def metric_from_json(obj, exact: bool = False, where: str = "source") -> FiniteMetric:
    labels = [str(x) for x in _get(obj, "labels", where)]
    dist = [[parse_number(v, exact, f"{where}.dist[{i}][{j}]") for j, v in enumerate(row)] for i, row in enumerate(_get(obj, "dist", where))]
    return make_metric(dist, labels)


def metric_to_json(m: FiniteMetric) -> dict:
    return {"labels": [str(x) for x in m.labels], "dist": [[encode_number(v) for v in row] for row in m.dist]}


def embedding_from_json(obj, exact: bool = False, source: FiniteMetric | None = None, where: str = "embedding") -> StochasticTreeEmbedding:
    """Parse an embedding file; the source metric comes from ``"source"`` or ``source``."""
    if source is None:
        source = metric_from_json(_get(obj, "source", where), exact, where + ".source")
    # JSON keys are strings; map them back onto the metric's own labels
    point = {str(x): x for x in source.labels}
    comps = []
    for i, c in enumerate(_get(obj, "components", where)):
        loc = f"{where}.components[{i}]"
        tree = tree_from_json(_get(c, "tree", loc), exact, loc + ".tree")
        f = {point.get(str(k), str(k)): str(v) for k, v in _get(c, "f", loc).items()}
        comps.append(Component(parse_number(_get(c, "p", loc), exact, loc + ".p"), tree, f))
    try:
        return StochasticTreeEmbedding(comps, source)
    except TreeWassError as err:
        raise type(err)(f"{where}: {err}") from None


def embedding_to_json(e: StochasticTreeEmbedding) -> dict:
    return {
        "components": [
            {"p": encode_number(c.p), "tree": tree_to_json(c.tree), "f": {str(k): str(v) for k, v in c.f.items()}}
            for c in e.components
        ],
        "source": metric_to_json(e.source),
    }


def load_tree(path, exact: bool = False) -> MetricTree:
    return tree_from_json(read_json(path, exact), exact, str(path))


def load_measure(path, exact: bool = False) -> DiscreteMeasure:
    return measure_from_json(read_json(path, exact), exact, str(path))


def load_embedding(path, exact: bool = False, source: FiniteMetric | None = None) -> StochasticTreeEmbedding:
    return embedding_from_json(read_json(path, exact), exact, source, str(path))


def _read_rows(path) -> tuple[list | None, list[list[str]]]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise FormatError(f"{path}: empty file")
    header = None
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        header, rows = [c.strip() for c in rows[0]], rows[1:]
    return header, rows


def _numeric_rows(path, rows, exact, offset):
    out = []
    for i, r in enumerate(rows):
        out.append([parse_number(c.strip(), exact, f"{path}:{i + offset}:{j + 1}") for j, c in enumerate(r)])
    return out


def load_metric_csv(path, exact: bool = False) -> FiniteMetric:
    """Square distance matrix; an optional header row supplies point labels."""
    header, rows = _read_rows(path)
    values = _numeric_rows(path, rows, exact, 2 if header else 1)
    labels = header if header else [str(i) for i in range(len(values))]
    try:
        return make_metric(values, labels)
    except TreeWassError as err:
        raise type(err)(f"{path}: {err}") from None


def load_points_csv(path) -> FiniteMetric:
    """Rows of coordinates; the Euclidean metric between rows."""
    header, rows = _read_rows(path)
    values = _numeric_rows(path, rows, False, 2 if header else 1)
    if len({len(r) for r in values}) != 1:
        raise FormatError(f"{path}: rows have differing lengths")
    try:
        return euclidean_metric(values, [str(i) for i in range(len(values))])
    except TreeWassError as err:
        raise type(err)(f"{path}: {err}") from None


def load_metric_or_points(path, kind: str = "auto", exact: bool = False) -> FiniteMetric:
    """``kind`` is ``"matrix"``, ``"points"`` or ``"auto"`` (square with zero diagonal means matrix)."""
    if kind == "auto":
        header, rows = _read_rows(path)
        values = _numeric_rows(path, rows, False, 2 if header else 1)
        square = all(len(r) == len(values) for r in values)
        kind = "matrix" if square and all(values[i][i] == 0 for i in range(len(values))) else "points"
    if kind == "matrix":
        return load_metric_csv(path, exact)
    return load_points_csv(path)
