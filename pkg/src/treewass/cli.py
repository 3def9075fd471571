"""Command-line entry point: ``treewass <command> ...``.

Every command except ``bench`` prints a JSON run report on stdout; ``bench``
prints CSV timing rows.  Exit status is 0 when all validations pass, 1 when a
check fails (oracle mismatch, audit verdict FAIL) and 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import secrets
import sys
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import TreeWassError
from .io import (
    coupling_to_json,
    embedding_to_json,
    encode_number,
    load_embedding,
    load_measure,
    load_metric_or_points,
    load_tree,
    vector_to_json,
)
from .oracle import ORACLE_CAP, pairwise_distances, transport_lp
from .stochastic import frt_sample, random_measure, random_measure_pairs, validate_embedding, wasserstein_distortion_audit
from .tree import tree_from_parents
from .tree_ot import coupling_cost, embed_measure, optimal_coupling, tree_wasserstein

ORACLE_RTOL = 1e-8
AUDIT_TOL = 1e-9


@dataclass
class RunReport:
    command: str
    version: str = __version__
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    seed: int | None = None
    ok: bool = True

    def add_input(self, path) -> None:
        self.inputs[str(path)] = hashlib.sha256(Path(path).read_bytes()).hexdigest()

    @contextmanager
    def timed(self, stage: str):
        t0 = time.perf_counter()
        yield
        self.timings[stage] = round((time.perf_counter() - t0) * 1000, 3)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return encode_number(value)


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2) + "\n")


def _seed(args) -> int:
    return args.seed if args.seed is not None else secrets.randbits(32)


def cmd_dist(args) -> RunReport:
    rep = RunReport("dist")
    for p in (args.tree, args.mu, args.nu):
        rep.add_input(p)
    with rep.timed("parse"):
        t = load_tree(args.tree, args.exact)
        mu = load_measure(args.mu, args.exact)
        nu = load_measure(args.nu, args.exact)
    with rep.timed("tree_wasserstein"):
        value = tree_wasserstein(t, mu, nu)
    rep.outputs["wasserstein"] = value
    if args.check_oracle:
        with rep.timed("oracle"):
            support = list(mu) + list(nu)
            oracle_value, _ = transport_lp(pairwise_distances(t, points=support), mu, nu)
        delta = abs(value - oracle_value)
        rep.outputs["oracle"] = oracle_value
        rep.outputs["oracle_delta"] = delta
        limit = 0 if (mu.exact and nu.exact) else ORACLE_RTOL * max(1.0, abs(float(oracle_value)))
        rep.ok = delta <= limit
    return rep


def cmd_coupling(args) -> RunReport:
    rep = RunReport("coupling")
    for p in (args.tree, args.mu, args.nu):
        rep.add_input(p)
    with rep.timed("parse"):
        t = load_tree(args.tree, args.exact)
        mu = load_measure(args.mu, args.exact)
        nu = load_measure(args.nu, args.exact)
    with rep.timed("optimal_coupling"):
        c = optimal_coupling(t, mu, nu)
    cost = coupling_cost(t, c)
    err = c.marginal_error()
    rep.ok = err <= (0 if c.left.exact and c.right.exact else 1e-10)
    rep.outputs.update(cost=cost, marginal_error=err, marginals="PASS" if rep.ok else "FAIL", entries=len(c.entries))
    if args.out:
        _write_json(args.out, coupling_to_json(c, cost))
        rep.outputs["path"] = str(args.out)
    return rep


def cmd_embed(args) -> RunReport:
    rep = RunReport("embed")
    for p in (args.tree, args.measure):
        rep.add_input(p)
    t = load_tree(args.tree, args.exact)
    m = load_measure(args.measure, args.exact)
    with rep.timed("embed_measure"):
        v = embed_measure(t, m)
    rep.outputs.update(nonzeros=len(v), l1_norm=v.norm())
    if args.out:
        _write_json(args.out, vector_to_json(v))
        rep.outputs["path"] = str(args.out)
    else:
        rep.outputs["vector"] = vector_to_json(v)
    return rep


def cmd_frt(args) -> RunReport:
    rep = RunReport("frt", seed=_seed(args))
    rep.add_input(args.input)
    metric = load_metric_or_points(args.input, args.kind)
    with rep.timed("frt_sample"):
        e = frt_sample(metric, rep.seed, args.count)
    rep.outputs.update(points=metric.n, components=len(e), vertices=[c.tree.n for c in e.components])
    if metric.n >= 2:
        with rep.timed("validate"):
            r = validate_embedding(e)
        rep.outputs.update(min_ratio=r.min_ratio, max_ratio=r.max_ratio, mean_ratio=r.mean_ratio)
    if args.out:
        _write_json(args.out, embedding_to_json(e))
        rep.outputs["path"] = str(args.out)
    return rep


def cmd_audit(args) -> RunReport:
    rep = RunReport("audit", seed=_seed(args))
    rep.add_input(args.embedding)
    e = load_embedding(args.embedding, args.exact)
    with rep.timed("validate"):
        point = validate_embedding(e)
    samples = random_measure_pairs(list(e.source.labels), args.pairs, rep.seed, exact=args.exact)
    with rep.timed("audit"):
        w = wasserstein_distortion_audit(e, samples)
    verdict = w.sandwich_holds(point.max_ratio, AUDIT_TOL) and all(w.per_component_noncontraction)
    rep.ok = verdict
    rep.outputs.update(
        point_distortion=point.max_ratio,
        min_ratio=w.min_ratio,
        max_ratio=w.max_ratio,
        mean_ratio=w.mean_ratio,
        pairs=w.pairs,
        verdict="PASS" if verdict else "FAIL",
    )
    return rep


def random_tree(n: int, rng: np.random.Generator, exact: bool = False):
    """Random recursive tree: vertex ``i`` attaches to a uniform earlier vertex."""
    parent = [-1] + (rng.random(n - 1) * np.arange(1, n)).astype(np.int64).tolist()
    if exact:
        weight = [0] + [Fraction(int(k), 10) for k in rng.integers(1, 101, size=n - 1)]
    else:
        weight = [0.0] + rng.uniform(0.1, 10.0, size=n - 1).tolist()
    return tree_from_parents(parent, weight, 0)


def cmd_bench(args) -> RunReport:
    rep = RunReport("bench", seed=_seed(args))
    rows = []
    for n in args.vertices:
        if n < 2:
            raise TreeWassError(f"--vertices must be at least 2, got {n}")
        rng = np.random.default_rng([rep.seed, n])
        t0 = time.perf_counter()
        t = random_tree(n, rng, args.exact)
        build = time.perf_counter() - t0
        mu = random_measure(range(n), rng, args.support, args.exact)
        nu = random_measure(range(n), rng, args.support, args.exact)
        t0 = time.perf_counter()
        value = tree_wasserstein(t, mu, nu)
        cold = time.perf_counter() - t0
        warm = []
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            tree_wasserstein(t, mu, nu)
            warm.append(time.perf_counter() - t0)
        row = {
            "seed": rep.seed,
            "vertices": n,
            "build_s": build,
            "tree_wasserstein_s": cold,
            "tree_wasserstein_warm_s": float(np.median(warm)) if warm else cold,
            "tree_wasserstein_best_s": min(warm) if warm else cold,
            "value": value,
        }
        if not args.no_coupling:
            t0 = time.perf_counter()
            c = optimal_coupling(t, mu, nu)
            row["optimal_coupling_s"] = time.perf_counter() - t0
            row["coupling_cost"] = coupling_cost(t, c)
        if len(set(mu) | set(nu)) <= ORACLE_CAP:
            oracle_value, _ = transport_lp(pairwise_distances(t, points=list(mu) + list(nu)), mu, nu)
            row["oracle_delta"] = abs(value - oracle_value)
            limit = 0 if args.exact else ORACLE_RTOL * max(1.0, float(oracle_value))
            rep.ok = rep.ok and row["oracle_delta"] <= limit
        rows.append(row)
    rep.outputs["rows"] = rows
    fields = list(dict.fromkeys(k for r in rows for k in r))
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=fields)
        w.writeheader()
        for r in rows:
            w.writerow({k: encode_number(v) for k, v in r.items()})
    finally:
        if args.out:
            out.close()
    return rep


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treewass", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"treewass {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def exact_flag(p):
        p.add_argument("--exact", action="store_true", help="rational arithmetic end to end")

    p = sub.add_parser("dist", help="earthmover distance on a tree")
    p.add_argument("tree")
    p.add_argument("mu")
    p.add_argument("nu")
    p.add_argument("--check-oracle", action="store_true", help="compare with the exact transport solver")
    exact_flag(p)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("coupling", help="explicit optimal coupling")
    p.add_argument("tree")
    p.add_argument("mu")
    p.add_argument("nu")
    p.add_argument("--out", "-o")
    exact_flag(p)
    p.set_defaults(func=cmd_coupling)

    p = sub.add_parser("embed", help="isometric l1 edge embedding of a measure")
    p.add_argument("tree")
    p.add_argument("measure")
    p.add_argument("--out", "-o")
    exact_flag(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("frt", help="sample a stochastic tree embedding")
    p.add_argument("input", help="distance-matrix CSV or point-coordinate CSV")
    p.add_argument("--kind", choices=["auto", "matrix", "points"], default="auto")
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_frt)

    p = sub.add_parser("audit", help="distortion audit of an embedding file")
    p.add_argument("embedding")
    p.add_argument("--pairs", type=int, default=50)
    p.add_argument("--seed", type=int)
    exact_flag(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("bench", help="time the closed formula on random trees")
    p.add_argument("--vertices", type=int, nargs="+", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--support", type=int, default=8)
    p.add_argument("--repeat", type=int, default=5, help="extra timed runs after the first")
    p.add_argument("--no-coupling", action="store_true")
    p.add_argument("--out", "-o", help="CSV destination (default stdout)")
    exact_flag(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rep = args.func(args)
    except (TreeWassError, OSError) as err:
        print(json.dumps({"command": args.command, "error": type(err).__name__, "message": str(err)}), file=sys.stderr)
        return 2
    if args.command == "bench":
        if not rep.ok:
            print(json.dumps(_jsonable(asdict(rep))), file=sys.stderr)
    else:
        print(json.dumps(_jsonable(asdict(rep)), indent=2))
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
