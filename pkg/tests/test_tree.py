from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import exact_trees
from treewass import build_tree, path_distance, subtree_of, tree_from_parents
from treewass.errors import CycleDetected, Disconnected, NonPositiveWeight, UnknownRoot, UnknownVertex


def test_path_tree(path_tree):
    t = path_tree
    assert t.n == 3
    assert t.depth[t.id(2)] == 2
    assert t.parent[t.id(2)] == t.id(1)
    assert t.root_label == 0


def test_star_depths(star_tree):
    for leaf in "abc":
        assert star_tree.depth[star_tree.id(leaf)] == 1
    assert star_tree.height == 1


def test_multi_edge_is_cycle():
    with pytest.raises(CycleDetected, match=r"\(1, 0\)"):
        build_tree([(0, 1, 1), (1, 0, 1)], 0)


def test_self_loop_is_cycle():
    with pytest.raises(CycleDetected):
        build_tree([(0, 1, 1), (1, 1, 1)], 0)


def test_disconnected():
    with pytest.raises(Disconnected, match="2"):
        build_tree([(0, 1, 1), (2, 3, 1)], 0)


@pytest.mark.parametrize("w", [0, -1.5, 0.0])
def test_non_positive_weight(w):
    with pytest.raises(NonPositiveWeight, match=r"\(0, 1\)"):
        build_tree([(0, 1, w)], 0)


def test_unknown_root():
    with pytest.raises(UnknownRoot, match="'z'"):
        build_tree([("a", "b", 1)], "z")


def test_single_vertex():
    t = build_tree([], "only")
    assert t.n == 1 and list(t.edges()) == []
    assert path_distance(t, "only", "only") == 0


def test_order_is_reverse_bfs():
    #        0
    #      1   2
    #     3 4    5
    #     6
    t = build_tree([(0, 1, 1), (0, 2, 1), (1, 3, 1), (1, 4, 1), (2, 5, 1), (3, 6, 1)], 0)
    assert [t.label(v) for v in t.order] == [6, 3, 4, 5, 1, 2, 0]
    ranks = {t.label(v): t.rank[v] for v in range(t.n)}
    for v in range(t.n):
        for u in range(t.n):
            if t.depth[u] > t.depth[v]:
                assert ranks[t.label(u)] < ranks[t.label(v)]


def test_path_distance_examples(path_tree, star_tree):
    assert path_distance(path_tree, 0, 2) == 3.0
    assert path_distance(path_tree, 1, 1) == 0
    assert path_distance(star_tree, "a", "c") == 4


def test_unknown_vertex(path_tree):
    with pytest.raises(UnknownVertex):
        path_distance(path_tree, 0, 9)
    with pytest.raises(UnknownVertex):
        list(subtree_of(path_tree, "x"))


def test_subtree_examples(path_tree, star_tree):
    assert set(subtree_of(path_tree, 1)) == {1, 2}
    assert set(subtree_of(path_tree, 0)) == {0, 1, 2}
    assert set(subtree_of(star_tree, "a")) == {"a"}


def test_from_parents_matches_build():
    t1 = tree_from_parents([-1, 0, 1, 1], [0, 2, 3, 5], 0)
    t2 = build_tree([(0, 1, 2), (1, 2, 3), (1, 3, 5)], 0)
    for u in range(4):
        for v in range(4):
            assert path_distance(t1, u, v) == path_distance(t2, u, v)


def test_edges_named_by_child(star_tree):
    edges = {e.child: e.weight for e in star_tree.edges()}
    assert edges == {"a": 1, "b": 2, "c": 3}


@settings(max_examples=60, deadline=None)
@given(exact_trees(max_n=10))
def test_metric_axioms(t):
    labels = t.labels
    for u in labels:
        for v in labels:
            d = path_distance(t, u, v)
            assert d == path_distance(t, v, u)
            assert (d == 0) == (u == v)
            for w in labels:
                assert path_distance(t, u, w) <= d + path_distance(t, v, w)


@settings(max_examples=40, deadline=None)
@given(exact_trees(min_n=2, max_n=10), st.data())
def test_reroot_invariance(t, data):
    new_root = data.draw(st.sampled_from(t.labels))
    r = t.rerooted(new_root)
    assert r.root_label == new_root
    for u in t.labels:
        for v in t.labels:
            assert path_distance(r, u, v) == path_distance(t, u, v)


@settings(max_examples=40, deadline=None)
@given(exact_trees(max_n=12))
def test_root_distance_is_parent_chain(t):
    for v in range(t.n):
        chain, a = Fraction(0), v
        while a != t.root:
            chain += t.weight[a]
            a = t.parent[a]
        assert path_distance(t, t.root_label, t.label(v)) == chain


@settings(max_examples=40, deadline=None)
@given(exact_trees(max_n=12))
def test_subtree_membership_matches_ancestry(t):
    for v in t.labels:
        sub = set(subtree_of(t, v))
        for u in t.labels:
            a, ancestors = t.id(u), set()
            while a != -1:
                ancestors.add(t.label(a))
                a = t.parent[a]
            assert (u in sub) == (v in ancestors)
