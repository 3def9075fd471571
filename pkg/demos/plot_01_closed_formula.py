"""
Earthmover distance on a tree
=============================

On a weighted tree the optimal transport cost between two measures has a
closed form: every edge is charged its length times the net mass that must
cross it.  We compare that sweep with a generic transport solver.
"""

from fractions import Fraction as F

from treewass import build_tree, make_measure, pairwise_distances, transport_lp, tree_wasserstein

# a small rooted tree: r has children a and b, a has children a1 and a2
t = build_tree([("r", "a", 1), ("r", "b", 2), ("a", "a1", F(1, 2)), ("a", "a2", 3)], "r")

mu = make_measure({"a1": F(1, 2), "a2": F(1, 2)})
nu = make_measure({"a1": F(1, 4), "b": F(3, 4)})

###############################################################################
# With rational inputs the answer is an exact fraction.
w = tree_wasserstein(t, mu, nu)
print("closed formula:", w)

###############################################################################
# The generic solver works on the full distance matrix and knows nothing
# about the tree.  It lands on the same number.
lp, plan = transport_lp(pairwise_distances(t), mu, nu)
print("transport solver:", lp)
assert w == lp

###############################################################################
# Moving the root anywhere leaves the value unchanged.
for v in t.labels:
    assert tree_wasserstein(t.rerooted(v), mu, nu) == w
print("same value from every root")
