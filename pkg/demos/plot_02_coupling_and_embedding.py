"""
Optimal coupling and the l1 picture
===================================

Besides the cost we can recover who sends what to whom.  Surplus mass is
pushed up towards the root, then dropped into subtrees that lack mass.
Separately, each measure maps to a vector of edge coordinates whose l1
distance is the earthmover distance.
"""

from fractions import Fraction as F

from treewass import build_tree, coupling_cost, embed_measure, l1_distance, make_measure, optimal_coupling, tree_wasserstein

t = build_tree([("r", "a", 1), ("r", "b", 2), ("a", "a1", 1), ("a", "a2", 1)], "r")
mu = make_measure({"a1": F(1, 2), "a2": F(1, 2)})
nu = make_measure({"a1": F(1, 4), "b": F(3, 4)})

c = optimal_coupling(t, mu, nu)
for (x, y), m in sorted(c.entries.items()):
    print(f"{x} -> {y}: {m}")
print("coupling cost", coupling_cost(t, c), "formula", tree_wasserstein(t, mu, nu))
print("marginal error", c.marginal_error())

###############################################################################
# Edge coordinates are edge length times subtree mass.
emu, enu = embed_measure(t, mu), embed_measure(t, nu)
print("mu ->", emu.entries)
print("nu ->", enu.entries)
print("l1 distance", l1_distance(emu, enu))
