"""
Linear-time sweep on large trees
================================

Time the closed formula on random trees of growing size.  Doubling the
number of vertices should roughly double the time.
"""

import time

import numpy as np

from treewass import tree_wasserstein
from treewass.cli import random_tree
from treewass.stochastic import random_measure

prev = None
for n in (125_000, 250_000, 500_000, 1_000_000):
    rng = np.random.default_rng(n)
    t = random_tree(n, rng)
    mu, nu = random_measure(range(n), rng), random_measure(range(n), rng)
    tree_wasserstein(t, mu, nu)  # first call also builds the cached sweep plan
    runs = []
    for _ in range(10):
        t0 = time.perf_counter()
        tree_wasserstein(t, mu, nu)
        runs.append(time.perf_counter() - t0)
    best = min(runs)
    growth = "" if prev is None else f"  x{best / prev:.2f}"
    print(f"n={n:>9,}  {best * 1e3:7.2f} ms{growth}")
    prev = best
