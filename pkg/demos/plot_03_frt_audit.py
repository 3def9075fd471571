"""
Random tree embeddings of a point cloud
=======================================

Sample a family of hierarchically separated trees over random points in the
plane.  No tree shortens any distance, and on average distances grow by a
modest factor.  Pushing measures through every tree gives an l1 map whose
distortion on measures is bounded by the distortion on points.
"""

import numpy as np

from treewass import euclidean_metric, frt_sample, random_measure_pairs, validate_embedding, wasserstein_distortion_audit

rng = np.random.default_rng(0)
points = euclidean_metric(rng.uniform(size=(24, 2)))
e = frt_sample(points, seed=1, count=30)
print(f"{len(e)} trees, {e.components[0].tree.n} vertices in the first")

###############################################################################
# Point-pair distortion, averaged over the trees.
r = validate_embedding(e)
print(f"point ratios: min {r.min_ratio:.3f}  mean {r.mean_ratio:.3f}  max {r.max_ratio:.3f}")

###############################################################################
# The same question for measures, checked against the exact solver.
audit = wasserstein_distortion_audit(e, random_measure_pairs(list(points.labels), 40, seed=2))
print(f"measure ratios: min {audit.min_ratio:.3f}  max {audit.max_ratio:.3f}")
print("sandwich holds:", audit.sandwich_holds(r.max_ratio))
