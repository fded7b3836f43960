"""
Fusing features into cache capacities
=====================================

Start from an already-normalized 11-router feature table (betweenness,
pending Interests, cache hits), extract the first principal component and
turn the projected scores into integer capacities.
"""

import numpy as np

from ndncache import fusion

X = np.array([
    [0.62963791, 0.57540494, 0.56401801],
    [0.24072418, 0.06403307, 0.33221026],
    [1, 0.61991863, 0.96397991],
    [0.06481895, 0, 0.96397991],
    [0.31481895, 0.51107432, 0.58686915],
    [0.83331471, 0.00547495, 0],
    [0.87963791, 0.81142273, 0.68312906],
    [0, 0.17876889, 0.59078904],
    [0.25, 0.28850586, 0],
    [0.78704738, 0.81981368, 0],
    [0.75, 0.99840404, 0.35154242],
])

cov = fusion.covariance(X)
pcs = fusion.first_eigenvector(cov)
print("covariance\n", np.round(cov, 5))
print("lambda1", round(pcs.eigenvalue, 6), "mixing", np.round(pcs.pc, 4),
      "residual", pcs.residual, "iterations", pcs.iterations)

F = fusion.fuse(X, pcs)
w = fusion.weights(F)
caps = fusion.allocate(w, 1100)
for i, (f, wi, c) in enumerate(zip(F, w, caps)):
    print(f"router {i:2d}  fused {f:.4f}  weight {wi:.4f}  capacity {c}")
print("total", caps.sum())
