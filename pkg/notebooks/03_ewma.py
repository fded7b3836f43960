"""
Smoothing router samples
========================

Pending-Interest counts are noisy; the estimator keeps a running average
plus a deviation term, and reports avg + margin * dev.
"""

import numpy as np

from ndncache.metrics import EwmaEstimator

rng = np.random.default_rng(1)
samples = np.concatenate([rng.poisson(3, 200), rng.poisson(8, 200)])

est = EwmaEstimator()
trail = [est.update(int(x)).estimate() for x in samples]

# the estimate follows the level shift within a few dozen samples
for k in (0, 100, 199, 210, 250, 399):
    print(f"step {k:3d}  sample {samples[k]:2d}  estimate {trail[k]:.3f}")

# a constant input is a fixed point
flat = EwmaEstimator()
for _ in range(100):
    flat.update(4)
print("constant input:", flat.avg, flat.dev, flat.estimate())
