"""Random inputs shared by the solver tests and the acceptance suite."""

import numpy as np

from uib.paths import StepPath


def random_tube(rng, max_knots=12):
    m = int(rng.integers(2, max_knots + 1))
    s = np.concatenate(([0.0], np.sort(rng.uniform(0, 1, m - 1))))
    center = np.concatenate(([0.0], np.cumsum(rng.normal(scale=0.5, size=m - 1))))
    width = rng.uniform(0.0, 0.6, m)
    lo, hi = center - width, center + width
    lo[0], hi[0] = min(lo[0], 0.0), max(hi[0], 0.0)
    return s, lo, hi


def random_step_path(rng, max_knots=12):
    m = int(rng.integers(2, max_knots + 1))
    inner = np.sort(rng.uniform(0, 1, m - 2))
    knots = np.concatenate(([0.0], inner, [1.0]))
    right = np.cumsum(rng.normal(scale=0.6, size=m))
    right[0] = rng.normal(scale=0.3)
    jumps = rng.normal(scale=0.3, size=m) * (rng.uniform(size=m) < 0.5)
    left = right - jumps
    values = np.where(rng.uniform(size=m) < 0.5, left, right)
    values[0] = 0.0
    left[0] = 0.0
    return StepPath(knots, left, right, values)
