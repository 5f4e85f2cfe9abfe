"""
Pareto fronts and crowding
==========================

Both objectives are minimised: fitness (1 - R^2) and complexity.
"""

import numpy as np

from mogpfusion import crowding_distance, non_dominated_sort

points = np.array([
    [0.30, 1], [0.10, 5], [0.05, 11], [0.12, 6], [0.30, 3], [0.02, 20], [0.10, 5],
])
fronts = non_dominated_sort(points)
for k, f in enumerate(fronts, 1):
    print(f"front {k}: {points[f].tolist()}")

# boundary members get infinite crowding distance
print("crowding of front 1:", crowding_distance(points[fronts[0]]))

# the sort is O(n log n) for two objectives, so large batches are cheap
rng = np.random.default_rng(2)
big = rng.normal(size=(100_000, 2))
print("100k points ->", len(non_dominated_sort(big)), "fronts")
