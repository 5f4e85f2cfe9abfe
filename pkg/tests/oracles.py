"""Brute-force reference implementations used only by the tests.

Each oracle follows the textbook definition directly and shares no code
with the package paths it checks.
"""

import itertools
import math

import numpy as np

from mogpfusion.expr import Leaf, Op


def subtrees(tree):
    """Every subtree, by explicit traversal."""
    out = [tree]
    if isinstance(tree, Op):
        out += subtrees(tree.left) + subtrees(tree.right)
    return out


def count_nodes(tree):
    return len(subtrees(tree))


def brute_complexity(tree):
    return sum(count_nodes(s) for s in subtrees(tree))


def brute_depth(tree):
    if isinstance(tree, Leaf):
        return 1
    return 1 + max(brute_depth(tree.left), brute_depth(tree.right))


def brute_dominates(a, b):
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def brute_fronts(points):
    """Peel non-dominated layers with an O(n^2) scan per layer."""
    remaining = set(range(len(points)))
    fronts = []
    while remaining:
        front = sorted(i for i in remaining
                       if not any(brute_dominates(points[j], points[i]) for j in remaining if j != i))
        fronts.append(front)
        remaining -= set(front)
    return fronts


def naive_ranks(x):
    """Average ranks by counting: rank = #smaller + (#equal + 1) / 2."""
    x = list(x)
    return [sum(v < xi for v in x) + (sum(v == xi for v in x) + 1) / 2 for xi in x]


def naive_pearson(a, b):
    n = len(a)
    ma = sum(a) / n
    mb = sum(b) / n
    sab = sum((x - ma) * (y - mb) for x, y in zip(a, b))
    saa = sum((x - ma) ** 2 for x in a)
    sbb = sum((y - mb) ** 2 for y in b)
    return sab / math.sqrt(saa * sbb)


def naive_srcc(a, b):
    return naive_pearson(naive_ranks(a), naive_ranks(b))


def pair_tau_b(a, b):
    """Kendall tau-b by enumerating all pairs."""
    n = len(a)
    conc = disc = tie_a = tie_b = 0
    for i, j in itertools.combinations(range(n), 2):
        da = a[i] - a[j]
        db = b[i] - b[j]
        if da == 0:
            tie_a += 1
        if db == 0:
            tie_b += 1
        if da != 0 and db != 0:
            if (da > 0) == (db > 0):
                conc += 1
            else:
                disc += 1
    n0 = n * (n - 1) // 2
    return (conc - disc) / math.sqrt((n0 - tie_a) * (n0 - tie_b))


def pinv_ols_predictions(columns, y):
    """Normal-equations OLS with a pseudo-inverse: c = pinv(A'A) A'y."""
    A = np.column_stack([np.ones(len(y))] + list(columns))
    coef = np.linalg.pinv(A.T @ A) @ (A.T @ y)
    return A @ coef, coef


def linear_sse(x, y):
    A = np.column_stack([x, np.ones_like(x)])
    coef = np.linalg.lstsq(A, y, rcond=None)[0]
    r = A @ coef - y
    return float(r @ r)


def matrix_fronts(points):
    """Layer peeling from the full pairwise dominance matrix.

    Same definition as :func:`brute_fronts` but vectorised, for large batches.
    """
    P = np.asarray(points, dtype=float)
    le = np.all(P[None, :, :] <= P[:, None, :], axis=2)
    lt = np.any(P[None, :, :] < P[:, None, :], axis=2)
    dominated_by = le & lt  # [i, j]: j dominates i
    remaining = np.ones(len(P), dtype=bool)
    fronts = []
    while remaining.any():
        blocked = (dominated_by & remaining[None, :]).any(axis=1)
        front = np.flatnonzero(remaining & ~blocked)
        fronts.append(front.tolist())
        remaining[front] = False
    return fronts
