import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from mogpfusion.dataset import Dataset
from mogpfusion.expr import Leaf, Op


def make_dataset(X, y=None, names=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    names = names or [f"f{i + 1}" for i in range(X.shape[1])]
    return Dataset(names, X, y)


def trees(n_features=4, ops=("+", "-"), max_leaves=12):
    leaves = st.integers(0, n_features - 1).map(Leaf)
    return st.recursive(
        leaves,
        lambda kids: st.builds(Op, st.sampled_from(ops), kids, kids),
        max_leaves=max_leaves,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def synthetic():
    """y = 2 x1 - 3 x2 + 5 + N(0, 0.01^2); 16 features, 14 of them noise."""
    def build(n=200, seed=0):
        g = np.random.default_rng(seed)
        X = g.random((n, 16))
        y = 2 * X[:, 0] - 3 * X[:, 1] + 5 + g.normal(0, 0.01, n)
        return make_dataset(X, y, [f"x{i + 1}" for i in range(16)])
    return build
