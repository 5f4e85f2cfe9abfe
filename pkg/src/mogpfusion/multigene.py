"""Multigene linear models: a bias plus a weighted sum of gene outputs.

Weights are ordinary least squares estimates.  The design matrix is
``[1, G_1(X), ..., G_N(X)]``; it is solved by a column-pivoted QR
factorisation, falling back to the minimum-norm solution when genes are
collinear (duplicate genes are common after crossover).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .dataset import Dataset
from .expr import Node, eval_tree, parse_sexpr, print_sexpr

__all__ = [
    "MultiGeneModel",
    "ObjectivePair",
    "fit_weights",
    "predict",
    "model_objectives",
    "r_squared",
    "model_to_dict",
    "model_from_dict",
]


@dataclass(frozen=True)
class ObjectivePair:
    """Training fitness (``1 - R^2``) and structural complexity, both minimised."""

    fitness: float
    complexity: int

    def as_tuple(self):
        return (self.fitness, self.complexity)


@dataclass(frozen=True, eq=False)
class MultiGeneModel:
    genes: tuple
    weights: np.ndarray
    bias: float
    schema: tuple

    def __post_init__(self):
        genes = tuple(self.genes)
        w = np.array(self.weights, dtype=float).reshape(-1)
        if not genes:
            raise ValueError("a model needs at least one gene")
        if len(w) != len(genes):
            raise ValueError(f"{len(w)} weights for {len(genes)} genes")
        w.setflags(write=False)
        object.__setattr__(self, "genes", genes)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))
        object.__setattr__(self, "schema", tuple(self.schema))

    @property
    def complexity(self) -> int:
        return sum(g.complexity for g in self.genes)

    def negated(self) -> "MultiGeneModel":
        return MultiGeneModel(self.genes, -self.weights, -self.bias, self.schema)

    def same_structure(self, other) -> bool:
        return self.genes == other.genes and self.schema == other.schema


def _design(columns, n):
    A = np.empty((n, len(columns) + 1))
    A[:, 0] = 1.0
    for j, c in enumerate(columns):
        A[:, j + 1] = c
    return A


def solve_least_squares(A: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least squares coefficients of ``A @ c ~ y``.

    Full-rank systems are solved via pivoted QR; rank-deficient ones get
    the minimum-norm solution.
    """
    m, n = A.shape
    if m >= n:
        Q, R, perm = scipy.linalg.qr(A, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        tol = max(m, n) * np.finfo(float).eps * diag[0] if diag.size else 0.0
        if diag.size and diag[-1] > tol:
            z = scipy.linalg.solve_triangular(R, Q.T @ y)
            coef = np.empty(n)
            coef[perm] = z
            return coef
    return np.linalg.lstsq(A, y, rcond=None)[0]


def _fit_columns(genes, columns, y, schema):
    n = len(y)
    if not all(np.all(np.isfinite(c)) for c in columns):
        return MultiGeneModel(genes, np.full(len(genes), np.nan), np.nan, schema)
    coef = solve_least_squares(_design(columns, n), np.asarray(y, dtype=float))
    return MultiGeneModel(genes, coef[1:], coef[0], schema)


def fit_weights(genes: Sequence[Node], data: Dataset) -> MultiGeneModel:
    """Fit bias and gene weights to ``data.y`` by ordinary least squares.

    If any gene produces a non-finite output the returned model carries NaN
    weights; :func:`model_objectives` scores such a model as infinitely bad.
    """
    genes = tuple(genes)
    if not genes:
        raise ValueError("empty gene list")
    if data.n_samples == 0:
        raise ValueError("dataset has no samples")
    if data.y is None:
        raise ValueError("dataset has no target column")
    columns = [eval_tree(g, data) for g in genes]
    return _fit_columns(genes, columns, data.y, data.schema)


def _gene_sum(model, columns, n):
    out = np.full(n, model.bias)
    for w, c in zip(model.weights, columns):
        out += w * c
    return out


def predict(model: MultiGeneModel, data: Dataset) -> np.ndarray:
    """Evaluate ``bias + sum_i weight_i * gene_i`` on every sample."""
    if tuple(data.schema) != model.schema:
        raise ValueError(
            f"schema mismatch: model expects {list(model.schema)}, data has {list(data.schema)}"
        )
    with np.errstate(over="ignore", invalid="ignore"):
        return _gene_sum(model, [eval_tree(g, data) for g in model.genes], data.n_samples)


def _residual_ratio(pred, actual):
    actual = np.asarray(actual, dtype=float)
    pred = np.asarray(pred, dtype=float)
    if actual.shape != pred.shape:
        raise ValueError("prediction and target lengths differ")
    if actual.size < 2:
        raise ValueError("need at least 2 samples")
    ss_tot = np.sum((actual - actual.mean()) ** 2)
    if not ss_tot > 0:
        raise ValueError("target has zero variance; R^2 is undefined")
    return np.sum((pred - actual) ** 2) / ss_tot


def r_squared(pred, actual) -> float:
    """Coefficient of determination ``1 - SS_res / SS_tot``."""
    return float(1.0 - _residual_ratio(pred, actual))


def _objectives_from_prediction(model, pred, y):
    with np.errstate(over="ignore", invalid="ignore"):
        fitness = float(_residual_ratio(pred, y))
    if not math.isfinite(fitness):
        fitness = math.inf
    return ObjectivePair(fitness, model.complexity)


def model_objectives(model: MultiGeneModel, data: Dataset) -> ObjectivePair:
    """Training fitness ``1 - R^2`` and total expressional complexity.

    Fitness is computed as ``SS_res / SS_tot`` so a fitted model never
    reports a (rounding) negative value.
    """
    if data.y is None:
        raise ValueError("dataset has no target column")
    return _objectives_from_prediction(model, predict(model, data), data.y)


# ---------------------------------------------------------------------------
# JSON model files


def model_to_dict(model: MultiGeneModel, objectives: ObjectivePair | None = None) -> dict:
    d = {
        "schema": list(model.schema),
        "genes": [print_sexpr(g) for g in model.genes],
        "weights": [float(w) for w in model.weights],
        "bias": float(model.bias),
    }
    if objectives is not None:
        d["objectives"] = {
            "fitness": float(objectives.fitness),
            "complexity": int(objectives.complexity),
        }
    return d


def model_from_dict(d: dict) -> MultiGeneModel:
    try:
        schema = tuple(d["schema"])
        genes = tuple(parse_sexpr(g, schema) for g in d["genes"])
        return MultiGeneModel(genes, d["weights"], d["bias"], schema)
    except KeyError as exc:
        raise ValueError(f"model file lacks field {exc.args[0]!r}") from None


def save_model(path, model, objectives=None):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model, objectives), fh, indent=2)
        fh.write("\n")


def load_model(path) -> MultiGeneModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
