"""Score tables: a samples x features matrix plus one subjective-score column."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

__all__ = ["Dataset", "DataError", "load_csv", "format_real"]


class DataError(ValueError):
    """Input data is missing, malformed or degenerate."""


def format_real(x: float) -> str:
    """Shortest decimal string that round-trips to the same double."""
    return repr(float(x))


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with named columns and an optional target.

    Parameters
    ----------
    schema : tuple of str
        Feature names, one per column of ``X``.
    X : ndarray, shape (n_samples, n_features)
    y : ndarray, shape (n_samples,), optional
        Subjective scores (MOS or DMOS).
    ids : tuple of str, optional
        Per-sample labels; defaults to 1-based row numbers.
    higher_is_better : bool
        ``False`` for DMOS-style targets.
    """

    schema: tuple
    X: np.ndarray
    y: Optional[np.ndarray] = None
    ids: Optional[tuple] = None
    higher_is_better: bool = True

    def __post_init__(self):
        schema = tuple(self.schema)
        X = np.asfortranarray(np.asarray(self.X, dtype=float))
        if X.ndim != 2:
            raise DataError("feature matrix must be 2-D")
        if X.shape[1] != len(schema):
            raise DataError(f"{len(schema)} feature names for {X.shape[1]} columns")
        if len(set(schema)) != len(schema):
            raise DataError("feature names must be unique")
        if not np.all(np.isfinite(X)):
            raise DataError("feature matrix contains non-finite values")
        X.setflags(write=False)
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "X", X)
        if self.y is not None:
            y = np.array(self.y, dtype=float)
            if y.shape != (X.shape[0],):
                raise DataError(f"target length {y.shape} does not match {X.shape[0]} samples")
            if not np.all(np.isfinite(y)):
                raise DataError("target contains non-finite values")
            y.setflags(write=False)
            object.__setattr__(self, "y", y)
        ids = self.ids
        if ids is None:
            ids = tuple(str(i + 1) for i in range(X.shape[0]))
        ids = tuple(str(i) for i in ids)
        if len(ids) != X.shape[0]:
            raise DataError("ids length does not match sample count")
        object.__setattr__(self, "ids", ids)

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        return Dataset(
            self.schema,
            self.X[rows],
            None if self.y is None else self.y[rows],
            tuple(np.asarray(self.ids, dtype=object)[rows]),
            self.higher_is_better,
        )

    def select(self, names: Sequence[str]) -> "Dataset":
        """Copy restricted to the features ``names``, in that order."""
        pos = {n: i for i, n in enumerate(self.schema)}
        missing = [n for n in names if n not in pos]
        if missing:
            raise DataError(f"missing column(s): {', '.join(missing)}")
        cols = [pos[n] for n in names]
        return Dataset(tuple(names), self.X[:, cols], self.y, self.ids, self.higher_is_better)

    def oriented(self) -> "Dataset":
        """Copy whose target increases with quality (DMOS targets negated)."""
        if self.higher_is_better or self.y is None:
            return self
        return Dataset(self.schema, self.X, -self.y, self.ids, True)


def _parse_real(text):
    try:
        v = float(text)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def load_csv(path, target_column: Optional[str] = None,
             feature_columns: Optional[Sequence[str]] = None,
             id_column: str = "id", higher_is_better: bool = True) -> Dataset:
    """Read a comma separated score table.

    Features default to every column other than the id and target columns.
    Selected features keep header order.  Rows holding a non-numeric or
    non-finite value in any selected column are reported by file line number.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [(n, r) for n, r in enumerate(csv.reader(fh), 1) if any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0][1]]
    lines = [n for n, _ in rows[1:]]
    body = [r for _, r in rows[1:]]
    if not body:
        raise DataError(f"{path}: no data rows")
    col = {name: i for i, name in enumerate(header)}

    wanted = []
    if target_column is not None:
        wanted.append(target_column)
    if feature_columns is None:
        feature_columns = [h for h in header if h not in (id_column, target_column)]
        if not feature_columns:
            raise DataError(f"{path}: no feature columns")
    else:
        feature_columns = list(feature_columns)
    wanted += feature_columns
    missing = [c for c in wanted if c not in col]
    if missing:
        raise DataError(f"{path}: missing column(s): {', '.join(missing)}")
    feature_columns = sorted(feature_columns, key=col.__getitem__)

    idx = [col[c] for c in feature_columns]
    X = np.empty((len(body), len(idx)))
    y = np.empty(len(body)) if target_column is not None else None
    bad = []
    for r, row in enumerate(body):
        row = row + [""] * (len(header) - len(row))
        vals = [_parse_real(row[i]) for i in idx]
        t = _parse_real(row[col[target_column]]) if y is not None else 0.0
        if t is None or any(v is None for v in vals):
            bad.append(lines[r])
            continue
        X[r] = vals
        if y is not None:
            y[r] = t
    if bad:
        shown = ", ".join(map(str, bad[:20])) + (" ..." if len(bad) > 20 else "")
        raise DataError(f"{path}: non-numeric or non-finite value on line(s) {shown}")

    ids = None
    if id_column in col:
        ids = tuple(row[col[id_column]].strip() for row in body)
        if len(set(ids)) != len(ids):
            raise DataError(f"{path}: duplicate values in column {id_column!r}")
    return Dataset(tuple(feature_columns), X, y, ids, higher_is_better)
