"""IQA performance indices: SRCC, KRCC, PCC and RMSE.

Rank indices are computed on raw objective scores.  PCC and RMSE are
computed after mapping objective scores onto the subjective scale with the
five-parameter logistic of Sheikh et al. (2006)::

    q(x) = b1 * (1/2 - 1 / (1 + exp(b2 * (x - b3)))) + b4 * x + b5
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

__all__ = [
    "LogisticFit",
    "EvaluationReport",
    "average_ranks",
    "srcc",
    "krcc",
    "pcc",
    "rmse",
    "logistic",
    "logistic_fit",
    "evaluate_report",
]


def _pair(a, b, min_len=2):
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size < min_len:
        raise ValueError(f"need at least {min_len} values")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("inputs must be finite")
    return a, b


def average_ranks(x) -> np.ndarray:
    """1-based ranks; tied values share the mean of the ranks they span."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    starts = np.flatnonzero(np.r_[True, xs[1:] != xs[:-1]])
    ends = np.r_[starts[1:], xs.size]
    mean_rank = (starts + ends + 1) / 2.0
    ranks = np.empty(x.size)
    ranks[order] = np.repeat(mean_rank, ends - starts)
    return ranks


def pcc(a, b) -> float:
    """Pearson linear correlation coefficient."""
    a, b = _pair(a, b)
    da = a - a.mean()
    db = b - b.mean()
    denom = math.sqrt(float(np.dot(da, da)) * float(np.dot(db, db)))
    if denom == 0:
        raise ValueError("zero variance; correlation undefined")
    return float(np.clip(np.dot(da, db) / denom, -1.0, 1.0))


def srcc(a, b) -> float:
    """Spearman rank-order correlation (Pearson on average ranks)."""
    a, b = _pair(a, b)
    try:
        return pcc(average_ranks(a), average_ranks(b))
    except ValueError:
        raise ValueError("zero rank variance; SRCC undefined") from None


def _tie_pairs(x):
    _, counts = np.unique(x, return_counts=True, axis=0)
    return int(np.sum(counts * (counts - 1) // 2))


def _discordant_pairs(a, b):
    """Count pairs ordered oppositely by ``a`` and ``b`` (merge-sort inversions)."""
    order = np.lexsort((b, a))
    seq = b[order].tolist()

    def count(v):
        n = len(v)
        if n < 2:
            return v, 0
        left, cl = count(v[: n // 2])
        right, cr = count(v[n // 2:])
        merged = []
        inv = cl + cr
        i = j = 0
        while i < len(left) and j < len(right):
            if right[j] < left[i]:
                merged.append(right[j])
                inv += len(left) - i
                j += 1
            else:
                merged.append(left[i])
                i += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged, inv

    return count(seq)[1]


def krcc(a, b) -> float:
    """Kendall rank correlation, tau-b (tie corrected).

    ``(C - D) / sqrt((n0 - Ta) * (n0 - Tb))`` with ``n0 = n(n-1)/2`` and
    ``Ta``, ``Tb`` the numbers of pairs tied in each argument.  Runs in
    ``O(n log n)``.
    """
    a, b = _pair(a, b)
    n = a.size
    n0 = n * (n - 1) // 2
    ta, tb = _tie_pairs(a), _tie_pairs(b)
    tab = _tie_pairs(np.column_stack([a, b]))  # tied in both
    if ta == n0 or tb == n0:
        raise ValueError("all values tied; KRCC undefined")
    # Within a-tie groups the lexsort leaves b ascending, so every inversion
    # is a pair strictly ordered in a and strictly reversed in b.
    d = _discordant_pairs(a, b)
    c = n0 - ta - tb + tab - d
    return float((c - d) / math.sqrt((n0 - ta) * (n0 - tb)))


def rmse(a, b) -> float:
    a, b = _pair(a, b, min_len=1)
    return float(np.sqrt(np.mean((a - b) ** 2)))


# ---------------------------------------------------------------------------
# Logistic mapping


@dataclass(frozen=True)
class LogisticFit:
    beta: tuple
    sse: float
    converged: bool

    def __call__(self, x):
        return logistic(x, self.beta)

    def to_dict(self) -> dict:
        return {"beta": [float(v) for v in self.beta], "sse": float(self.sse),
                "converged": bool(self.converged)}


def logistic(x, beta) -> np.ndarray:
    b1, b2, b3, b4, b5 = beta
    x = np.asarray(x, dtype=float)
    # 1 / (1 + exp(z)) == expit(-z)
    return b1 * (0.5 - expit(-b2 * (x - b3))) + b4 * x + b5


def _linear_beta(x, y):
    A = np.column_stack([x, np.ones_like(x)])
    slope, icpt = np.linalg.lstsq(A, y, rcond=None)[0]
    return np.array([0.0, 1.0, 0.0, slope, icpt])


def logistic_fit(objective, subjective, max_iter: int = 2000, rtol: float = 1e-10) -> LogisticFit:
    """Least squares fit of the five-parameter logistic by Nelder-Mead.

    Starts from ``b1 = range(sub)``, ``b2 = 1/std(obj)``, ``b3 = mean(obj)``,
    ``b4 = 0``, ``b5 = mean(sub)``.  The best straight line (``b1 = 0``) is
    also tried as a starting point so the result is never worse than a
    plain linear regression.
    """
    x, y = _pair(objective, subjective, min_len=5)
    sd = x.std()
    init = np.array([y.max() - y.min(), 1.0 / sd if sd > 0 else 1.0, x.mean(), 0.0, y.mean()])
    scale = float(np.sum((y - y.mean()) ** 2)) or 1.0

    def sse(beta):
        with np.errstate(over="ignore", invalid="ignore"):
            r = logistic(x, beta) - y
        v = float(np.dot(r, r))
        return v if math.isfinite(v) else math.inf

    best_beta, best_sse, converged = None, math.inf, False
    for start in (init, _linear_beta(x, y)):
        beta, its, ok = start, 0, False
        # Restart from the incumbent until a restart stops improving; a
        # fresh simplex escapes the collapse plain Nelder-Mead suffers in 5-D.
        while its < max_iter:
            res = minimize(sse, beta, method="Nelder-Mead",
                           options={"maxiter": max_iter - its, "xatol": 1e-8,
                                    "fatol": rtol * scale, "adaptive": True})
            its += max(int(res.nit), 1)
            improved = sse(beta) - res.fun > rtol * scale
            if res.fun <= sse(beta):
                beta = res.x
            ok = bool(res.success)
            if not improved:
                break
        val = sse(beta)
        if val < best_sse:
            best_beta, best_sse, converged = np.asarray(beta, dtype=float), val, ok
    lin = _linear_beta(x, y)
    if sse(lin) < best_sse:
        best_beta, best_sse = lin, sse(lin)
    return LogisticFit(tuple(float(v) for v in best_beta), best_sse, converged)


@dataclass(frozen=True)
class EvaluationReport:
    srcc: float
    krcc: float
    pcc: float
    rmse: float
    logistic: Optional[LogisticFit] = None

    def to_dict(self) -> dict:
        return {
            "srcc": self.srcc,
            "krcc": self.krcc,
            "pcc": self.pcc,
            "rmse": self.rmse,
            "logistic": None if self.logistic is None else self.logistic.to_dict(),
        }


def evaluate_report(objective, subjective, use_logistic: bool = True) -> EvaluationReport:
    """All four indices for one set of predictions.

    SRCC and KRCC use the raw objective scores; PCC and RMSE are taken
    after the logistic mapping unless ``use_logistic`` is false.
    """
    x, y = _pair(objective, subjective)
    fit = logistic_fit(x, y) if use_logistic else None
    mapped = fit(x) if fit is not None else x
    return EvaluationReport(srcc(x, y), krcc(x, y), pcc(mapped, y), rmse(mapped, y), fit)
