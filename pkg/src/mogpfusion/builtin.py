"""The four published MFMOGP fusion formulas as ready-made linear models.

Each formula is a bias plus a weighted sum of individual FR-IQA measure
scores, so each term becomes a single-leaf gene.  Coefficients are stored
exactly as printed (four significant digits).

Note that MFMOGP1 gives identical coefficients to the FSIM/VIF pair
(-46.77) and to the IFC/NQM pair (11.27).  That is how the formula was
published and it is kept verbatim.
"""

from __future__ import annotations

import numpy as np

from .dataset import DataError, Dataset
from .expr import Leaf
from .multigene import MultiGeneModel, predict

__all__ = ["MEASURES", "BUILTIN_MODELS", "builtin_coefficients", "builtin_predict", "resolve_builtin"]

MEASURES = (
    "VSI", "FSIM", "FSIMC", "GSM", "IFC", "IWSSIM", "MAD", "MSSIM",
    "NQM", "PSNR", "RFSIM", "SRSIM", "VIF", "IFS", "SFF", "SSIM",
)

# name -> (training database, [(measure, coefficient), ...], bias)
BUILTIN_MODELS = {
    "MFMOGP1": ("LIVE", [
        ("GSM", 207.4), ("FSIM", -46.77), ("IFC", 11.27), ("IWSSIM", 24.24),
        ("MAD", 68.18), ("NQM", 11.27), ("VIF", -46.77), ("IFS", -35.51),
    ], -114.9),
    "MFMOGP2": ("CSIQ", [
        ("GSM", 2.012), ("VSI", -1.112), ("MAD", 0.4993), ("MSSIM", 0.6708),
        ("RFSIM", -0.1912), ("SRSIM", -0.4408), ("VIF", -0.2299), ("IFS", -0.4408),
        ("SFF", 0.2496),
    ], -0.5207),
    "MFMOGP3": ("TID2008", [
        ("VSI", 10.31), ("IWSSIM", 0.6498), ("MAD", -1.958), ("NQM", -0.6498),
        ("PSNR", 1.958), ("RFSIM", 0.6589), ("SRSIM", 3.917), ("SSIM", -3.848),
        ("VIF", 1.958), ("IFS", 3.848),
    ], -11.37),
    "MFMOGP4": ("TID2013", [
        ("VSI", 15.28), ("FSIM", -14.09), ("FSIMC", 14.09), ("GSM", 3.754),
        ("MAD", -2.565), ("MSSIM", -3.754), ("PSNR", -1.189), ("VIF", 1.189),
        ("IFS", 3.754),
    ], -13.96),
}


def _key(model_id) -> str:
    key = str(model_id).upper()
    if key not in BUILTIN_MODELS:
        raise KeyError(f"unknown built-in model {model_id!r}; choose from {sorted(BUILTIN_MODELS)}")
    return key


def builtin_coefficients(model_id: str) -> MultiGeneModel:
    """Published formula ``model_id`` (e.g. ``"MFMOGP2"``) over the 16 measures."""
    _, terms, bias = BUILTIN_MODELS[_key(model_id)]
    pos = {m: i for i, m in enumerate(MEASURES)}
    genes = [Leaf(pos[m]) for m, _ in terms]
    weights = [w for _, w in terms]
    return MultiGeneModel(genes, weights, bias, MEASURES)


def builtin_predict(model_id: str, rows) -> np.ndarray:
    """Evaluate a published formula on measure rows.

    ``rows`` may be a :class:`Dataset` carrying the 16 measure columns (in
    any order), a sequence of mappings from measure name to value, or an
    array whose columns follow :data:`MEASURES`.
    """
    model = builtin_coefficients(model_id)
    if isinstance(rows, Dataset):
        data = rows.select(MEASURES)
    else:
        rows = list(rows) if not isinstance(rows, np.ndarray) else rows
        if len(rows) and isinstance(rows[0], dict):
            missing = [m for m in MEASURES if m not in rows[0]]
            if missing:
                raise DataError(f"missing measure(s): {', '.join(missing)}")
            X = np.array([[float(r[m]) for m in MEASURES] for r in rows])
        else:
            X = np.asarray(rows, dtype=float).reshape(-1, len(MEASURES))
        data = Dataset(MEASURES, X)
    return predict(model, data)


def resolve_builtin(spec: str):
    """Model for a ``builtin:<name>`` reference, or ``None`` for other strings."""
    if not spec.lower().startswith("builtin:"):
        return None
    return builtin_coefficients(spec.split(":", 1)[1])
