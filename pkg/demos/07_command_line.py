"""
End-to-end through the command line entry point
================================================

Writes a CSV, evolves, predicts with the selected model and evaluates the
predictions, all in a temporary directory.  The same calls work from a
shell as ``mogpfusion evolve ...`` or ``python -m mogpfusion evolve ...``.
"""

import csv
import tempfile
from pathlib import Path

import numpy as np

from mogpfusion.cli import main

work = Path(tempfile.mkdtemp())
rng = np.random.default_rng(4)
X = rng.uniform(0, 1, (150, 4))
dmos = 80 - 40 * X[:, 0] - 20 * X[:, 1] * X[:, 2] + rng.normal(size=150)

with open(work / "scores.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["id", "psnr", "ssim", "vif", "fsim", "dmos"])
    for i in range(150):
        w.writerow([f"img{i:03d}", *(repr(float(v)) for v in X[i]), repr(float(dmos[i]))])

# DMOS: lower is better
main(["evolve", "--data", str(work / "scores.csv"), "--target", "dmos", "--lower-is-better",
      "--generations", "40", "--function-set", "+,-,*", "--holdout-fraction", "0.2",
      "--seed", "3", "--out", str(work / "run")])
main(["predict", "--model", str(work / "run" / "selected_model.json"),
      "--data", str(work / "scores.csv"), "--out", str(work / "pred.csv")])
main(["eval", "--predictions", str(work / "pred.csv"), "--data", str(work / "scores.csv"),
      "--target", "dmos", "--out", str(work / "report.json")])

print((work / "run" / "front.csv").read_text())
print("outputs in", work)
