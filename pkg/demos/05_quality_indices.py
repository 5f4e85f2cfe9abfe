"""
Agreement with subjective scores
================================

SRCC and KRCC measure monotonicity on raw scores; PCC and RMSE are taken
after a five-parameter logistic mapping of the objective scores.
"""

import numpy as np

from mogpfusion import evaluate_report, krcc, logistic_fit, srcc

rng = np.random.default_rng(3)
objective = rng.uniform(0, 1, 300)
mos = 1 + 4 / (1 + np.exp(-10 * (objective - 0.5))) + 0.2 * rng.normal(size=300)

report = evaluate_report(objective, mos)
print(report.to_dict())

raw = evaluate_report(objective, mos, use_logistic=False)
print(f"PCC raw {raw.pcc:.4f} vs mapped {report.pcc:.4f}")

# rank indices ignore monotone rescaling
print(srcc(np.exp(objective), mos) == srcc(objective, mos), krcc([1, 2, 3], [1, 3, 2]))

fit = logistic_fit(objective, mos)
print("beta:", np.round(fit.beta, 4), "sse:", round(fit.sse, 4))
