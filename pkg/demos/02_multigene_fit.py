"""
Least-squares gene weights
==========================

A multigene model is a bias plus a weighted sum of gene outputs.  The
weights come from ordinary least squares, so evolution only searches
over tree structure.
"""

import numpy as np

from mogpfusion import Dataset, fit_weights, model_objectives, parse_sexpr, predict

rng = np.random.default_rng(1)
X = rng.uniform(0, 1, (100, 3))
y = 4 * (X[:, 0] - X[:, 1]) + 0.5 * X[:, 2] + 2 + 0.05 * rng.normal(size=100)
data = Dataset(["a", "b", "c"], X, y)

for texts in (["a"], ["(- a b)"], ["(- a b)", "c"], ["a", "b", "c"]):
    genes = [parse_sexpr(t, data.schema) for t in texts]
    model = fit_weights(genes, data)
    obj = model_objectives(model, data)
    print(f"{str(texts):24s} weights={np.round(model.weights, 3)} bias={model.bias:.3f} "
          f"1-R^2={obj.fitness:.5f} complexity={obj.complexity}")

# duplicated genes are collinear; the solver falls back to the minimum-norm answer
dup = fit_weights([parse_sexpr("a", data.schema)] * 2, data)
print("duplicate genes:", dup.weights, "prediction agrees:",
      np.allclose(predict(dup, data), predict(fit_weights([parse_sexpr("a", data.schema)], data), data)))
