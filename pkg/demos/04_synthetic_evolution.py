"""
Recovering a planted linear model
=================================

y = 2 x1 - 3 x2 + 5 plus small noise, hidden among 14 irrelevant
features.  A default run should place the two-gene model [x1, x2] on the
Pareto archive.
"""

import numpy as np

from mogpfusion import Dataset, EvolutionConfig, evolve, predict, print_sexpr, r_squared, select_final

rng = np.random.default_rng(0)
X = rng.random((200, 16))
y = 2 * X[:, 0] - 3 * X[:, 1] + 5 + rng.normal(0, 0.01, 200)
data = Dataset([f"x{i + 1}" for i in range(16)], X, y)

result = evolve(data, EvolutionConfig(seed=1, holdout_fraction=0.25))

print("complexity  1-R^2(train)  R^2(holdout)  genes")
for ind in result.archive.members:
    r2 = r_squared(predict(ind.model, result.holdout), result.holdout.y)
    genes = ", ".join(print_sexpr(g, data.schema) for g in ind.genes)
    print(f"{ind.objectives.complexity:10d}  {ind.objectives.fitness:12.3e}  {r2:12.6f}  {genes}")

for policy in ("best_r2", "knee"):
    best = select_final(result.archive, result.holdout, policy)
    print(policy, "->", [print_sexpr(g, data.schema) for g in best.genes],
          np.round(best.model.weights, 3), round(best.model.bias, 3))

# best archive fitness per generation never gets worse
print("history tail:", result.history[-3:])
