"""
Expression trees
================

Genes are binary trees over + and - (optionally * and /).  Each tree
has a size, a depth and an expressional complexity: the sum of the sizes
of all its subtrees.
"""

import numpy as np

from mogpfusion import parse_sexpr, print_sexpr, eval_tree, tree_metrics, random_tree

names = ["PSNR", "SSIM", "VIF"]

# positional variables x1..xn and column names are both accepted
t = parse_sexpr("(- (+ x1 x2) VIF)", names)
print(print_sexpr(t), "=", print_sexpr(t, names))
print(tree_metrics(t))

# a chain and a balanced tree with the same node count differ in complexity
chain = parse_sexpr("(+ (+ (+ x1 x2) x3) x1)", names)
print("chain   ", tree_metrics(chain))

X = np.array([[30.0, 0.9, 0.7], [25.0, 0.8, 0.5]])
print("values  ", eval_tree(t, X))

# ramped half-and-half uses these two generators
rng = np.random.default_rng(0)
for method in ("full", "grow"):
    g = random_tree(rng, 3, None, 4, method)
    print(f"{method:5s}", print_sexpr(g, names), tree_metrics(g))
