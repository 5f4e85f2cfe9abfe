"""
The four published fusion formulas
==================================

MFMOGP1-4 are fixed weighted sums of 16 quality measures.  They need the
canonical column names; any column order works.
"""

import numpy as np

from mogpfusion import MEASURES, builtin_coefficients, builtin_predict, print_sexpr

for name in ("MFMOGP1", "MFMOGP2", "MFMOGP3", "MFMOGP4"):
    m = builtin_coefficients(name)
    terms = " ".join(f"{w:+g}*{print_sexpr(g, m.schema)}" for w, g in zip(m.weights, m.genes))
    print(f"{name}: {terms} {m.bias:+g}")

# an all-zero row returns the bias
print(builtin_predict("MFMOGP1", np.zeros((1, 16))))

# rows can also be dicts keyed by measure name
row = dict.fromkeys(MEASURES, 0.5)
print({k: float(builtin_predict(k, [row])[0]) for k in ("MFMOGP2", "MFMOGP4")})
