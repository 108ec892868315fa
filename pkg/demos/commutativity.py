"""The deformed operators H^(k) of one family commute, and so do the four families."""

from itertools import combinations

import numpy as np

from ruijsenaars.operators import FAMILIES, build, build_H, term_count
from ruijsenaars.shiftalg import SamplerConfig, commutes_at
from ruijsenaars.specialfn import BracketContext, ModelParams

params = ModelParams(np.sqrt(2) / 10 + 1j * np.sqrt(3) / 20, np.sqrt(5) / 10 - 1j * np.sqrt(7) / 40,
                     BracketContext.elliptic(0.3 * np.exp(0.7j)))
cfg = SamplerConfig(samples=20, seed=0)

m, r = 2, 1
print(f"Operators on {m} x-variables and {r} y-variable:")
for k in range(1, 4):
    print(f"  H^({k}) has {term_count(m, r, k)} shift terms")

print("\nComparing A B with B A coefficient by coefficient at 20 random points:")
ops = {k: build_H(m, r, k, params) for k in (1, 2, 3)}
for k, l in combinations(ops, 2):
    rep = commutes_at(ops[k], ops[l], cfg)
    print(f"  [H^({k}), H^({l})]  max residual {rep.max_residual:.1e}")

print("\nMixing families at order one and two:")
mixed = {(f, k): build(f, m, r, k, params) for f in FAMILIES for k in (1, 2)}
worst = max(commutes_at(mixed[a], mixed[b], cfg).max_residual for a, b in combinations(mixed, 2))
print(f"  worst of {len(mixed) * (len(mixed) - 1) // 2} pairs: {worst:.1e}")
