"""D and H are inverse to each other in the sense of a Wronski-type relation.

From that relation, H can be rebuilt from the D operators, either by a
recursion in the order or by a determinant, and vice versa.
"""

import numpy as np

from ruijsenaars.identities import determinant_residual, wronski_residual
from ruijsenaars.shiftalg import SamplerConfig
from ruijsenaars.specialfn import BracketContext, ModelParams

params = ModelParams(np.sqrt(2) / 10 + 1j * np.sqrt(3) / 20, np.sqrt(5) / 10 - 1j * np.sqrt(7) / 40,
                     BracketContext.elliptic(0.3 * np.exp(0.7j)))
cfg = SamplerConfig(samples=10, seed=0)

print("sum over k+l=K of [k kappa + l delta] D^(k) H^(l), which should vanish:")
for K in range(1, 5):
    rep = wronski_residual(2, 1, K, params, cfg)
    print(f"  K={K}: max coefficient residual {rep.max_residual:.1e}")

print("\nRebuilding operators of order l from the other family:")
for route in ("recursion", "determinant"):
    for family in ("H", "D"):
        worst = max(determinant_residual(2, 1, l, params, cfg, route=route, family=family).max_residual
                    for l in (1, 2, 3))
        print(f"  {family} by {route:11s}: {worst:.1e}")
