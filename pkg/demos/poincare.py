"""A gauged pair S+ and S- gives a representation of the 1+1 Poincare algebra.

H = S+ + S-, P = S+ - S- and the boost B (multiplication by a sum of the
coordinates) close under commutators.  Translating the coefficients of S+
and S- recovers H^(1) and its hatted companion.
"""

import numpy as np

from ruijsenaars.physics import gauge_identification, poincare_residuals
from ruijsenaars.shiftalg import SamplerConfig
from ruijsenaars.specialfn import BracketContext, ModelParams

params = ModelParams(np.sqrt(2) / 10 + 1j * np.sqrt(3) / 20, np.sqrt(5) / 10 - 1j * np.sqrt(7) / 40,
                     BracketContext.elliptic(0.3 * np.exp(0.7j)))
cfg = SamplerConfig(samples=10, seed=0)

for arity in [(1, 1), (2, 1), (2, 2)]:
    rels = poincare_residuals(*arity, params, cfg)
    gauge = max(gauge_identification(*arity, params, s, cfg).max_residual for s in (1, -1))
    text = "  ".join(f"{k} {v.max_residual:.0e}" for k, v in rels.items())
    print(f"(m,r)={arity}: {text}  gauge {gauge:.0e}")
