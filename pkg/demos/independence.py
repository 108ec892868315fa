"""Products of the H^(k) span spaces of full rank: no polynomial relation among them.

For each total degree N, the coefficients of every monomial in H^(1), H^(2), ...
are stacked into a matrix whose numerical rank is certified by its singular
values.  A clear gap between kept and dropped values is required, otherwise
the verdict is "inconclusive" instead of pass or fail.
"""

import numpy as np

from ruijsenaars.independence import independence_at_degree, kappa_eq_delta_suite
from ruijsenaars.shiftalg import SamplerConfig
from ruijsenaars.specialfn import BracketContext, ModelParams

delta, kappa = np.sqrt(2) / 10 + 1j * np.sqrt(3) / 20, np.sqrt(5) / 10 - 1j * np.sqrt(7) / 40
ctx = BracketContext.elliptic(0.3 * np.exp(0.7j))
params = ModelParams(delta, kappa, ctx)

for arity in [(1, 1), (2, 1), (2, 2)]:
    for N in (2, 3, 4):
        cert = independence_at_degree(*arity, N, params, SamplerConfig(seed=0))
        print(f"(m,r)={arity} N={N}: rank {cert.rank}/{cert.rows}  gap {cert.gap:.1e}  {cert.verdict}")

# With kappa equal to delta the operators factor through free shift sums.
rep = kappa_eq_delta_suite(2, 1, 3, ModelParams(delta, delta, ctx), SamplerConfig(samples=10, seed=0))
print(f"\nkappa = delta factorization, orders up to 3: {rep.max_residual:.1e}")
