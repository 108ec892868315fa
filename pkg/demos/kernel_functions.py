"""Kernel functions intertwine operators acting on two different sets of variables."""

import numpy as np

from ruijsenaars.identities import bold_kernel_identity_residual, kernel_identity_residual
from ruijsenaars.shiftalg import SamplerConfig
from ruijsenaars.specialfn import BracketContext, ModelParams

params = ModelParams(np.sqrt(2) / 10 + 1j * np.sqrt(3) / 20, np.sqrt(5) / 10 - 1j * np.sqrt(7) / 40,
                     BracketContext.elliptic(0.3 * np.exp(0.7j)))
cfg = SamplerConfig(samples=10, seed=0)

# The identity only holds when the two variable sets are balanced,
# which the library enforces before evaluating anything.
for sizes in [(1, 1, 1, 1), (2, 1, 2, 1)]:
    for k in (1, 2):
        add = kernel_identity_residual(*sizes, k, params, cfg).max_residual
        mult = bold_kernel_identity_residual(*sizes, k, params, cfg).max_residual
        print(f"(m,r,n,s)={sizes} k={k}: additive {add:.1e}   multiplicative {mult:.1e}")
