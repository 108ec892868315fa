"""The scalar subset-sum identities everything else is built from."""

import time

import numpy as np

from ruijsenaars.identities import run_scalar_suite
from ruijsenaars.shiftalg import SamplerConfig
from ruijsenaars.specialfn import BracketContext, ModelParams

delta, kappa = np.sqrt(2) / 10 + 1j * np.sqrt(3) / 20, np.sqrt(5) / 10 - 1j * np.sqrt(7) / 40
cfg = SamplerConfig(samples=50, tol=1e-10, seed=0)

start = time.perf_counter()
for ctx in (BracketContext.elliptic(0.3 * np.exp(0.7j)), BracketContext.trigonometric(), BracketContext.rational()):
    params = ModelParams(delta, kappa, ctx)
    row = []
    for name, sizes in [("rsi", {"n": 5, "k": 2}), ("nssi", {"n": 5}), ("ksni", {"n": 5, "k": 2}),
                        ("frobenius", {"n": 5})]:
        row.append(f"{name} {run_scalar_suite(name, params, cfg, **sizes).max_residual:.0e}")
    print(f"{ctx.variant:14s}", "  ".join(row))
print(f"50 random inputs each, {time.perf_counter() - start:.2f}s")

params = ModelParams(delta, kappa, BracketContext.elliptic(0.3 * np.exp(0.7j)))
cfg = SamplerConfig(samples=10, tol=1e-9, seed=0)
print("\nTransformation formulas at small sizes:")
for name, sizes in [("csp", {"lam": (1, 2), "r": 1, "k": 1}), ("tt", {"m": 2, "r": 1, "k": 2}),
                    ("lss", {"m": 2, "k": 3}), ("ktp", {"m": 2, "r": 1, "n": 1, "s": 1, "k": 2})]:
    print(f"  {name}: {run_scalar_suite(name, params, cfg, **sizes).max_residual:.1e}")
