"""Tour of the bracket functions and the gamma-type solutions built on them."""

import numpy as np

from ruijsenaars.specialfn import BracketContext, ModelParams, G_delta, bracket, elliptic_gamma, theta

rng = np.random.default_rng(7)
x, y, u, v = rng.uniform(-0.5, 0.5, 4) + 1j * rng.uniform(-0.1, 0.1, 4)

contexts = {
    "elliptic": BracketContext.elliptic(0.3 * np.exp(0.7j)),
    "trigonometric": BracketContext.trigonometric(),
    "hyperbolic": BracketContext.hyperbolic(),
    "rational": BracketContext.rational(),
}

print("Every bracket is odd and obeys the same three-term relation:")
for name, ctx in contexts.items():
    b = lambda z: bracket(z, ctx)  # noqa: E731
    three_term = (
        b(x + y) * b(x - y) * b(u + v) * b(u - v)
        + b(x + v) * b(x - v) * b(y + u) * b(y - u)
        - b(x + u) * b(x - u) * b(y + v) * b(y - v)
    )
    print(f"  {name:14s} [x]+[-x] = {abs(b(x) + b(-x)):.1e}   three-term defect = {abs(three_term):.1e}")

ctx = contexts["elliptic"]
tau = ctx.tau
print("\nThe elliptic bracket is quasi-periodic in 1 and tau:")
print(f"  [x+1] + [x]           = {abs(bracket(x + 1, ctx) + bracket(x, ctx)):.1e}")
factor = -np.exp(-1j * np.pi * (2 * x + tau))
print(f"  [x+tau] - factor*[x]  = {abs(bracket(x + tau, ctx) - factor * bracket(x, ctx)):.1e}")

params = ModelParams(np.sqrt(2) / 10 + 1j * np.sqrt(3) / 20, np.sqrt(5) / 10 - 1j * np.sqrt(7) / 40, ctx)
z = np.exp(2j * np.pi * x)
q = params.q
print("\nThe elliptic gamma function turns multiplication by q into a theta factor,")
print(f"  Gamma(qz)/Gamma(z) - theta(z) = {abs(elliptic_gamma(q * z, ctx.p, q) / elliptic_gamma(z, ctx.p, q) - theta(z, ctx.p)):.1e}")
print("and G_delta turns the additive shift by delta into the bracket:")
print(f"  G(x+delta)/G(x) - [x]        = {abs(G_delta(x + params.delta, params) / G_delta(x, params) - params.bracket(x)):.1e}")
