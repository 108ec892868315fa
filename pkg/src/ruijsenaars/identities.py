"""Scalar and operator identities, evaluated as residuals at random points.

Each scalar identity has a ``*_sides`` function returning ``(lhs, rhs)`` at
explicit inputs, a ``check_*`` function wrapping that into a one-sample
:class:`~ruijsenaars.shiftalg.ResidualReport`, and a randomized driver in
:func:`run_scalar_suite`.  Residuals are ``|lhs - rhs| / (|lhs| + |rhs| + 1)``
unless stated otherwise.
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from functools import lru_cache
from itertools import permutations

import numpy as np

from .errors import BalancingError, PoleError, UnsupportedRegimeError
from .operators import (
    additive_rule,
    build_bold,
    build_D,
    build,
    build_H,
    compositions,
    subsets,
)
from .shiftalg import (
    EvaluationPoint,
    ResidualReport,
    SamplerConfig,
    _random_coords,
    apply,
    compose,
    equal_at,
    identity,
    linear_combination,
    residual,
    sample_points,
)
from .specialfn import elliptic_gamma, gamma_solution, theta

__all__ = [
    "rsi_sides",
    "nssi_terms",
    "ksni_sides",
    "frobenius_sides",
    "csp_sides",
    "tt_sides",
    "lss_sides",
    "ktp_sides",
    "check_rsi",
    "check_nssi",
    "check_ksni",
    "check_frobenius",
    "check_csp",
    "check_tt",
    "check_lss",
    "check_ktp",
    "solve_ktp_balancing",
    "run_scalar_suite",
    "wronski_operator",
    "wronski_residual",
    "H_via_recursion",
    "D_via_recursion",
    "H_via_determinant",
    "D_via_determinant",
    "determinant_residual",
    "balanced_params",
    "kernel_phi",
    "kernel_shift_quotient",
    "kernel_identity_residual",
    "bold_kernel_phi",
    "bold_kernel_identity_residual",
    "bold_wronski_residual",
    "IDENTITY_NAMES",
]

IDENTITY_NAMES = (
    "rsi", "nssi", "ksni", "frobenius", "csp", "tt", "lss", "ktp",
    "wronski", "determinant", "kernel_additive", "kernel_multiplicative",
)


# Smallest |[denominator]| accepted; raised to the pole floor while drawing inputs.
_POLE_FLOOR = ContextVar("pole_floor", default=0.0)


@contextmanager
def _pole_floor(value):
    token = _POLE_FLOOR.set(value)
    try:
        yield
    finally:
        _POLE_FLOOR.reset(token)


def _ratio(ctx, nums, dens):
    return ctx.ratio(nums, dens, _POLE_FLOOR.get())


def _one(name, lhs, rhs, tol, params=None):
    return ResidualReport(name, [residual(lhs, rhs)], tol, params=params or {})


# -- source identities -------------------------------------------------------

def rsi_sides(z, a, b, k, ctx):
    """Both sides of Ruijsenaars' subset-sum identity (k versus n - k)."""
    n = len(z)

    def side(kk):
        total = 0j
        for I in subsets(n, kk):
            nums, dens = [], []
            for i in range(n):
                if not I[i]:
                    continue
                for j in range(n):
                    if I[j]:
                        continue
                    d = z[i] - z[j]
                    nums += [d - a, d - b]
                    dens += [d, d - a - b]
            total += _ratio(ctx, nums, dens)
        return total

    return side(k), side(n - k)


def nssi_terms(z, w, a, ctx):
    """All terms of the signed subset sum that vanishes identically."""
    n = len(z)
    gap = sum(z) - sum(w)
    out = []
    for I in subsets(n):
        nums = [gap + sum(I) * a]
        dens = [gap]
        for i in range(n):
            if not I[i]:
                continue
            for j in range(n):
                if not I[j]:
                    nums.append(z[i] - z[j] + a)
                    dens.append(z[i] - z[j])
                nums.append(z[i] - w[j])
                dens.append(z[i] - w[j] + a)
        out.append((-1) ** sum(I) * _ratio(ctx, nums, dens))
    return out


def ksni_sides(z, w, a, k, ctx):
    n = len(z)

    def side(u, v):
        total = 0j
        for I in subsets(n, k):
            nums, dens = [], []
            for i in range(n):
                if not I[i]:
                    continue
                for j in range(n):
                    if not I[j]:
                        nums.append(u[i] - u[j] - a)
                        dens.append(u[i] - u[j])
                    nums.append(u[i] + v[j] + a)
                    dens.append(u[i] + v[j])
            total += _ratio(ctx, nums, dens)
        return total

    return side(z, w), side(w, z)


def frobenius_sides(lam, z, w, ctx):
    """det([lam + z_i + w_j] / ([lam][z_i + w_j])) and its product evaluation."""
    n = len(z)
    br = ctx
    zz = np.asarray(z, dtype=complex)
    ww = np.asarray(w, dtype=complex)
    s = zz[:, None] + ww[None, :]
    mat = br(lam + s) / (br(lam) * br(s))
    lhs = np.linalg.det(mat)
    nums = [lam + zz.sum() + ww.sum()]
    for i in range(n):
        for j in range(i + 1, n):
            nums += [zz[i] - zz[j], ww[i] - ww[j]]
    dens = [lam] + list(s.ravel())
    return lhs, _ratio(ctx, nums, dens)


def check_rsi(z, a, b, k, ctx, tol=1e-10):
    return _one("rsi", *rsi_sides(z, a, b, k, ctx), tol)


def check_nssi(z, w, a, ctx, tol=1e-10):
    """Residual |sum| / max |term| of the signed subset sum."""
    terms = nssi_terms(z, w, a, ctx)
    scale = max(abs(t) for t in terms)
    return ResidualReport("nssi", [abs(sum(terms)) / scale], tol)


def check_ksni(z, w, a, k, ctx, tol=1e-10):
    return _one("ksni", *ksni_sides(z, w, a, k, ctx), tol)


def check_frobenius(lam, z, w, ctx, tol=1e-10):
    return _one("frobenius", *frobenius_sides(lam, z, w, ctx), tol)


# -- transformation formulas -------------------------------------------------

def _fact_into(nums, dens, x, k, step):
    if k >= 0:
        nums.extend(x + j * step for j in range(k))
    else:
        dens.extend(x - j * step for j in range(1, -k + 1))


def _y_pair_factors(nums, dens, y, P, d, kap):
    r = len(y)
    for i in range(r):
        if not P[i]:
            continue
        for j in range(r):
            if P[j]:
                continue
            e = y[i] - y[j]
            nums += [e - d, e + d - kap]
            dens += [e, e - kap]


def csp_sides(lam, x, y, k, params):
    """S_k and S_{|lam| + r - k} for the commutativity source sum."""
    ctx, d, kap = params.context, params.delta, params.kappa
    m, r = len(x), len(y)

    def S(kk):
        total = 0j
        for P in subsets(r):
            rest = kk - sum(P)
            if rest < 0:
                continue
            for mu in compositions(rest, m):
                if any(a > b for a, b in zip(mu, lam)):
                    continue
                nums, dens = [], []
                _y_pair_factors(nums, dens, y, P, d, kap)
                for i in range(m):
                    for j in range(m):
                        e = x[i] - x[j]
                        _fact_into(nums, dens, e + d, mu[i] - mu[j], d)
                        _fact_into(dens, nums, e + kap, mu[i] - mu[j], d)
                        _fact_into(nums, dens, e + kap, mu[i], d)
                        _fact_into(nums, dens, e - lam[j] * d, mu[i], d)
                        _fact_into(dens, nums, e + d, mu[i], d)
                        _fact_into(dens, nums, e - (lam[j] - 1) * d - kap, mu[i], d)
                for i in range(m):
                    for j in range(r):
                        e = x[i] - y[j]
                        if P[j]:
                            nums += [e + lam[i] * d, e + (mu[i] - 1) * d + kap]
                            dens += [e + mu[i] * d, e + (lam[i] - 1) * d + kap]
                        else:
                            nums += [e - d, e + mu[i] * d - kap]
                            dens += [e - kap, e + (mu[i] - 1) * d]
                total += _ratio(ctx, nums, dens)
        return total

    return S(k), S(sum(lam) + r - k)


def _T(x, y, z, k, params):
    ctx, d, kap = params.context, params.delta, params.kappa
    m, r = len(x), len(y)
    total = 0j
    for P in subsets(r):
        rest = k - sum(P)
        if rest < 0:
            continue
        for mu in compositions(rest, m):
            nums, dens = [], []
            _y_pair_factors(nums, dens, y, P, d, kap)
            for i in range(m):
                for j in range(m):
                    e = x[i] - x[j]
                    _fact_into(nums, dens, e + d, mu[i] - mu[j], d)
                    _fact_into(dens, nums, e + kap, mu[i] - mu[j], d)
                    _fact_into(nums, dens, e + kap, mu[i], d)
                    _fact_into(nums, dens, x[i] + z[j], mu[i], d)
                    _fact_into(dens, nums, e + d, mu[i], d)
                    _fact_into(dens, nums, x[i] + z[j] + d - kap, mu[i], d)
            for i in range(m):
                for j in range(r):
                    e = x[i] - y[j]
                    if P[j]:
                        nums += [z[i] + y[j], e + (mu[i] - 1) * d + kap]
                        dens += [z[i] + y[j] + d - kap, e + mu[i] * d]
                    else:
                        nums += [e - d, e + mu[i] * d - kap]
                        dens += [e - kap, e + (mu[i] - 1) * d]
            total += _ratio(ctx, nums, dens)
    return total


def tt_sides(x, y, z, k, params):
    """T_k(x; y; z) and T_k(z; -y - delta; x)."""
    yhat = [-c - params.delta for c in y]
    return _T(list(x), list(y), list(z), k, params), _T(list(z), yhat, list(x), k, params)


def lss_sides(x, z, k, params):
    """Both sides of the x <-> z symmetric sum (no y-variables)."""
    ctx, d, kap = params.context, params.delta, params.kappa
    m = len(x)

    def side(u, v):
        total = 0j
        for mu in compositions(k, m):
            nums, dens = [], []
            for i in range(m):
                for j in range(m):
                    e = u[i] - u[j]
                    s = u[i] + v[j]
                    _fact_into(nums, dens, e + d, mu[i] - mu[j], d)
                    _fact_into(dens, nums, e + kap, mu[i] - mu[j], d)
                    nums.extend(e + kap + t * d for t in range(mu[i]))
                    nums.extend(s + t * d for t in range(mu[i]))
                    dens.extend(e + d + t * d for t in range(mu[i]))
                    dens.extend(s + d - kap + t * d for t in range(mu[i]))
            total += _ratio(ctx, nums, dens)
        return total

    return side(list(x), list(z)), side(list(z), list(x))


def solve_ktp_balancing(x, y, X, Y, a_head, delta):
    """Last parameter a_{m+n} making |x| + |a| + s delta = |X| + r delta."""
    return sum(X) + len(y) * delta - sum(x) - sum(a_head) - len(Y) * delta


def ktp_sides(x, y, X, Y, a, k, params, check_balance=True):
    """Both sides of the balanced Kajihara-type transformation."""
    ctx, d = params.context, params.delta
    if len(a) != len(x) + len(X):
        raise ValueError("need m + n parameters a")
    if check_balance:
        gap = sum(x) + sum(a) + len(Y) * d - sum(X) - len(y) * d
        if abs(gap) > 1e-12 * (1 + abs(sum(X)) + abs(sum(x))):
            raise BalancingError(f"balancing condition violated by {gap}")

    def side(x, y, X, Y, a, k):
        m, r, n, s = len(x), len(y), len(X), len(Y)
        total = 0j
        for I in subsets(r):
            rest = k - sum(I)
            if rest < 0:
                continue
            for mu in compositions(rest, m):
                nums, dens = [], []
                for i in range(m):
                    for j in range(i + 1, m):
                        nums.append(x[i] - x[j] + (mu[i] - mu[j]) * d)
                        dens.append(x[i] - x[j])
                for i in range(r):
                    for j in range(r):
                        if I[i] and not I[j]:
                            nums.append(y[i] - y[j] - d)
                            dens.append(y[i] - y[j])
                for i in range(m):
                    for j in range(r):
                        if not I[j]:
                            nums.append(x[i] - y[j] - d)
                            dens.append(x[i] - y[j] + (mu[i] - 1) * d)
                for i in range(m):
                    for aj in a:
                        _fact_into(nums, dens, x[i] + aj, mu[i], d)
                    for j in range(m):
                        _fact_into(dens, nums, x[i] - x[j] + d, mu[i], d)
                    for j in range(n):
                        _fact_into(dens, nums, x[i] + X[j], mu[i], d)
                    for j in range(s):
                        nums.append(x[i] + Y[j] + mu[i] * d)
                        dens.append(x[i] + Y[j])
                for i in range(r):
                    if not I[i]:
                        continue
                    nums.extend(y[i] + aj for aj in a)
                    dens.extend(y[i] - x[j] - mu[j] * d for j in range(m))
                    dens.extend(y[i] + X[j] for j in range(n))
                    for j in range(s):
                        nums.append(y[i] + Y[j] + d)
                        dens.append(y[i] + Y[j])
                total += (-1) ** sum(I) * _ratio(ctx, nums, dens)
        return total

    neg = [-c for c in a]
    return side(x, y, X, Y, list(a), k), side(X, Y, x, y, neg, k)


def check_csp(lam, x, y, k, params, tol=1e-9):
    return _one("csp", *csp_sides(lam, x, y, k, params), tol)


def check_tt(x, y, z, k, params, tol=1e-9):
    return _one("tt", *tt_sides(x, y, z, k, params), tol)


def check_lss(x, z, k, params, tol=1e-9):
    return _one("lss", *lss_sides(x, z, k, params), tol)


def check_ktp(x, y, X, Y, a, k, params, tol=1e-9):
    return _one("ktp", *ktp_sides(x, y, X, Y, a, k, params), tol)


# -- randomized drivers for the scalar identities ------------------------------

def _coords(rng, cfg, n):
    return list(_random_coords(rng, n, cfg))


def _draw_rsi(rng, cfg, params, n=3, k=1):
    z = _coords(rng, cfg, n)
    a, b = _coords(rng, cfg, 2)
    return check_rsi(z, a, b, k, params.context, cfg.tol)


def _draw_nssi(rng, cfg, params, n=3):
    z, w = _coords(rng, cfg, n), _coords(rng, cfg, n)
    (a,) = _coords(rng, cfg, 1)
    return check_nssi(z, w, a, params.context, cfg.tol)


def _draw_ksni(rng, cfg, params, n=3, k=1):
    z, w = _coords(rng, cfg, n), _coords(rng, cfg, n)
    (a,) = _coords(rng, cfg, 1)
    return check_ksni(z, w, a, k, params.context, cfg.tol)


def _draw_frobenius(rng, cfg, params, n=3):
    z, w = _coords(rng, cfg, n), _coords(rng, cfg, n)
    (lam,) = _coords(rng, cfg, 1)
    return check_frobenius(lam, z, w, params.context, cfg.tol)


def _draw_csp(rng, cfg, params, lam=(1, 2), r=1, k=1):
    if 2 * k == sum(lam) + r:
        raise ValueError("k equals its mirror index; the check would be trivial")
    x, y = _coords(rng, cfg, len(lam)), _coords(rng, cfg, r)
    return check_csp(tuple(lam), x, y, k, params, cfg.tol)


def _draw_tt(rng, cfg, params, m=2, r=1, k=2):
    x, y, z = _coords(rng, cfg, m), _coords(rng, cfg, r), _coords(rng, cfg, m)
    return check_tt(x, y, z, k, params, cfg.tol)


def _draw_lss(rng, cfg, params, m=2, k=2):
    x, z = _coords(rng, cfg, m), _coords(rng, cfg, m)
    return check_lss(x, z, k, params, cfg.tol)


def _draw_ktp(rng, cfg, params, m=2, r=1, n=1, s=1, k=2):
    x, y = _coords(rng, cfg, m), _coords(rng, cfg, r)
    X, Y = _coords(rng, cfg, n), _coords(rng, cfg, s)
    a = _coords(rng, cfg, m + n)
    # spread the balancing correction over every a_j so none leaves the box
    gap = solve_ktp_balancing(x, y, X, Y, a[:-1], params.delta) - a[-1]
    a = [c + gap / (m + n) for c in a]
    return check_ktp(x, y, X, Y, a, k, params, cfg.tol)


_DRAWERS = {
    "rsi": _draw_rsi,
    "nssi": _draw_nssi,
    "ksni": _draw_ksni,
    "frobenius": _draw_frobenius,
    "csp": _draw_csp,
    "tt": _draw_tt,
    "lss": _draw_lss,
    "ktp": _draw_ktp,
}


def run_scalar_suite(name, params, cfg=None, **sizes):
    """Evaluate a scalar identity at ``cfg.samples`` random inputs.

    ``sizes`` are forwarded to the drawer (``n``, ``k``, ``m``, ``r``, ``lam``
    ... depending on the identity).  Inputs putting any denominator bracket
    below ``params.pole_floor`` are redrawn.
    """
    if name not in _DRAWERS:
        raise ValueError(f"unknown scalar identity {name!r}; choose from {sorted(_DRAWERS)}")
    cfg = cfg or SamplerConfig()
    rng = cfg.rng()
    res, retries = [], 0
    while len(res) < cfg.samples:
        try:
            with _pole_floor(params.pole_floor):
                rep = _DRAWERS[name](rng, cfg, params, **sizes)
        except (PoleError, ZeroDivisionError, FloatingPointError):
            retries += 1
            if retries > cfg.max_retries:
                raise
            continue
        res.extend(rep.residuals)
    echo = {"variant": params.context.variant, **sizes}
    notes = ""
    if name == "rsi" and 2 * sizes.get("k", 1) == sizes.get("n", 3):
        notes = "k = n - k: both sides coincide term by term"
    return ResidualReport(name, res, cfg.tol, cfg.seed, params=echo, notes=notes)


# -- Wronski relation and determinant formulas ---------------------------------

def wronski_operator(m, r, K, params):
    """sum_{k+l=K} [k kappa + l delta] D^(k) H^(l), which should vanish for K >= 1."""
    b = params.bracket
    d, kap = params.delta, params.kappa
    return linear_combination([
        (complex(b(k * kap + (K - k) * d)), compose(build_D(m, r, k, params), build_H(m, r, K - k, params)))
        for k in range(K + 1)
    ])


def wronski_residual(m, r, K, params, cfg=None):
    """Compare [K delta] H^(K) with minus the remaining Wronski terms."""
    b = params.bracket
    d, kap = params.delta, params.kappa
    lhs = complex(b(K * d)) * build_H(m, r, K, params)
    rhs = linear_combination([
        (-complex(b(k * kap + (K - k) * d)), compose(build_D(m, r, k, params), build_H(m, r, K - k, params)))
        for k in range(1, K + 1)
    ])
    rep = equal_at(lhs, rhs, cfg, name=f"wronski(m={m},r={r},K={K})")
    rep.params = {"m": m, "r": r, "K": K}
    return rep


def _recursion(target, m, r, l, params):
    """Solve the Wronski relation for one family in terms of the other."""
    b = params.bracket
    d, kap = params.delta, params.kappa
    if target == "H":
        lead, mix = d, lambda k, j: k * kap + j * d
        build_other = build_D
    else:
        lead, mix = kap, lambda k, j: k * d + j * kap
        build_other = build_H
    built = {0: identity((m, r), additive_rule(params))}
    others = {}
    for K in range(1, l + 1):
        terms = []
        for k in range(1, K + 1):
            if k not in others:
                others[k] = build_other(m, r, k, params)
            terms.append((-complex(b(mix(k, K - k))) / complex(b(K * lead)), compose(others[k], built[K - k])))
        built[K] = linear_combination(terms)
    return built[l]


def H_via_recursion(m, r, l, params):
    """H^(l) built from D^(1), ..., D^(l) by the Wronski recursion."""
    return _recursion("H", m, r, l, params)


def D_via_recursion(m, r, l, params):
    """D^(l) built from H^(1), ..., H^(l) by the inverse recursion."""
    return _recursion("D", m, r, l, params)


@lru_cache(maxsize=None)
def _hessenberg_permutations(l):
    """Permutations (with sign) whose entries avoid j > i + 1, i.e. the nonzero terms."""
    out = []
    for perm in permutations(range(l)):
        if all(perm[i] <= i + 1 for i in range(l)):
            inv = sum(1 for i in range(l) for j in range(i + 1, l) if perm[i] > perm[j])
            out.append(((-1) ** inv, perm))
    return tuple(out)


def _determinant(entry_family, lead, mix, m, r, l, params):
    if l == 0:
        return build_H(m, r, 0, params)
    b = params.bracket
    ops = {k: build(entry_family, m, r, k, params) for k in range(l + 1)}
    terms = []
    for sign, perm in _hessenberg_permutations(l):
        coeff = complex(sign * (-1) ** l)
        factors = []
        for i0, j0 in enumerate(perm):
            i, j = i0 + 1, j0 + 1
            order = i - j + 1
            coeff *= complex(b(mix(order, j))) / complex(b(i * lead))
            if order:
                factors.append(ops[order])
        term = factors[0] if factors else ops[0]
        for f in factors[1:]:
            term = compose(term, f)
        terms.append((coeff, term))
    return linear_combination(terms)


def H_via_determinant(m, r, l, params):
    """(-1)^l det([(i-j+1) kappa + (j-1) delta] / [i delta] D^(i-j+1)), expanded over permutations."""
    d, kap = params.delta, params.kappa
    return _determinant("D", d, lambda o, j: o * kap + (j - 1) * d, m, r, l, params)


def D_via_determinant(m, r, l, params):
    d, kap = params.delta, params.kappa
    return _determinant("H", kap, lambda o, j: o * d + (j - 1) * kap, m, r, l, params)


def determinant_residual(m, r, l, params, cfg=None, route="determinant", family="H"):
    """Compare H^(l) (or D^(l)) with its determinant or recursion expression."""
    routes = {
        ("determinant", "H"): H_via_determinant,
        ("determinant", "D"): D_via_determinant,
        ("recursion", "H"): H_via_recursion,
        ("recursion", "D"): D_via_recursion,
    }
    other = routes[(route, family)](m, r, l, params)
    rep = equal_at(build(family, m, r, l, params), other, cfg, name=f"{route}_{family}(m={m},r={r},l={l})")
    rep.params = {"m": m, "r": r, "l": l, "route": route, "family": family}
    return rep


def bold_wronski_residual(m, r, N, params, cfg=None):
    """Multiplicative Wronski relation: sum t^k theta(q^k t^l) H^(k) D^(l) = 0."""
    p = params.p if params.context.variant == "elliptic" else 0.0
    q, t = params.q, params.t
    th = lambda z: complex(theta(z, p))  # noqa: E731
    lhs = -th(t**N) * build_bold("D", m, r, N, params)
    rhs = linear_combination([
        (t**k * th(q**k * t ** (N - k)), compose(build_bold("H", m, r, k, params), build_bold("D", m, r, N - k, params)))
        for k in range(1, N + 1)
    ])
    rep = equal_at(lhs, rhs, cfg, name=f"bold_wronski(m={m},r={r},N={N})")
    rep.params = {"m": m, "r": r, "N": N}
    return rep


# -- kernel functions ----------------------------------------------------------

def balanced_params(params, m, r, n, s, exceptional=False):
    """Return params satisfying (m - n) kappa = (r - s) delta.

    With m = n this only requires r = s.  Otherwise kappa is re-solved as
    (r - s) delta / (m - n), which makes kappa/delta rational; such
    exceptional cases are only produced when ``exceptional=True``, and then
    with the genericity floor relaxed to zero.
    """
    if m == n:
        if r != s:
            raise BalancingError("(m - n) kappa = (r - s) delta has no solution with m = n, r != s")
        return params
    if not exceptional:
        raise BalancingError(
            f"(m,r,n,s)={(m, r, n, s)} forces kappa/delta rational; pass exceptional=True to allow it"
        )
    new = (r - s) * params.delta / (m - n)
    if new == 0:
        raise BalancingError(f"balancing forces kappa = 0 for (m,r,n,s)={(m, r, n, s)}")
    return params.replace(kappa=new, genericity_floor=0.0)


def _check_balance(params, m, r, n, s):
    gap = (m - n) * params.kappa - (r - s) * params.delta
    if abs(gap) > 1e-12 * (1 + abs(params.delta) + abs(params.kappa)):
        raise BalancingError(f"balancing condition off by {gap}")


def kernel_phi(point, params):
    """Additive kernel function at ``point`` = (x; y; X; Y)."""
    ctx, d, kap = params.context, params.delta, params.kappa
    x, y = np.asarray(point.x), np.asarray(point.y)
    X, Y = np.asarray(point.X), np.asarray(point.Y)
    out = 1.0 + 0j
    xs = np.add.outer(x, X).ravel()
    if xs.size:
        out *= np.prod(gamma_solution(xs - kap, d, ctx) / gamma_solution(xs, d, ctx))
    ys = np.add.outer(y, Y).ravel()
    if ys.size:
        out *= np.prod(gamma_solution(ys + d, -kap, ctx) / gamma_solution(ys, -kap, ctx))
    cross = np.concatenate([np.add.outer(x, Y).ravel(), np.add.outer(y, X).ravel()])
    if cross.size:
        out *= np.prod(ctx(cross))
    return complex(out)


def kernel_shift_quotient(mu, I, point, params):
    """Closed form of Phi(x + delta mu; y - kappa I) / Phi(x; y) as a bracket product."""
    d, kap = params.delta, params.kappa
    nums, dens = [], []
    for i, xi in enumerate(point.x):
        for Xj in point.X:
            _fact_into(nums, dens, xi + Xj - kap, mu[i], d)
            _fact_into(dens, nums, xi + Xj, mu[i], d)
        for Yj in point.Y:
            nums.append(xi + Yj + mu[i] * d)
            dens.append(xi + Yj)
    for i, yi in enumerate(point.y):
        if not I[i]:
            continue
        for Xj in point.X:
            nums.append(yi + Xj - kap)
            dens.append(yi + Xj)
        for Yj in point.Y:
            nums.append(yi + Yj + d)
            dens.append(yi + Yj)
    return params.context.ratio(nums, dens)


def _kernel_report(name, left, right, phi, arity, secondary, cfg, to_point=None):
    cfg = cfg or SamplerConfig()
    conv = to_point or (lambda pt: pt)

    def value(pt):
        P = conv(pt)
        base = phi(P)
        if not np.isfinite(base) or abs(base) < 1e-300:
            raise PoleError("kernel function vanishes or is singular")
        return apply(left, phi, P) / base, apply(right, phi, P, target="XY") / base

    vals = []

    def validate(pt):
        vals.append(value(pt))
        return True

    sample_points(arity, cfg, validate=validate, secondary=secondary)
    return ResidualReport(name, [residual(a, b) for a, b in vals], cfg.tol, cfg.seed)


def kernel_identity_residual(m, r, n, s, k, params, cfg=None, balance=True, exceptional=False):
    """H_{m,r}^(k) acting on (x; y) versus H_{n,s}^(k) acting on (X; Y), applied to Phi.

    With ``balance=True`` the balancing condition is enforced through
    :func:`balanced_params`; otherwise an unbalanced ``params`` raises
    :class:`BalancingError`.
    """
    params = balanced_params(params, m, r, n, s, exceptional) if balance else params
    _check_balance(params, m, r, n, s)
    left, right = build_H(m, r, k, params), build_H(n, s, k, params)
    rep = _kernel_report(
        f"kernel(m={m},r={r},n={n},s={s},k={k})", left, right,
        lambda P: kernel_phi(P, params), (m, r), (n, s), cfg,
    )
    rep.params = {"m": m, "r": r, "n": n, "s": s, "k": k, "kappa": [params.kappa.real, params.kappa.imag]}
    if m != n:
        rep.notes = "exceptional balanced case: kappa/delta rational, correctness not asserted"
    return rep


def _gamma_branch(x, p, s):
    if abs(abs(s) - 1) < 1e-12:
        raise UnsupportedRegimeError("kernel function needs |q|, |t| != 1")
    if abs(s) < 1:
        return elliptic_gamma(x, p, s)
    return 1 / elliptic_gamma(x / s, p, 1 / s)


def bold_kernel_phi(point, params):
    """Multiplicative kernel function at ``point`` = (z; w; Z; W)."""
    ctx = params.context
    p = ctx.p if ctx.variant == "elliptic" else 0.0
    if ctx.variant not in ("elliptic", "trigonometric") or (ctx.variant == "trigonometric" and ctx.omega != 1):
        raise UnsupportedRegimeError("multiplicative kernel needs the elliptic or omega=1 trigonometric bracket")
    q, t = params.q, params.t
    z, w = np.asarray(point.x), np.asarray(point.y)
    Z, W = np.asarray(point.X), np.asarray(point.Y)
    out = 1.0 + 0j
    zz = np.multiply.outer(z, Z).ravel()
    if zz.size:
        out *= np.prod(_gamma_branch(zz / t, p, q) / _gamma_branch(zz, p, q))
    ww = np.multiply.outer(w, W).ravel()
    if ww.size:
        out *= np.prod(_gamma_branch(q * ww, p, 1 / t) / _gamma_branch(ww, p, 1 / t))
    cross = np.concatenate([np.multiply.outer(z, W).ravel(), np.multiply.outer(w, Z).ravel()])
    if cross.size:
        out *= np.prod(theta(cross, p))
    return complex(out)


def bold_kernel_identity_residual(m, r, n, s, k, params, cfg=None, balance=True, exceptional=False):
    """Multiplicative kernel identity with bold operators on (z; w) and (Z; W)."""
    params = balanced_params(params, m, r, n, s, exceptional) if balance else params
    _check_balance(params, m, r, n, s)
    left, right = build_bold("H", m, r, k, params), build_bold("H", n, s, k, params)
    rep = _kernel_report(
        f"bold_kernel(m={m},r={r},n={n},s={s},k={k})", left, right,
        lambda P: bold_kernel_phi(P, params), (m, r), (n, s), cfg,
        to_point=left.rule.from_additive,
    )
    rep.params = {"m": m, "r": r, "n": n, "s": s, "k": k, "kappa": [params.kappa.real, params.kappa.imag]}
    if m != n:
        rep.notes = "exceptional balanced case: kappa/delta rational, correctness not asserted"
    return rep
