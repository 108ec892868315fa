"""Constructors for the deformed elliptic Ruijsenaars operators and relatives.

Families (all of arity ``(m, r)`` acting on ``(x_1..x_m; y_1..y_r)``)::

    H      sum C_{mu,I}(x; y; delta, kappa)              T_x^{delta mu}  T_y^{-kappa I}
    D      sum C_{mu,I}(y; x; -kappa, -delta)            T_x^{delta I}   T_y^{-kappa mu}
    hatH   sum C_{mu,I}(x-delta; y+kappa; -delta, -kappa) T_x^{-delta mu} T_y^{kappa I}
    hatD   sum C_{mu,I}(y+kappa; x-delta; kappa, delta)   T_x^{-delta I}  T_y^{kappa mu}

with ``|mu| + |I| = k``.  The ``bold_*`` variants are the same operators in
multiplicative variables ``z = exp(2 i pi x)``, ``w = exp(2 i pi y)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .errors import ParameterDomainError, PoleError
from .shiftalg import ShiftKey, ShiftRule, TermOperator, compose, identity, zero
from .specialfn import theta

__all__ = [
    "compositions",
    "subsets",
    "index_pairs",
    "term_count",
    "coeff_C",
    "coeff_C_alt",
    "coeff_hatH_explicit",
    "build",
    "build_H",
    "build_D",
    "build_hatH",
    "build_hatD",
    "build_hatH_explicit",
    "build_H_alt",
    "build_ruijsenaars",
    "build_noumi_sano",
    "build_monomial",
    "build_bold",
    "bold_coeff",
    "bold_prefactor",
    "additive_rule",
    "OperatorSpec",
    "FAMILIES",
]

FAMILIES = ("H", "D", "hatH", "hatD")


@lru_cache(maxsize=None)
def compositions(total, parts):
    """All mu in Z_{>=0}^parts with |mu| = total, in lexicographic order."""
    if parts == 0:
        return ((),) if total == 0 else ()
    if parts == 1:
        return ((total,),)
    out = []
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def subsets(n, size=None):
    """0/1 vectors of length n (optionally of fixed size), by ascending bitmask."""
    out = []
    for mask in range(1 << n):
        v = tuple((mask >> j) & 1 for j in range(n))
        if size is None or sum(v) == size:
            out.append(v)
    return tuple(out)


@lru_cache(maxsize=None)
def index_pairs(m, r, k):
    """All (mu, I) with mu in Z_{>=0}^m, I a 0/1 vector of length r, |mu|+|I| = k."""
    out = []
    for j in range(min(k, r) + 1):
        for mu in compositions(k - j, m):
            for I in subsets(r, j):
                out.append((mu, I))
    return tuple(sorted(out))


def term_count(m, r, k):
    """sum_j C(r, j) C(k - j + m - 1, m - 1)."""
    total = 0
    for j in range(min(k, r) + 1):
        if m == 0:
            total += comb(r, j) if k == j else 0
        else:
            total += comb(r, j) * comb(k - j + m - 1, m - 1)
    return total


def additive_rule(params):
    return ShiftRule.additive(params.delta, params.kappa)


# -- coefficient argument lists ---------------------------------------------

def _fact(nums, dens, x, k, step):
    if k >= 0:
        nums.extend(x + j * step for j in range(k))
    else:
        dens.extend(x - j * step for j in range(1, -k + 1))


def _c_args(mu, I, x, y, d, kap):
    """Sign and bracket arguments of C_{mu,I}(x; y; d, kap)."""
    m, r = len(x), len(y)
    nums, dens = [], []
    for i in range(m):
        for j in range(i + 1, m):
            if mu[i] != mu[j]:
                nums.append(x[i] - x[j] + (mu[i] - mu[j]) * d)
                dens.append(x[i] - x[j])
    for i in range(r):
        if I[i]:
            for j in range(r):
                if not I[j]:
                    nums.append(y[i] - y[j] - d)
                    dens.append(y[i] - y[j])
    for i in range(m):
        if mu[i]:
            for j in range(m):
                _fact(nums, dens, x[i] - x[j] + kap, mu[i], d)
                _fact(dens, nums, x[i] - x[j] + d, mu[i], d)
    for i in range(m):
        for j in range(r):
            if I[j]:
                nums.append(x[i] - y[j] - kap)
                dens.append(x[i] - y[j] + mu[i] * d)
            elif mu[i]:
                nums.append(x[i] - y[j] - d)
                dens.append(x[i] - y[j] + (mu[i] - 1) * d)
    return (-1) ** sum(I), nums, dens


def _c_alt_args(mu, I, x, y, d, kap):
    """C_{mu,I} coded through prod 1/[x_i - x_j - mu_j d]_{mu_i}."""
    m, r = len(x), len(y)
    nums, dens = [], []
    for i in range(m):
        for j in range(m):
            _fact(nums, dens, x[i] - x[j] + kap, mu[i], d)
            _fact(dens, nums, x[i] - x[j] - mu[j] * d, mu[i], d)
    for i in range(r):
        for j in range(r):
            if I[i] and not I[j]:
                nums.append(y[i] - y[j] - d)
                dens.append(y[i] - y[j])
    for i in range(m):
        for j in range(r):
            if I[j]:
                nums.append(x[i] - y[j] - kap)
                dens.append(x[i] - y[j] + mu[i] * d)
            else:
                nums.append(x[i] - y[j] - d)
                dens.append(x[i] - y[j] + (mu[i] - 1) * d)
    return (-1) ** (sum(I) + sum(mu)), nums, dens


def _hat_explicit_args(mu, I, x, y, d, kap):
    """Expanded coefficient D_{mu,I}(x; y) of hatH (shifts T_x^{-d mu} T_y^{kap I})."""
    m, r = len(x), len(y)
    nums, dens = [], []
    for i in range(m):
        for j in range(i + 1, m):
            nums.append(x[i] - x[j] - (mu[i] - mu[j]) * d)
            dens.append(x[i] - x[j])
    for i in range(m):
        for j in range(m):
            _fact(nums, dens, x[j] - x[i] + kap, mu[i], d)
            _fact(dens, nums, x[j] - x[i] + d, mu[i], d)
    for i in range(r):
        for j in range(r):
            if I[i] and not I[j]:
                nums.append(y[i] - y[j] + d)
                dens.append(y[i] - y[j])
    for i in range(m):
        for j in range(r):
            if I[j]:
                nums.append(x[i] - y[j] - d)
                dens.append(x[i] - y[j] - (mu[i] + 1) * d - kap)
            else:
                nums.append(x[i] - y[j] - kap)
                dens.append(x[i] - y[j] - mu[i] * d - kap)
    return (-1) ** sum(I), nums, dens


def _evaluate(specs, params):
    """Evaluate many (key, sign, nums, dens) specs with one bracket call."""
    all_args, bounds = [], []
    for key, sign, nums, dens in specs:
        a = len(all_args)
        all_args.extend(nums)
        b = len(all_args)
        all_args.extend(dens)
        bounds.append((key, sign, a, b, len(all_args)))
    vals = params.bracket(np.asarray(all_args, dtype=complex)) if all_args else np.empty(0, complex)
    out = {}
    floor = params.pole_floor
    for key, sign, a, b, c in bounds:
        den = vals[b:c]
        if den.size and np.min(np.abs(den)) <= floor:
            i = int(np.argmin(np.abs(den)))
            raise PoleError(
                f"pole in coefficient of {key}: factor {i}", factor=i,
                argument=complex(all_args[b + i]), value=complex(den[i]),
            )
        out[key] = sign * np.prod(vals[a:b]) / np.prod(den)
    return out


def coeff_C(mu, I, x, y, params, delta=None, kappa=None):
    """C_{mu,I}(x; y; delta, kappa) (defaults to the model's delta, kappa)."""
    d = params.delta if delta is None else delta
    k = params.kappa if kappa is None else kappa
    sign, nums, dens = _c_args(tuple(mu), tuple(I), tuple(x), tuple(y), d, k)
    return sign * params.ratio(nums, dens)


def coeff_C_alt(mu, I, x, y, params, delta=None, kappa=None):
    d = params.delta if delta is None else delta
    k = params.kappa if kappa is None else kappa
    sign, nums, dens = _c_alt_args(tuple(mu), tuple(I), tuple(x), tuple(y), d, k)
    return sign * params.ratio(nums, dens)


def coeff_hatH_explicit(mu, I, x, y, params):
    sign, nums, dens = _hat_explicit_args(tuple(mu), tuple(I), tuple(x), tuple(y), params.delta, params.kappa)
    return sign * params.ratio(nums, dens)


# -- operator families -------------------------------------------------------

def _family_operator(m, r, k, params, family, args_fn=_c_args, check=True):
    if k < 0:
        raise ValueError("order k must be nonnegative")
    if check:
        params.require_generic(max(k, 1))
    d, kap = params.delta, params.kappa
    if family == "H":
        pairs = index_pairs(m, r, k)

        def spec(pt):
            for mu, I in pairs:
                yield (ShiftKey(mu, I), *args_fn(mu, I, pt.x, pt.y, d, kap))

        keys = [ShiftKey(mu, I) for mu, I in pairs]
    elif family == "D":
        pairs = index_pairs(r, m, k)

        def spec(pt):
            for mu, I in pairs:
                yield (ShiftKey(I, mu), *args_fn(mu, I, pt.y, pt.x, -kap, -d))

        keys = [ShiftKey(I, mu) for mu, I in pairs]
    elif family == "hatH":
        pairs = index_pairs(m, r, k)
        neg = lambda v: tuple(-a for a in v)  # noqa: E731

        def spec(pt):
            xs = tuple(c - d for c in pt.x)
            ys = tuple(c + kap for c in pt.y)
            for mu, I in pairs:
                yield (ShiftKey(neg(mu), neg(I)), *args_fn(mu, I, xs, ys, -d, -kap))

        keys = [ShiftKey(neg(mu), neg(I)) for mu, I in pairs]
    elif family == "hatD":
        pairs = index_pairs(r, m, k)
        neg = lambda v: tuple(-a for a in v)  # noqa: E731

        def spec(pt):
            ys = tuple(c + kap for c in pt.y)
            xs = tuple(c - d for c in pt.x)
            for mu, I in pairs:
                yield (ShiftKey(neg(I), neg(mu)), *args_fn(mu, I, ys, xs, kap, d))

        keys = [ShiftKey(neg(I), neg(mu)) for mu, I in pairs]
    else:
        raise ValueError(f"unknown family {family!r}")
    return TermOperator(
        (m, r), additive_rule(params),
        batch=lambda pt: _evaluate(spec(pt), params), keys=keys, label=f"{family}^({k})_{m},{r}",
    )


def build_H(m, r, k, params):
    """H_{m,r}^{(k)}: the deformed elliptic Ruijsenaars operator of order k."""
    return _family_operator(m, r, k, params, "H")


def build_D(m, r, k, params):
    """D_{m,r}^{(k)}: the family with x- and y-roles exchanged."""
    return _family_operator(m, r, k, params, "D")


def build_hatH(m, r, k, params):
    """hatH_{m,r}^{(k)}: shifts in the reversed direction."""
    return _family_operator(m, r, k, params, "hatH")


def build_hatD(m, r, k, params):
    return _family_operator(m, r, k, params, "hatD")


def build_H_alt(m, r, k, params):
    """H_{m,r}^{(k)} from the rewritten coefficient (independent coding)."""
    return _family_operator(m, r, k, params, "H", args_fn=_c_alt_args)


def build_hatH_explicit(m, r, k, params):
    """hatH_{m,r}^{(k)} from its expanded coefficients D_{mu,I}(x; y)."""
    params.require_generic(max(k, 1))
    d, kap = params.delta, params.kappa
    pairs = index_pairs(m, r, k)
    neg = lambda v: tuple(-a for a in v)  # noqa: E731

    def spec(pt):
        for mu, I in pairs:
            yield (ShiftKey(neg(mu), neg(I)), *_hat_explicit_args(mu, I, pt.x, pt.y, d, kap))

    return TermOperator(
        (m, r), additive_rule(params), batch=lambda pt: _evaluate(spec(pt), params),
        keys=[ShiftKey(neg(mu), neg(I)) for mu, I in pairs], label=f"hatH'^({k})",
    )


def build(family, m, r, k, params):
    return _family_operator(m, r, k, params, family)


def build_ruijsenaars(n, k, params):
    """Ruijsenaars operator D_n^{(k)} on x_1..x_n (arity (n, 0)).

    For k > n the result is the zero operator with ``empty = True``.
    """
    rule = additive_rule(params)
    if k > n or k < 0:
        op = zero((n, 0), rule)
        op.empty = True
        return op
    d, kap = params.delta, params.kappa
    sets = subsets(n, k)

    def spec(pt):
        x = pt.x
        for I in sets:
            nums = [x[i] - x[j] + kap for i in range(n) if I[i] for j in range(n) if not I[j]]
            dens = [x[i] - x[j] for i in range(n) if I[i] for j in range(n) if not I[j]]
            yield ShiftKey(I, ()), 1, nums, dens

    op = TermOperator(
        (n, 0), rule, batch=lambda pt: _evaluate(spec(pt), params),
        keys=[ShiftKey(I, ()) for I in sets], label=f"Ruijsenaars^({k})_{n}",
    )
    op.empty = False
    return op


def build_noumi_sano(n, k, params):
    """Noumi-Sano operator H_n^{(k)} on x_1..x_n (arity (n, 0))."""
    params.require_generic(max(k, 1))
    d, kap = params.delta, params.kappa
    mus = compositions(k, n)

    def spec(pt):
        x = pt.x
        for mu in mus:
            nums, dens = [], []
            for i in range(n):
                for j in range(i + 1, n):
                    nums.append(x[i] - x[j] + (mu[i] - mu[j]) * d)
                    dens.append(x[i] - x[j])
                for j in range(n):
                    nums.extend(x[i] - x[j] + kap + s * d for s in range(mu[i]))
                    dens.extend(x[i] - x[j] + d + s * d for s in range(mu[i]))
            yield ShiftKey(mu, ()), 1, nums, dens

    return TermOperator(
        (n, 0), additive_rule(params), batch=lambda pt: _evaluate(spec(pt), params),
        keys=[ShiftKey(mu, ()) for mu in mus], label=f"NoumiSano^({k})_{n}",
    )


def build_monomial(lam, m, r, params, family="H", builder=None):
    """(F^{(1)})^{lam_1} (F^{(2)})^{lam_2} ... composed left to right."""
    builder = builder or (lambda k: _family_operator(m, r, k, params, family))
    factors = []
    for k, power in enumerate(lam, start=1):
        if power:
            op = builder(k)
            factors.extend([op] * power)
    if not factors:
        return identity((m, r), additive_rule(params))
    out = factors[0]
    for op in factors[1:]:
        out = compose(out, op)
    return out


# -- multiplicative (bold) operators ------------------------------------------

def _bold_args(mu, I, z, w, q, t):
    """Scalar prefactor and theta arguments of the multiplicative coefficient."""
    m, r = len(z), len(w)
    nI, nmu = sum(I), sum(mu)
    pref = (-1) ** nI * (t ** (-m) * q**r) ** nmu * q ** (nI * (nI - 1) // 2)
    nums, dens = [], []
    for i in range(r):
        for j in range(r):
            if I[i] and not I[j]:
                nums.append(q * w[j] / w[i])
                dens.append(w[j] / w[i])
    for i in range(m):
        for j in range(m):
            u = z[i] / z[j]
            nums.extend(t * u * q**s for s in range(mu[i]))
            dens.extend(q * u * q**s for s in range(mu[i]))
    for i in range(m):
        for j in range(i + 1, m):
            pref *= q ** mu[j]
            nums.append(q ** (mu[i] - mu[j]) * z[i] / z[j])
            dens.append(z[i] / z[j])
    for i in range(m):
        for j in range(r):
            if I[j]:
                nums.append(z[i] / (t * w[j]))
                dens.append(q ** mu[i] * z[i] / w[j])
            else:
                nums.append(z[i] / (q * w[j]))
                dens.append(q ** (mu[i] - 1) * z[i] / w[j])
    return pref, nums, dens


def _bold_evaluate(specs, p, floor):
    out = {}
    for key, pref, nums, dens in specs:
        vals = theta(np.asarray(nums + dens, dtype=complex), p) if (nums or dens) else np.empty(0, complex)
        den = vals[len(nums):]
        if den.size and np.min(np.abs(den)) <= floor:
            raise PoleError(f"pole in multiplicative coefficient of {key}")
        out[key] = pref * np.prod(vals[: len(nums)]) / np.prod(den)
    return out


def bold_coeff(mu, I, z, w, q, t, p):
    """Multiplicative coefficient C_{mu,I}(z; w) for parameters (q, t, p)."""
    pref, nums, dens = _bold_args(tuple(mu), tuple(I), tuple(z), tuple(w), q, t)
    return _bold_evaluate([(None, pref, nums, dens)], p, 0.0)[None]


def _bold_context(params):
    ctx = params.context
    if ctx.variant == "elliptic":
        return ctx.p
    if ctx.variant == "trigonometric" and ctx.omega == 1:
        return 0.0
    raise ParameterDomainError(
        "multiplicative operators need the elliptic or the omega=1 trigonometric bracket"
    )


def bold_prefactor(family, m, r, k, params):
    """Exponential factor relating bold and additive operators."""
    d, kap = params.delta, params.kappa
    e = {
        "H": (r - 1) * d - m * kap,
        "D": r * d - (m - 1) * kap,
        "hatH": m * kap - (r - 1) * d,
        "hatD": (m - 1) * kap - r * d,
    }[family]
    return np.exp(1j * np.pi * k * e)


def build_bold(family, m, r, k, params):
    """Multiplicative operator acting on functions of (z; w) by q- and t-shifts."""
    p = _bold_context(params)
    params.require_generic(max(k, 1))
    q, t = params.q, params.t
    floor = params.pole_floor
    neg = lambda v: tuple(-a for a in v)  # noqa: E731
    if family == "H":
        pairs = index_pairs(m, r, k)
        keyf = lambda mu, I: ShiftKey(mu, I)  # noqa: E731
        argf = lambda mu, I, z, w: _bold_args(mu, I, z, w, q, t)  # noqa: E731
    elif family == "D":
        pairs = index_pairs(r, m, k)
        keyf = lambda mu, I: ShiftKey(I, mu)  # noqa: E731
        argf = lambda mu, I, z, w: _bold_args(mu, I, w, z, 1 / t, 1 / q)  # noqa: E731
    elif family == "hatH":
        pairs = index_pairs(m, r, k)
        keyf = lambda mu, I: ShiftKey(neg(mu), neg(I))  # noqa: E731
        argf = lambda mu, I, z, w: _bold_args(  # noqa: E731
            mu, I, tuple(c / q for c in z), tuple(c * t for c in w), 1 / q, 1 / t
        )
    elif family == "hatD":
        pairs = index_pairs(r, m, k)
        keyf = lambda mu, I: ShiftKey(neg(I), neg(mu))  # noqa: E731
        argf = lambda mu, I, z, w: _bold_args(  # noqa: E731
            mu, I, tuple(c * t for c in w), tuple(c / q for c in z), t, q
        )
    else:
        raise ValueError(f"unknown family {family!r}")

    def batch(pt):
        return _bold_evaluate(((keyf(mu, I), *argf(mu, I, pt.x, pt.y)) for mu, I in pairs), p, floor)

    return TermOperator(
        (m, r), ShiftRule.multiplicative(q, t), batch=batch,
        keys=[keyf(mu, I) for mu, I in pairs], label=f"bold{family}^({k})",
    )


@dataclass(frozen=True)
class OperatorSpec:
    """Declarative description of one operator."""

    family: str
    m: int
    r: int
    k: int
    params: object

    def __post_init__(self):
        if min(self.m, self.r, self.k) < 0:
            raise ValueError("m, r, k must be nonnegative")

    def build(self):
        if self.family in FAMILIES:
            return build(self.family, self.m, self.r, self.k, self.params)
        if self.family.startswith("bold_"):
            return build_bold(self.family[5:], self.m, self.r, self.k, self.params)
        if self.family == "ruijsenaars":
            return build_ruijsenaars(self.m, self.k, self.params)
        if self.family == "noumi_sano":
            return build_noumi_sano(self.m, self.k, self.params)
        raise ValueError(f"unknown family {self.family!r}")
