"""First-order relativistic model: the S-plus/S-minus pair, its weight, and the boost.

Only the root-free gauge-transformed operators are built.  The square-root
factors of the original model enter solely through their squares, in
:func:`delta_gauge_residual`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import additive_rule, build_H, build_hatH
from .shiftalg import (
    FormalOperator,
    ResidualReport,
    SamplerConfig,
    ShiftKey,
    TermOperator,
    commutator,
    equal_at,
    linear_combination,
    multiplication,
    residual,
    sample_points,
    translated,
)
from .specialfn import gamma_solution

__all__ = [
    "PoincareTriple",
    "build_S_pm_gauged",
    "build_delta_weight",
    "boost_operator",
    "poincare_triple",
    "poincare_residuals",
    "check_poincare",
    "gauge_shift",
    "gauge_identification",
    "delta_gauge_residual",
]


def _unit(n, i, v=1):
    return tuple(v if j == i else 0 for j in range(n))


def _x_args(i, x, y, kap, d, sign):
    """Numerators/denominators of the gauged x_i coefficient (sign = +1 or -1)."""
    nums, dens = [], []
    for j, xj in enumerate(x):
        if j != i:
            nums.append(x[i] - xj + sign * kap)
            dens.append(x[i] - xj)
    for yj in y:
        nums.append(x[i] - yj + sign * (kap - d) / 2)
        dens.append(x[i] - yj + sign * (kap + d) / 2)
    return nums, dens


def _y_args(i, x, y, kap, d, sign):
    nums, dens = [], []
    for j, yj in enumerate(y):
        if j != i:
            nums.append(y[i] - yj - sign * d)
            dens.append(y[i] - yj)
    for xj in x:
        nums.append(y[i] - xj + sign * (kap - d) / 2)
        dens.append(y[i] - xj - sign * (kap + d) / 2)
    return nums, dens


def build_S_pm_gauged(m, r, params, sign):
    """Weight-conjugated S-plus (``sign=+1``) or S-minus (``sign=-1``).

    x_i is shifted by ``sign * delta`` with weight ``[kappa]/[delta]`` times a
    bracket ratio; y_i is shifted by ``-sign * kappa`` with a minus sign.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    params.require_generic(1)
    d, kap = params.delta, params.kappa
    lead = complex(params.bracket(kap) / params.bracket(d))
    terms = {}
    for i in range(m):
        key = ShiftKey(_unit(m, i, sign), (0,) * r)
        terms[key] = lambda pt, i=i: lead * params.ratio(*_x_args(i, pt.x, pt.y, kap, d, sign))
    for i in range(r):
        key = ShiftKey((0,) * m, _unit(r, i, sign))
        terms[key] = lambda pt, i=i: -params.ratio(*_y_args(i, pt.x, pt.y, kap, d, sign))
    label = "S+" if sign == 1 else "S-"
    return TermOperator((m, r), additive_rule(params), terms, label=label)


def build_delta_weight(m, r, params):
    """The weight function of the model as a callable ``point -> complex``.

    The mixed factor pairs ``x_i`` with ``y_j``; see the decisions ledger for
    the index correction.
    """
    ctx, d, kap = params.context, params.delta, params.kappa

    def weight(pt):
        x, y = np.asarray(pt.x), np.asarray(pt.y)
        if (len(x), len(y)) != (m, r):
            raise ValueError(f"point arity {(len(x), len(y))} != {(m, r)}")
        out = 1.0 + 0j
        off = ~np.eye(m, dtype=bool)
        dx = np.subtract.outer(x, x)[off]
        if dx.size:
            out *= np.prod(gamma_solution(dx + kap, d, ctx) / gamma_solution(dx, d, ctx))
        off = ~np.eye(r, dtype=bool)
        dy = np.subtract.outer(y, y)[off]
        if dy.size:
            out *= np.prod(gamma_solution(dy - d, -kap, ctx) / gamma_solution(dy, -kap, ctx))
        xy = np.subtract.outer(x, y).ravel()
        if xy.size:
            h = (kap - d) / 2
            out /= np.prod(ctx(xy + h) * ctx(-xy + h))
        return complex(out)

    return weight


def _squared_root_factor(z, w, i, own, other, sign):
    """Square of the i-th root factor of the original model.

    ``own=(step, pair_shift)`` for the variable set ``z`` and ``other`` the
    complementary parameter; x-factors use (kappa, delta), y-factors use
    (-delta, -kappa) after the sign flip built into the model.
    """
    a, b = own, other
    nums, dens = [], []
    for j, zj in enumerate(z):
        if j != i:
            nums.append(z[i] - zj - sign * a)
            dens.append(z[i] - zj)
    for wj in w:
        nums.append(z[i] - wj - sign * a / 2 + sign * b / 2)
        dens.append(z[i] - wj - sign * a / 2 - sign * b / 2)
    return nums, dens


def delta_gauge_residual(m, r, params, sign, cfg=None):
    """Root-free check that the weight conjugates the original model into the gauged one.

    For each term with shift ``s`` the squared relation
    ``c_gauged(p)^2 = c_orig(p)^2 * weight(p + s) / weight(p)`` is compared,
    where ``c_orig^2`` is a product of squared root factors.
    """
    cfg = cfg or SamplerConfig()
    d, kap = params.delta, params.kappa
    op = build_S_pm_gauged(m, r, params, sign)
    weight = build_delta_weight(m, r, params)
    rule = op.rule
    lead2 = complex(params.bracket(kap) / params.bracket(d)) ** 2

    def orig_sq(pt, key):
        after = rule.shift(pt, key)
        if any(key.mu):
            i = key.mu.index(sign)
            # A^{-sign}(p)^2 A^{sign}(p + s)^2, with A^{+-} built from (kappa, delta)
            n1, d1 = _squared_root_factor(pt.x, pt.y, i, kap, d, -sign)
            n2, d2 = _squared_root_factor(after.x, after.y, i, kap, d, sign)
            return lead2 * params.ratio(n1 + n2, d1 + d2)
        i = key.nu.index(sign)
        # B^{+-} carries (-delta, -kappa) in the same template
        n1, d1 = _squared_root_factor(pt.y, pt.x, i, -d, -kap, -sign)
        n2, d2 = _squared_root_factor(after.y, after.x, i, -d, -kap, sign)
        return params.ratio(n1 + n2, d1 + d2)

    vals = []

    def validate(pt):
        base = weight(pt)
        worst = 0.0
        for key, c in op.coefficients(pt).items():
            ratio = weight(rule.shift(pt, key)) / base
            worst = max(worst, residual(c * c, orig_sq(pt, key) * ratio))
        vals.append(worst)
        return True

    sample_points((m, r), cfg, validate=validate)
    sgn = "+" if sign == 1 else "-"
    return ResidualReport(f"weight_gauge{sgn}(m={m},r={r})", vals, cfg.tol, cfg.seed, params={"m": m, "r": r})


def boost_operator(m, r, params):
    """Multiplication by (i/delta) sum x - (i/kappa) sum y."""
    d, kap = params.delta, params.kappa
    return multiplication(
        lambda pt: 1j / d * sum(pt.x) - 1j / kap * sum(pt.y), (m, r), additive_rule(params), label="B"
    )


@dataclass(frozen=True)
class PoincareTriple:
    """Hamiltonian, momentum and boost of the gauged model."""

    Hop: FormalOperator
    Pop: FormalOperator
    Bop: FormalOperator


def poincare_triple(m, r, params):
    plus = build_S_pm_gauged(m, r, params, 1)
    minus = build_S_pm_gauged(m, r, params, -1)
    return PoincareTriple(
        linear_combination([(1, plus), (1, minus)]),
        linear_combination([(1, plus), (-1, minus)]),
        boost_operator(m, r, params),
    )


def poincare_residuals(m, r, params, cfg=None):
    """Reports for [H,P] = 0, [H,B] = iP and [P,B] = iH."""
    cfg = cfg or SamplerConfig()
    tri = poincare_triple(m, r, params)
    H, P, B = tri.Hop, tri.Pop, tri.Bop
    zero = linear_combination([(0, H)])
    pairs = {
        "[H,P]=0": (commutator(H, P), zero),
        "[H,B]=iP": (commutator(H, B), linear_combination([(1j, P)])),
        "[P,B]=iH": (commutator(P, B), linear_combination([(1j, H)])),
    }
    points = sample_points((m, r), cfg, validate=lambda pt: bool(H.coefficients(pt)) or True)
    return {name: equal_at(a, b, cfg, name=f"poincare {name}", points=points) for name, (a, b) in pairs.items()}


def check_poincare(m, r, params, cfg=None):
    """All three relations at shared points; residual per point is the worst relation."""
    cfg = cfg or SamplerConfig()
    reps = poincare_residuals(m, r, params, cfg)
    worst = np.max([rep.residuals for rep in reps.values()], axis=0)
    return ResidualReport(
        f"poincare(m={m},r={r})", list(worst), cfg.tol, cfg.seed,
        params={"m": m, "r": r, **{k: v.max_residual for k, v in reps.items()}},
    )


def gauge_shift(params):
    """Coefficient translation (dx, dy) taking the gauged pair to H^(1) and hatH^(1)."""
    return -params.delta / 2, params.kappa / 2


def gauge_identification(m, r, params, sign, cfg=None):
    """S-plus (resp. S-minus) with translated coefficients versus H^(1) (resp. hatH^(1))."""
    dx, dy = gauge_shift(params)
    op = translated(build_S_pm_gauged(m, r, params, sign), dx, dy)
    target = build_H(m, r, 1, params) if sign == 1 else build_hatH(m, r, 1, params)
    sgn = "+" if sign == 1 else "-"
    rep = equal_at(op, target, cfg, name=f"gauge_identification{sgn}(m={m},r={r})")
    rep.params = {"m": m, "r": r, "sign": sign}
    return rep
