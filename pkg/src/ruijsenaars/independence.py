"""Numeric certification of algebraic independence of H^(1), ..., H^(m+r).

Independence is equivalent to linear independence of all monomials
``H^lam = (H^(1))^lam_1 ... (H^(m+r))^lam_{m+r}``; at weighted degree ``N``
this is full row rank of the matrix of their coefficients, which we probe by
stacking several random evaluation points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import PoleError
from .operators import additive_rule, build_H, build_monomial, compositions, subsets
from .shiftalg import (
    ResidualReport,
    SamplerConfig,
    ShiftKey,
    TermOperator,
    compose,
    equal_at,
    multiplication,
    sample_points,
)

__all__ = [
    "weighted_partitions",
    "CoefficientMatrix",
    "coefficient_matrix",
    "RankCertificate",
    "numeric_rank",
    "independence_at_degree",
    "conjugation_weight",
    "free_shift_sum",
    "conjugate",
    "kappa_eq_delta_suite",
    "GAP_RATIO",
]

GAP_RATIO = 1e3


@lru_cache(maxsize=None)
def weighted_partitions(N, parts):
    """All lam in Z_{>=0}^parts with lam_1 + 2 lam_2 + ... + parts lam_parts = N."""
    out = []

    def rec(i, rest, acc):
        if i > parts:
            if rest == 0:
                out.append(tuple(acc))
            return
        for c in range(rest // i + 1):
            rec(i + 1, rest - c * i, acc + [c])

    rec(1, N, [])
    return tuple(out)


@dataclass
class CoefficientMatrix:
    """Rows indexed by ``lams``, columns by (key, point index) pairs."""

    N: int
    lams: list
    keys: list
    values: np.ndarray
    n_points: int

    @property
    def shape(self):
        return self.values.shape


def _all_keys(m, r, N):
    return [ShiftKey(c[:m], c[m:]) for c in compositions(N, m + r)]


def coefficient_matrix(m, r, N, points, params):
    """Coefficients of every monomial of weighted degree N, stacked over ``points``."""
    if N < 1:
        raise ValueError("N must be positive")
    params.require_generic(m + r)
    lams = list(weighted_partitions(N, m + r))
    cache = {}
    builder = lambda k: cache.setdefault(k, build_H(m, r, k, params))  # noqa: E731
    mons = [build_monomial(lam, m, r, params, builder=builder) for lam in lams]
    keys = _all_keys(m, r, N)
    vals = np.zeros((len(lams), len(keys) * len(points)), dtype=complex)
    for p_idx, pt in enumerate(points):
        for row, op in enumerate(mons):
            coeffs = op.coefficients(pt)
            for col, key in enumerate(keys):
                vals[row, p_idx * len(keys) + col] = coeffs.get(key, 0j)
    if not np.all(np.isfinite(vals)):
        raise PoleError("non-finite coefficient in the independence matrix")
    return CoefficientMatrix(N, lams, keys, vals, len(points))


@dataclass
class RankCertificate:
    rank: int
    rows: int
    singular_values: list
    gap: float
    verdict: str
    notes: str = field(default="")

    @property
    def full_rank(self):
        return self.rank == self.rows


def numeric_rank(M, threshold=1e-10):
    """Rank by singular-value thresholding after row normalization.

    ``M`` is a :class:`CoefficientMatrix` or a plain 2-d array.  The verdict is
    ``pass`` for full row rank, ``fail`` for a clear deficit and
    ``inconclusive`` when the retained/discarded singular value ratio is
    below :data:`GAP_RATIO`.
    """
    A = np.asarray(M.values if isinstance(M, CoefficientMatrix) else M, dtype=complex)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    rows = A.shape[0]
    if rows == 0:
        return RankCertificate(0, 0, [], float("inf"), "pass")
    norms = np.linalg.norm(A, axis=1)
    nz = norms > 0
    A = A.copy()
    A[nz] /= norms[nz, None]
    s = np.linalg.svd(A, compute_uv=False)
    cut = threshold * s[0] if s.size and s[0] > 0 else threshold
    rank = int(np.sum(s > cut))
    kept = s[rank - 1] if rank else 0.0
    dropped = s[rank] if rank < s.size else 0.0
    gap = kept / max(dropped, cut) if rank else 0.0
    if gap < GAP_RATIO and rank:
        verdict = "inconclusive"
    else:
        verdict = "pass" if rank == rows else "fail"
    return RankCertificate(rank, rows, [float(v) for v in s], float(gap), verdict)


def independence_at_degree(m, r, N, params, cfg=None, n_points=3):
    """Sample points, build the matrix and certify its rank."""
    cfg = cfg or SamplerConfig()
    cfg_pts = SamplerConfig(**{**cfg.__dict__, "samples": n_points})
    pts = sample_points(
        (m, r), cfg_pts, validate=lambda pt: coefficient_matrix(m, r, 1, [pt], params) is not None
    )
    return numeric_rank(coefficient_matrix(m, r, N, pts, params))


def conjugation_weight(params):
    """F(x; y) = prod [x_i - x_j] prod [y_i - y_j] / prod [x_i - y_j - delta]."""
    d = params.delta

    def F(pt):
        x, y = pt.x, pt.y
        nums = [x[i] - x[j] for i in range(len(x)) for j in range(i + 1, len(x))]
        nums += [y[i] - y[j] for i in range(len(y)) for j in range(i + 1, len(y))]
        dens = [xi - yj - d for xi in x for yj in y]
        return params.ratio(nums, dens)

    return F


def free_shift_sum(m, r, k, params):
    """sum over |mu| + |I| = k of (-1)^|I| T_x^{delta mu} T_y^{-delta I} (at kappa = delta)."""
    terms = {}
    for I in subsets(r):
        rest = k - sum(I)
        if rest < 0:
            continue
        sign = (-1) ** sum(I)
        for mu in compositions(rest, m):
            terms[ShiftKey(mu, I)] = lambda pt, s=sign: s
    return TermOperator((m, r), additive_rule(params), terms, label=f"free^({k})")


def conjugate(op, weight, inverse=False):
    """weight^{-1} op weight, or weight op weight^{-1} with ``inverse=True``."""
    w = multiplication(weight, op.arity, op.rule, "F")
    winv = multiplication(lambda pt: 1 / weight(pt), op.arity, op.rule, "1/F")
    return compose(w, compose(op, winv)) if inverse else compose(winv, compose(op, w))


def kappa_eq_delta_suite(m, r, k_max, params, cfg=None):
    """At kappa = delta, H^(k) equals the weight-conjugated free shift sum, k <= k_max."""
    if params.kappa != params.delta:
        raise ValueError("kappa_eq_delta_suite needs kappa == delta exactly")
    cfg = cfg or SamplerConfig()
    F = conjugation_weight(params)
    res = []
    for k in range(k_max + 1):
        rep = equal_at(build_H(m, r, k, params), conjugate(free_shift_sum(m, r, k, params), F), cfg)
        res.extend(rep.residuals)
    return ResidualReport(
        f"kappa_eq_delta(m={m},r={r},k<={k_max})", res, cfg.tol, cfg.seed,
        params={"m": m, "r": r, "k_max": k_max},
    )
