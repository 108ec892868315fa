"""Bracket function, theta function, shifted factorials and gamma-type solutions.

The bracket ``[x]`` is a fixed odd entire solution of the three-term identity

    [x+y][x-y][u+v][u-v] + [x+v][x-v][y+u][y-u] = [x+u][x-u][y+v][y-v].

Four variants are supported::

    elliptic        [x] = exp(-i pi x) theta(exp(2 i pi x); p)
    trigonometric   [x] = -2i sin(pi x / omega)
    hyperbolic      [x] = sinh(pi x / omega)
    rational        [x] = x

At ``omega = 1`` the trigonometric variant coincides with the elliptic one
at ``p = 0``.  All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import loggamma

from .errors import (
    GenericityError,
    ParameterDomainError,
    PoleError,
    UnsupportedRegimeError,
)

__all__ = [
    "BracketContext",
    "ModelParams",
    "GenericityReport",
    "theta",
    "bracket",
    "factorial_args",
    "shifted_factorial",
    "elliptic_gamma",
    "gamma_solution",
    "G_delta",
    "check_genericity",
]

EPS = np.finfo(float).eps
VARIANTS = ("elliptic", "trigonometric", "hyperbolic", "rational")


def default_truncation(p):
    """Number of theta factors needed so that |p|^N is below machine epsilon."""
    ap = abs(p)
    if ap == 0:
        return 0
    return int(math.ceil(math.log(EPS) / math.log(ap))) + 8


def _check_finite(x, what="argument"):
    if not np.all(np.isfinite(x)):
        raise ParameterDomainError(f"non-finite {what}: {x!r}")


def theta(z, p, terms=None):
    """Truncated theta function prod_{j=0}^{N} (1 - p^j z)(1 - p^{j+1}/z).

    Parameters
    ----------
    z : complex or array_like
        Nonzero argument(s).
    p : complex
        Nome with |p| < 1.
    terms : int, optional
        Truncation index N. Chosen from |p| when omitted.
    """
    if not abs(p) < 1:
        raise ParameterDomainError(f"theta requires |p| < 1, got |p| = {abs(p)}")
    z = np.asarray(z, dtype=complex)
    _check_finite(z)
    _check_finite(p, "nome")
    if np.any(z == 0):
        raise ParameterDomainError("theta(z; p) is undefined at z = 0")
    n = default_truncation(p) if terms is None else int(terms)
    if p == 0:
        return 1 - z
    pj = p ** np.arange(n + 1)
    zz = z[..., None]
    return np.prod((1 - pj * zz) * (1 - p * pj / zz), axis=-1)


@dataclass(frozen=True)
class BracketContext:
    """A chosen solution ``[x]`` of the three-term identity.

    Use the constructors :meth:`elliptic`, :meth:`trigonometric`,
    :meth:`hyperbolic` and :meth:`rational` rather than the raw fields.
    """

    variant: str = "elliptic"
    p: complex = 0.0
    omega: complex = 1.0
    truncation_terms: int | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ParameterDomainError(f"unknown bracket variant {self.variant!r}")
        if self.variant == "elliptic":
            if not abs(self.p) < 1:
                raise ParameterDomainError(f"elliptic nome needs |p| < 1, got {self.p}")
            minimum = default_truncation(self.p)
            if self.truncation_terms is None:
                object.__setattr__(self, "truncation_terms", minimum)
            elif self.truncation_terms < minimum:
                raise ParameterDomainError(
                    f"truncation_terms={self.truncation_terms} below the floor {minimum}"
                )
        elif self.omega == 0:
            raise ParameterDomainError("omega must be nonzero")

    @classmethod
    def elliptic(cls, p, truncation_terms=None):
        return cls("elliptic", p=complex(p), truncation_terms=truncation_terms)

    @classmethod
    def trigonometric(cls, omega=1.0):
        return cls("trigonometric", omega=complex(omega))

    @classmethod
    def hyperbolic(cls, omega=1.0):
        return cls("hyperbolic", omega=complex(omega))

    @classmethod
    def rational(cls):
        return cls("rational")

    @classmethod
    def from_name(cls, name, p=0.3, omega=1.0):
        name = {"trig": "trigonometric", "hyp": "hyperbolic"}.get(name, name)
        if name == "elliptic":
            return cls.elliptic(p)
        if name == "trigonometric":
            return cls.trigonometric(omega)
        if name == "hyperbolic":
            return cls.hyperbolic(omega)
        if name == "rational":
            return cls.rational()
        raise ParameterDomainError(f"unknown bracket variant {name!r}")

    @property
    def tau(self):
        """Modular parameter with p = exp(2 i pi tau) (elliptic only)."""
        return np.log(self.p) / (2j * np.pi)

    def doubled(self):
        """Same context with twice the theta truncation (self-consistency checks)."""
        if self.variant != "elliptic":
            return self
        return replace(self, truncation_terms=2 * self.truncation_terms + 1)

    def __call__(self, x):
        return bracket(x, self)

    def ratio(self, nums, dens, floor=0.0):
        """prod [nums] / prod [dens], raising PoleError on a small denominator."""
        n_num = len(nums)
        vals = bracket(np.asarray(list(nums) + list(dens), dtype=complex), self)
        den = vals[n_num:]
        if den.size:
            small = np.abs(den) <= floor
            if small.any():
                i = int(np.argmax(small))
                raise PoleError(
                    f"denominator factor {i} vanishes: [{dens[i]}] = {den[i]}",
                    factor=i,
                    argument=complex(dens[i]),
                    value=complex(den[i]),
                )
        return np.prod(vals[:n_num]) / np.prod(den)

    def describe(self):
        if self.variant == "elliptic":
            return {"variant": "elliptic", "p": self.p, "truncation_terms": self.truncation_terms}
        if self.variant == "rational":
            return {"variant": "rational"}
        return {"variant": self.variant, "omega": self.omega}


def bracket(x, ctx):
    """Evaluate ``[x]`` for the given context (vectorized)."""
    x = np.asarray(x, dtype=complex)
    _check_finite(x)
    if ctx.variant == "elliptic":
        return np.exp(-1j * np.pi * x) * theta(np.exp(2j * np.pi * x), ctx.p, ctx.truncation_terms)
    if ctx.variant == "trigonometric":
        return -2j * np.sin(np.pi * x / ctx.omega)
    if ctx.variant == "hyperbolic":
        return np.sinh(np.pi * x / ctx.omega)
    return x


def factorial_args(x, k, step):
    """Bracket arguments (numerators, denominators) of the shifted factorial [x]_k."""
    if k >= 0:
        return [x + j * step for j in range(k)], []
    return [], [x - j * step for j in range(1, -k + 1)]


def shifted_factorial(x, k, step, ctx, floor=0.0):
    """[x]_k = [x][x+step]...[x+(k-1)step]; for k < 0 the reciprocal 1/[x+k step]_{-k}."""
    nums, dens = factorial_args(x, int(k), step)
    return ctx.ratio(nums, dens, floor)


def _gamma_truncation(a):
    a = abs(a)
    if a == 0:
        return 1
    return int(math.ceil(math.log(EPS) / math.log(a))) + 8


def elliptic_gamma(z, p, q):
    """Truncated elliptic gamma function.

        Gamma(z; p, q) = prod_{j,k >= 0} (1 - p^{j+1} q^{k+1} / z) / (1 - p^j q^k z)

    Both nomes must satisfy |p|, |q| < 1.
    """
    if not (abs(p) < 1 and abs(q) < 1):
        raise ParameterDomainError(
            f"elliptic_gamma needs |p|, |q| < 1 (got {abs(p)}, {abs(q)}); "
            "use the reciprocal branch for |q| > 1"
        )
    z = np.asarray(z, dtype=complex)
    _check_finite(z)
    if np.any(z == 0):
        raise ParameterDomainError("elliptic_gamma is undefined at z = 0")
    pj = p ** np.arange(_gamma_truncation(p))
    qk = q ** np.arange(_gamma_truncation(q))
    pq = np.outer(pj, qk)
    zz = z[..., None, None]
    den = 1 - pq * zz
    if np.any(np.abs(den) < 1e-300):
        raise PoleError(f"elliptic gamma pole at z = {z}")
    return np.prod((1 - p * q * pq / zz) / den, axis=(-2, -1))


def _elliptic_solution(x, step, p):
    q = np.exp(2j * np.pi * step)
    if abs(abs(q) - 1) < 1e-12:
        raise UnsupportedRegimeError(
            f"|exp(2 i pi step)| = 1 for step={step}: the unitary regime is not supported"
        )
    pref = np.exp(1j * np.pi * x * (step - x) / (2 * step))
    z = np.exp(2j * np.pi * x)
    if abs(q) < 1:
        return pref * elliptic_gamma(z, p, q)
    return pref / elliptic_gamma(z / q, p, 1 / q)


def gamma_solution(x, step, ctx):
    """A meromorphic solution G of G(x + step) = [x] G(x).

    Elliptic and trigonometric variants use the elliptic gamma function, with
    the reciprocal branch when |exp(2 i pi step)| > 1.  The hyperbolic variant
    is reduced to the trigonometric one and the rational variant uses Euler's
    gamma function.
    """
    x = np.asarray(x, dtype=complex)
    _check_finite(x)
    if step == 0:
        raise ParameterDomainError("step must be nonzero")
    if ctx.variant == "elliptic":
        return _elliptic_solution(x, step, ctx.p)
    if ctx.variant == "trigonometric":
        return _elliptic_solution(x / ctx.omega, step / ctx.omega, 0.0)
    if ctx.variant == "hyperbolic":
        # sinh(pi x / w) = [i x / w]_trig / 2
        u, s = 1j * x / ctx.omega, 1j * step / ctx.omega
        return np.exp(-np.log(2) * x / step) * _elliptic_solution(u, s, 0.0)
    u = x / step
    return np.exp(u * np.log(complex(step)) + loggamma(u))


def G_delta(x, params):
    """G_delta with G(x + delta) = [x] G(x) for the model's delta."""
    return gamma_solution(x, params.delta, params.context)


@dataclass(frozen=True)
class GenericityReport:
    passed: bool
    n_max: int
    floor: float
    min_delta: float
    min_kappa: float
    first_failure: int | None = None


def check_genericity(params, n_max, floor=None):
    """Report min |[n delta]| and min |[n kappa]| over 1 <= n <= n_max."""
    floor = params.genericity_floor if floor is None else floor
    if n_max < 1:
        return GenericityReport(True, n_max, floor, math.inf, math.inf)
    n = np.arange(1, n_max + 1)
    bd = np.abs(bracket(n * params.delta, params.context))
    bk = np.abs(bracket(n * params.kappa, params.context))
    bad = (bd <= floor) | (bk <= floor)
    first = int(n[np.argmax(bad)]) if bad.any() else None
    return GenericityReport(
        passed=first is None,
        n_max=n_max,
        floor=floor,
        min_delta=float(bd.min()),
        min_kappa=float(bk.min()),
        first_failure=first,
    )


@dataclass(frozen=True)
class ModelParams:
    """Shift parameters (delta, kappa) together with the bracket context.

    ``q = exp(2 i pi delta)`` and ``t = exp(2 i pi kappa)`` are derived.
    ``genericity_floor`` is the floor for |[n delta]|, |[n kappa]| and
    ``pole_floor`` the floor below which a coefficient denominator counts as
    a pole.
    """

    delta: complex
    kappa: complex
    context: BracketContext = field(default_factory=lambda: BracketContext.elliptic(0.3))
    genericity_floor: float = 1e-10
    pole_floor: float = 1e-6

    def __post_init__(self):
        _check_finite(self.delta, "delta")
        _check_finite(self.kappa, "kappa")
        object.__setattr__(self, "delta", complex(self.delta))
        object.__setattr__(self, "kappa", complex(self.kappa))

    @property
    def q(self):
        return np.exp(2j * np.pi * self.delta)

    @property
    def t(self):
        return np.exp(2j * np.pi * self.kappa)

    @property
    def p(self):
        return self.context.p

    def bracket(self, x):
        return bracket(x, self.context)

    def ratio(self, nums, dens):
        return self.context.ratio(nums, dens, self.pole_floor)

    def replace(self, **kw):
        return replace(self, **kw)

    def require_generic(self, n_max):
        rep = check_genericity(self, n_max)
        if not rep.passed:
            raise GenericityError(
                f"genericity fails at n={rep.first_failure}: "
                f"min|[n delta]|={rep.min_delta:.3g}, min|[n kappa]|={rep.min_kappa:.3g}"
            )
        return rep

    @property
    def unitary_q(self):
        return abs(abs(self.q) - 1) < 1e-12

    @property
    def unitary_t(self):
        return abs(abs(self.t) - 1) < 1e-12
