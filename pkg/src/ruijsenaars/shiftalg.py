"""Finite sums of shift operators with function-valued coefficients.

An operator of arity ``(m, r)`` acts on functions of ``(x_1..x_m; y_1..y_r)``
and is a finite sum

    A = sum_key a_key(x; y) T^key,

where a key ``(mu, nu)`` shifts ``x_j -> x_j + mu_j delta`` and
``y_j -> y_j - nu_j kappa`` (additive rule) or ``z_j -> q^mu_j z_j`` and
``w_j -> t^-nu_j w_j`` (multiplicative rule).  Coefficients are closures and
are never simplified symbolically; operator identities are tested by
evaluating coefficients at random generic points.

Composition follows

    (A B)_{a+b}(pt) = sum a_a(pt) * b_b(pt shifted by a).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import PoleError, SamplingError

__all__ = [
    "ShiftKey",
    "ShiftRule",
    "EvaluationPoint",
    "FormalOperator",
    "TermOperator",
    "SamplerConfig",
    "ResidualReport",
    "identity",
    "zero",
    "shift_operator",
    "multiplication",
    "compose",
    "commutator",
    "linear_combination",
    "translated",
    "swapped",
    "apply",
    "equal_at",
    "commutes_at",
    "sample_points",
    "residual",
]


class ShiftKey(NamedTuple):
    mu: tuple
    nu: tuple

    def plus(self, other):
        return ShiftKey(
            tuple(a + b for a, b in zip(self.mu, other.mu)),
            tuple(a + b for a, b in zip(self.nu, other.nu)),
        )

    @property
    def degree(self):
        return sum(self.mu) + sum(self.nu)

    @classmethod
    def zero(cls, m, r):
        return cls((0,) * m, (0,) * r)

    def swap(self):
        return ShiftKey(self.nu, self.mu)


@dataclass(frozen=True)
class EvaluationPoint:
    """Coordinates ``(x; y)`` plus an optional second set ``(X; Y)``."""

    x: tuple = ()
    y: tuple = ()
    X: tuple = ()
    Y: tuple = ()

    def __post_init__(self):
        for name in ("x", "y", "X", "Y"):
            v = tuple(complex(c) for c in getattr(self, name))
            object.__setattr__(self, name, v)
            if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in v):
                raise ValueError(f"non-finite coordinate in {name}")

    @property
    def arity(self):
        return len(self.x), len(self.y)

    def secondary(self):
        """The ``(X; Y)`` part as a primary point."""
        return EvaluationPoint(self.X, self.Y)

    def with_secondary(self, sec):
        return EvaluationPoint(self.x, self.y, sec.x, sec.y)

    def with_primary(self, prim):
        return EvaluationPoint(prim.x, prim.y, self.X, self.Y)

    def translate(self, dx=0.0, dy=0.0):
        return EvaluationPoint(
            tuple(c + dx for c in self.x), tuple(c + dy for c in self.y), self.X, self.Y
        )

    def swap(self):
        return EvaluationPoint(self.y, self.x, self.Y, self.X)

    def as_json(self):
        return {k: [[c.real, c.imag] for c in getattr(self, k)] for k in ("x", "y", "X", "Y")}


@dataclass(frozen=True)
class ShiftRule:
    """How a key acts on a point: additive (delta, kappa) or multiplicative (q, t)."""

    kind: str
    a: complex
    b: complex

    @classmethod
    def additive(cls, delta, kappa):
        return cls("additive", complex(delta), complex(kappa))

    @classmethod
    def multiplicative(cls, q, t):
        return cls("multiplicative", complex(q), complex(t))

    def shift(self, point, key):
        if not any(key.mu) and not any(key.nu):
            return point
        if self.kind == "additive":
            x = tuple(c + k * self.a for c, k in zip(point.x, key.mu))
            y = tuple(c - k * self.b for c, k in zip(point.y, key.nu))
        else:
            x = tuple(c * self.a**k for c, k in zip(point.x, key.mu))
            y = tuple(c * self.b ** (-k) for c, k in zip(point.y, key.nu))
        return EvaluationPoint(x, y, point.X, point.Y)

    def swapped(self):
        """Rule seen after exchanging the roles of x- and y-slots."""
        if self.kind == "additive":
            return ShiftRule("additive", -self.b, -self.a)
        return ShiftRule("multiplicative", 1 / self.b, 1 / self.a)

    def from_additive(self, point):
        """Map an additive sample point to this rule's coordinates."""
        if self.kind == "additive":
            return point
        e = lambda v: tuple(np.exp(2j * np.pi * c) for c in v)  # noqa: E731
        return EvaluationPoint(e(point.x), e(point.y), e(point.X), e(point.Y))


_CACHE_LIMIT = 4096


class FormalOperator:
    """Base class: a finite formal sum of shift operators.

    Subclasses implement :meth:`_compute`, returning a dict from
    :class:`ShiftKey` to complex coefficient at a point.  Results are cached
    per point.
    """

    def __init__(self, arity, rule, label=""):
        self.arity = tuple(arity)
        self.rule = rule
        self.label = label
        self._cache = {}

    # -- structure -------------------------------------------------------
    def keys(self):
        raise NotImplementedError

    def _compute(self, point):
        raise NotImplementedError

    def coefficients(self, point):
        ck = (point.x, point.y)
        hit = self._cache.get(ck)
        if hit is None:
            hit = self._compute(point)
            if len(self._cache) >= _CACHE_LIMIT:
                self._cache.clear()
            self._cache[ck] = hit
        return hit

    def coefficient(self, key, point):
        return self.coefficients(point).get(key, 0.0)

    def clear_cache(self):
        self._cache.clear()

    # -- algebra ---------------------------------------------------------
    def __matmul__(self, other):
        return compose(self, other)

    def __add__(self, other):
        return linear_combination([(1, self), (1, other)])

    def __sub__(self, other):
        return linear_combination([(1, self), (-1, other)])

    def __neg__(self):
        return linear_combination([(-1, self)])

    def __rmul__(self, c):
        return linear_combination([(c, self)])

    def __repr__(self):
        name = self.label or type(self).__name__
        return f"<{name} arity={self.arity} terms={len(self.keys())}>"

    def _check_compatible(self, other):
        if self.arity != other.arity:
            raise ValueError(f"arity mismatch: {self.arity} vs {other.arity}")
        if self.rule != other.rule:
            raise ValueError("operators use different shift rules")


class TermOperator(FormalOperator):
    """Operator given by explicit terms.

    ``terms`` maps each key to a callable ``point -> complex`` or to a list
    of such callables whose values are summed.  Alternatively ``batch`` is a
    single callable ``point -> dict`` computing all coefficients at once; it
    must return exactly the keys in ``keys``.
    """

    def __init__(self, arity, rule, terms=None, *, batch=None, keys=None, label=""):
        super().__init__(arity, rule, label)
        if batch is not None:
            self._batch = batch
            self._keys = frozenset(keys)
            self._terms = None
        else:
            self._batch = None
            self._terms = {
                k: (list(v) if isinstance(v, (list, tuple)) else [v]) for k, v in (terms or {}).items()
            }
            self._keys = frozenset(self._terms)
        for k in self._keys:
            if (len(k.mu), len(k.nu)) != self.arity:
                raise ValueError(f"key {k} does not match arity {self.arity}")

    def keys(self):
        return self._keys

    def _compute(self, point):
        if self._batch is not None:
            return self._batch(point)
        return {k: sum(f(point) for f in fs) for k, fs in self._terms.items()}


class _Composition(FormalOperator):
    def __init__(self, a, b):
        a._check_compatible(b)
        super().__init__(a.arity, a.rule, f"({a.label or 'A'})({b.label or 'B'})")
        self.a, self.b = a, b
        self._keys = frozenset(ka.plus(kb) for ka in a.keys() for kb in b.keys())

    def keys(self):
        return self._keys

    def _compute(self, point):
        out = defaultdict(complex)
        for ka, va in self.a.coefficients(point).items():
            if va == 0:
                continue
            for kb, vb in self.b.coefficients(self.rule.shift(point, ka)).items():
                out[ka.plus(kb)] += va * vb
        return {k: out.get(k, 0j) for k in self._keys}


class _LinearCombination(FormalOperator):
    def __init__(self, pairs, arity, rule):
        super().__init__(arity, rule, "lincomb")
        self.pairs = [(complex(c), op) for c, op in pairs]
        self._keys = frozenset(k for _, op in self.pairs for k in op.keys())

    def keys(self):
        return self._keys

    def _compute(self, point):
        out = {k: 0j for k in self._keys}
        for c, op in self.pairs:
            if c == 0:
                continue
            for k, v in op.coefficients(point).items():
                out[k] += c * v
        return out


class _Translated(FormalOperator):
    def __init__(self, op, dx, dy):
        if op.rule.kind != "additive":
            raise ValueError("translation is defined for additive operators only")
        super().__init__(op.arity, op.rule, f"translated({op.label})")
        self.op, self.dx, self.dy = op, complex(dx), complex(dy)

    def keys(self):
        return self.op.keys()

    def _compute(self, point):
        return self.op.coefficients(point.translate(self.dx, self.dy))


class _Swapped(FormalOperator):
    def __init__(self, op):
        m, r = op.arity
        super().__init__((r, m), op.rule.swapped(), f"swapped({op.label})")
        self.op = op
        self._keys = frozenset(k.swap() for k in op.keys())

    def keys(self):
        return self._keys

    def _compute(self, point):
        return {k.swap(): v for k, v in self.op.coefficients(point.swap()).items()}


def identity(arity, rule):
    return TermOperator(arity, rule, {ShiftKey.zero(*arity): lambda pt: 1.0}, label="id")


def zero(arity, rule):
    return TermOperator(arity, rule, {}, label="zero")


def shift_operator(key, rule, coefficient=None):
    """Single term ``c(point) T^key`` (coefficient 1 by default)."""
    key = ShiftKey(tuple(key[0]), tuple(key[1]))
    f = coefficient if coefficient is not None else (lambda pt: 1.0)
    return TermOperator((len(key.mu), len(key.nu)), rule, {key: f}, label="T")


def multiplication(fn, arity, rule, label="mult"):
    """Multiplication operator by the function ``fn(point)``."""
    return TermOperator(arity, rule, {ShiftKey.zero(*arity): fn}, label=label)


def compose(a, b):
    """The product ``a b`` (apply ``b`` first)."""
    return _Composition(a, b)


def commutator(a, b):
    return linear_combination([(1, compose(a, b)), (-1, compose(b, a))])


def linear_combination(pairs):
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty linear combination needs an explicit zero operator")
    first = pairs[0][1]
    for _, op in pairs[1:]:
        first._check_compatible(op)
    return _LinearCombination(pairs, first.arity, first.rule)


def translated(op, dx, dy):
    """Operator whose coefficients are those of ``op`` at ``(x + dx; y + dy)``."""
    return _Translated(op, dx, dy)


def swapped(op):
    """The same operator with the roles of x- and y-slots exchanged."""
    return _Swapped(op)


def apply(op, f, point, target="xy"):
    """Evaluate ``(op f)(point)``.

    ``target="XY"`` lets the operator act on the secondary variables
    ``(X; Y)`` of the point while ``f`` still receives the full point.
    """
    if target == "xy":
        return sum(c * f(op.rule.shift(point, k)) for k, c in op.coefficients(point).items())
    if target != "XY":
        raise ValueError(f"unknown target {target!r}")
    sec = point.secondary()
    total = 0j
    for k, c in op.coefficients(sec).items():
        total += c * f(point.with_secondary(op.rule.shift(sec, k)))
    return total


def residual(a, b):
    """|a - b| / (|a| + |b| + 1)."""
    return abs(a - b) / (abs(a) + abs(b) + 1.0)


@dataclass
class SamplerConfig:
    """Random generic points for probabilistic identity testing.

    Real parts are uniform in ``[-re_width, re_width]`` and imaginary parts in
    ``[-im_width, im_width]``.  Points whose coordinates (including the
    secondary set) come closer than ``min_separation`` to each other are
    rejected, as are points where a coefficient denominator falls below the
    pole floor.
    """

    samples: int = 20
    tol: float = 1e-8
    seed: int = 0
    re_width: float = 0.5
    im_width: float = 0.1
    min_separation: float = 0.02
    max_retries: int = 1000

    def rng(self):
        return np.random.default_rng(self.seed)


def _random_coords(rng, n, cfg):
    return tuple(
        rng.uniform(-cfg.re_width, cfg.re_width, n) + 1j * rng.uniform(-cfg.im_width, cfg.im_width, n)
    )


def _separated(point, sep):
    coords = point.x + point.y + point.X + point.Y
    for i in range(len(coords)):
        for j in range(i):
            if abs(coords[i] - coords[j]) < sep:
                return False
    return True


def sample_points(arity, cfg, validate=None, secondary=None, rng=None):
    """Yield ``cfg.samples`` additive points with pole-free ``validate(point)``.

    ``validate`` is called on each candidate and should raise
    :class:`PoleError` (or return False) to reject it.  ``secondary`` gives
    the arity of an optional ``(X; Y)`` set.
    """
    rng = cfg.rng() if rng is None else rng
    m, r = arity
    n, s = secondary if secondary else (0, 0)
    out = []
    tries = 0
    while len(out) < cfg.samples:
        if tries > cfg.max_retries:
            raise SamplingError(
                f"no pole-free point found after {cfg.max_retries} retries (arity {arity})"
            )
        pt = EvaluationPoint(*(_random_coords(rng, k, cfg) for k in (m, r, n, s)))
        if not _separated(pt, cfg.min_separation):
            tries += 1
            continue
        if validate is not None:
            try:
                ok = validate(pt)
            except (PoleError, ZeroDivisionError, FloatingPointError):
                ok = False
            if ok is False:
                tries += 1
                continue
        out.append(pt)
    return out


@dataclass
class ResidualReport:
    """Outcome of a randomized identity check."""

    name: str
    residuals: list
    tol: float
    seed: int | None = None
    params: dict = field(default_factory=dict)
    verdict: str | None = None
    notes: str = ""

    def __post_init__(self):
        self.residuals = [float(r) for r in self.residuals]
        if self.verdict is None:
            ok = all(math.isfinite(r) for r in self.residuals) and self.max_residual < self.tol
            self.verdict = "pass" if ok else "fail"

    @property
    def samples(self):
        return len(self.residuals)

    @property
    def max_residual(self):
        return max(self.residuals) if self.residuals else 0.0

    @property
    def median_residual(self):
        return float(np.median(self.residuals)) if self.residuals else 0.0

    @property
    def passed(self):
        return self.verdict == "pass"

    def __bool__(self):
        return self.passed

    def summary(self):
        return (
            f"{self.name}: {self.verdict} max={self.max_residual:.3e} "
            f"median={self.median_residual:.3e} tol={self.tol:.1e} n={self.samples}"
        )


def _key_residual(ca, cb):
    keys = set(ca) | set(cb)
    if not keys:
        return 0.0
    return max(residual(ca.get(k, 0j), cb.get(k, 0j)) for k in keys)


def equal_at(a, b, cfg=None, name="equal_at", points=None, to_point=None):
    """Probabilistic operator equality: compare all coefficients at random points.

    Parameters
    ----------
    a, b : FormalOperator
        Operators of equal arity and shift rule.
    cfg : SamplerConfig
    points : list of EvaluationPoint, optional
        Explicit points; sampled from ``cfg`` when omitted.
    to_point : callable, optional
        Map from an additive sample point to operator coordinates (defaults to
        the shift rule's own mapping).
    """
    a._check_compatible(b)
    cfg = cfg or SamplerConfig()
    conv = to_point or a.rule.from_additive

    def both(pt):
        p = conv(pt)
        return a.coefficients(p), b.coefficients(p)

    if points is None:
        points = sample_points(a.arity, cfg, validate=lambda pt: bool(both(pt)) or True)
    res = [_key_residual(*both(pt)) for pt in points]
    return ResidualReport(name, res, cfg.tol, cfg.seed)


def commutes_at(a, b, cfg=None, name="commutes_at", points=None):
    """Compare ``a b`` with ``b a`` coefficient-wise.

    Testing ``[a, b]`` against zero would measure an absolute error, which
    grows with the size of the composed coefficients; comparing the two
    orders keeps the residual relative.
    """
    return equal_at(compose(a, b), compose(b, a), cfg, name, points)
