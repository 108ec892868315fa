import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruijsenaars.errors import SamplingError
from ruijsenaars.operators import additive_rule, build_H, build_H_alt, build_ruijsenaars
from ruijsenaars.shiftalg import (
    EvaluationPoint,
    ResidualReport,
    SamplerConfig,
    ShiftKey,
    ShiftRule,
    TermOperator,
    apply,
    commutator,
    commutes_at,
    compose,
    equal_at,
    identity,
    linear_combination,
    multiplication,
    residual,
    sample_points,
    shift_operator,
    swapped,
    translated,
)

from .conftest import DELTA, KAPPA, make_params

RULE = ShiftRule.additive(DELTA, KAPPA)


def smooth(pt):
    return cmath.exp(0.3 * sum(pt.x)) * cmath.cos(sum(pt.y) + 0.2) + 0.5 * sum(pt.x) ** 2


def max_key_residual(a, b):
    keys = set(a) | set(b)
    return max(residual(a.get(k, 0j), b.get(k, 0j)) for k in keys)


def random_operator(arity, seed, n_terms=3):
    """A few terms with smooth, seed-dependent coefficients."""
    rng = np.random.default_rng(seed)
    m, r = arity
    terms = {}
    for _ in range(n_terms):
        key = ShiftKey(tuple(int(v) for v in rng.integers(-1, 2, m)), tuple(int(v) for v in rng.integers(-1, 2, r)))
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        terms.setdefault(key, []).append(lambda pt, a=a, b=b: a + b * cmath.sin(sum(pt.x) - sum(pt.y)))
    return TermOperator(arity, RULE, terms)


# hand expansion of H^(1) for one x and one y variable
def hand_A(x, y, P):
    b = P.bracket
    return b(KAPPA) * b(x - y - DELTA) / (b(DELTA) * b(x - y))


def hand_B(x, y, P):
    b = P.bracket
    return -b(x - y - KAPPA) / b(x - y)


# -- keys, points, rules -------------------------------------------------------

def test_shift_key_arithmetic():
    a, b = ShiftKey((1, 0), (1,)), ShiftKey((0, 2), (-1,))
    assert a.plus(b) == ShiftKey((1, 2), (0,))
    assert a.degree == 2
    assert ShiftKey.zero(2, 1) == ShiftKey((0, 0), (0,))
    assert a.swap() == ShiftKey((1,), (1, 0))


def test_additive_and_multiplicative_shift_rules():
    pt = EvaluationPoint((0.1, 0.2), (0.3,))
    moved = RULE.shift(pt, ShiftKey((1, -2), (1,)))
    assert moved.x == pytest.approx((0.1 + DELTA, 0.2 - 2 * DELTA))
    assert moved.y == pytest.approx((0.3 - KAPPA,))
    mult = ShiftRule.multiplicative(2.0, 3.0)
    moved = mult.shift(EvaluationPoint((1.0,), (1.0,)), ShiftKey((2,), (1,)))
    assert moved.x == pytest.approx((4.0,)) and moved.y == pytest.approx((1 / 3,))


def test_non_finite_point_is_rejected():
    with pytest.raises(ValueError):
        EvaluationPoint((float("nan"),), ())


def test_point_helpers_round_trip():
    pt = EvaluationPoint((0.1,), (0.2, 0.3), (0.4,), ())
    assert pt.secondary() == EvaluationPoint((0.4,), ())
    assert pt.swap().swap() == pt
    assert pt.with_secondary(pt.secondary()) == pt
    assert pt.as_json()["y"] == [[0.2, 0.0], [0.3, 0.0]]


# -- compose -------------------------------------------------------------------

def test_compose_with_identity(params, cfg):
    H = build_H(1, 1, 2, params)
    assert equal_at(compose(identity((1, 1), H.rule), H), H, cfg).max_residual == 0
    assert equal_at(compose(H, identity((1, 1), H.rule)), H, cfg).max_residual == 0


def test_compose_shift_then_multiplied_shift():
    f = lambda pt: cmath.exp(pt.x[0])  # noqa: E731
    T = shift_operator(((1,), ()), RULE)
    fT = shift_operator(((1,), ()), RULE, coefficient=f)
    pt = EvaluationPoint((0.2 + 0.1j,), ())
    coeffs = compose(T, fT).coefficients(pt)
    assert set(coeffs) == {ShiftKey((2,), ())}
    assert coeffs[ShiftKey((2,), ())] == pytest.approx(f(EvaluationPoint((0.2 + 0.1j + DELTA,), ())))


def test_compose_first_order_squared_matches_hand_expansion(params):
    H1 = build_H(1, 1, 1, params)
    sq = compose(H1, H1)
    for pt in sample_points((1, 1), SamplerConfig(samples=10, seed=4)):
        x, y = pt.x[0], pt.y[0]
        A, B = (lambda u, v: hand_A(u, v, params)), (lambda u, v: hand_B(u, v, params))
        oracle = {
            ShiftKey((2,), (0,)): A(x, y) * A(x + DELTA, y),
            ShiftKey((1,), (1,)): A(x, y) * B(x + DELTA, y) + B(x, y) * A(x, y - KAPPA),
            ShiftKey((0,), (2,)): B(x, y) * B(x, y - KAPPA),
        }
        assert max_key_residual(sq.coefficients(pt), oracle) < 1e-10


def test_compose_rejects_mismatched_operators(params):
    with pytest.raises(ValueError):
        compose(build_H(1, 1, 1, params), build_H(2, 1, 1, params))
    with pytest.raises(ValueError):
        compose(identity((1, 0), RULE), identity((1, 0), ShiftRule.additive(DELTA, 2 * KAPPA)))


def test_composition_keys_are_pairwise_sums():
    A, B = random_operator((2, 1), 0), random_operator((2, 1), 1)
    assert compose(A, B).keys() == {a.plus(b) for a in A.keys() for b in B.keys()}


def test_associativity(cfg):
    A, B, C = (random_operator((2, 1), s) for s in range(3))
    rep = equal_at(compose(compose(A, B), C), compose(A, compose(B, C)), cfg)
    assert rep.max_residual < 1e-9


def test_operator_sugar(params, cfg):
    H1, H2 = build_H(1, 1, 1, params), build_H(1, 1, 2, params)
    assert equal_at(H1 @ H2, compose(H1, H2), cfg).max_residual == 0
    assert equal_at(H1 - H1, 0 * H1, cfg).max_residual == 0
    assert equal_at(-(H1 + H2), linear_combination([(-1, H1), (-1, H2)]), cfg).max_residual == 0


# -- commutator ----------------------------------------------------------------

def test_commutator_with_self_and_identity_vanishes(params, cfg):
    H = build_H(2, 1, 2, params)
    zero = linear_combination([(0, H)])
    assert equal_at(commutator(H, H), zero, cfg).max_residual == 0
    assert equal_at(commutator(identity(H.arity, H.rule), H), zero, cfg).max_residual < 1e-15


def test_first_and_second_order_commute(params):
    H1, H2 = build_H(1, 1, 1, params), build_H(1, 1, 2, params)
    rep = equal_at(commutator(H1, H2), linear_combination([(0, H1)]), SamplerConfig(samples=20, seed=0))
    assert rep.samples == 20 and rep.max_residual < 1e-8


def test_multiplication_does_not_commute_with_shifts():
    T = shift_operator(((1,), ()), RULE)
    X = multiplication(lambda pt: pt.x[0], (1, 0), RULE)
    pt = EvaluationPoint((0.3,), ())
    # [T, x] = delta T
    assert commutator(T, X).coefficients(pt)[ShiftKey((1,), ())] == pytest.approx(DELTA)


def test_commutes_at_flags_shift_against_multiplication(cfg):
    T = shift_operator(((1,), ()), RULE)
    X = multiplication(lambda pt: 5 + pt.x[0], (1, 0), RULE)
    assert not commutes_at(T, X, cfg).passed


def test_commutes_at_stays_relative_for_large_coefficients(params):
    # composed coefficients reach ~1e7 at some of these points, so [A, B]
    # against zero carries an absolute rounding error far above the ratio below
    A, B = build_H(2, 1, 2, params), build_H(2, 1, 3, params)
    cfg = SamplerConfig(samples=20, seed=0)
    assert commutes_at(A, B, cfg).max_residual < 1e-12
    assert commutes_at(A, B, cfg).residuals == equal_at(A @ B, B @ A, cfg).residuals


# -- apply ---------------------------------------------------------------------

def test_apply_identity_and_shift():
    pt = EvaluationPoint((0.2,), (0.1 - 0.05j,))
    assert apply(identity((1, 1), RULE), smooth, pt) == smooth(pt)
    assert apply(shift_operator(((1,), (0,)), RULE), smooth, pt) == pytest.approx(
        smooth(EvaluationPoint((0.2 + DELTA,), pt.y))
    )


def test_apply_first_order_matches_hand_sum(params):
    H1 = build_H(1, 1, 1, params)
    for pt in sample_points((1, 1), SamplerConfig(samples=5, seed=8)):
        x, y = pt.x[0], pt.y[0]
        oracle = (
            hand_A(x, y, params) * smooth(EvaluationPoint((x + DELTA,), (y,)))
            + hand_B(x, y, params) * smooth(EvaluationPoint((x,), (y - KAPPA,)))
        )
        assert abs(apply(H1, smooth, pt) - oracle) <= 1e-12 * (abs(oracle) + 1)


def test_apply_on_secondary_variables():
    T = shift_operator(((1,), ()), RULE)
    pt = EvaluationPoint((0.1,), (), (0.4,), ())
    val = apply(T, lambda p: p.x[0] * p.X[0], pt, target="XY")
    assert val == pytest.approx(0.1 * (0.4 + DELTA))
    with pytest.raises(ValueError):
        apply(T, smooth, pt, target="yx")


def test_apply_compose_consistency():
    A, B = random_operator((1, 2), 5), random_operator((1, 2), 6)
    for pt in sample_points((1, 2), SamplerConfig(samples=5, seed=3)):
        lhs = apply(compose(A, B), smooth, pt)
        rhs = apply(A, lambda q: apply(B, smooth, q), pt)
        assert abs(lhs - rhs) <= 1e-10 * (abs(lhs) + 1)


# -- translated / swapped ------------------------------------------------------

def test_translated_reads_coefficients_at_moved_point(params):
    H = build_H(1, 1, 1, params)
    pt = EvaluationPoint((0.2,), (-0.1,))
    moved = translated(H, 0.05, -0.02).coefficients(pt)
    assert moved == H.coefficients(pt.translate(0.05, -0.02))


def test_swapped_exchanges_slots(params):
    H = build_H(2, 1, 1, params)
    S = swapped(H)
    assert S.arity == (1, 2)
    pt = EvaluationPoint((0.3,), (0.1, -0.2))
    orig = H.coefficients(pt.swap())
    assert S.coefficients(pt) == {k.swap(): v for k, v in orig.items()}
    assert S.rule.swapped() == H.rule


# -- equal_at ------------------------------------------------------------------

def test_equal_at_self_is_exact(params, cfg):
    H = build_H(2, 2, 2, params)
    rep = equal_at(H, H, cfg)
    assert rep.max_residual == 0 and rep.passed and rep.seed == cfg.seed


@pytest.mark.parametrize("k", range(4))
def test_pure_y_operator_is_signed_ruijsenaars_with_swapped_parameters(k):
    P = make_params()
    H = build_H(0, 3, k, P)
    R = build_ruijsenaars(3, k, P.replace(delta=-KAPPA, kappa=-DELTA))
    for pt in sample_points((0, 3), SamplerConfig(samples=10, seed=k)):
        ch = H.coefficients(pt)
        cr = {ShiftKey((), key.mu): (-1) ** k * v for key, v in R.coefficients(EvaluationPoint(pt.y)).items()}
        assert max_key_residual(ch, cr) < 1e-9


@pytest.mark.parametrize("arity", [(1, 1), (2, 1), (2, 2), (3, 0)])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_two_codings_of_the_coefficient_agree(any_params, arity, k, cfg):
    rep = equal_at(build_H(*arity, k, any_params), build_H_alt(*arity, k, any_params), cfg)
    assert rep.passed, rep.summary()


def test_equal_at_detects_difference(params, cfg):
    H1 = build_H(1, 1, 1, params)
    rep = equal_at(H1, 2 * H1, cfg)
    assert not rep.passed and rep.verdict == "fail"


# -- sampling and reports ------------------------------------------------------

def test_sampler_is_deterministic():
    cfg = SamplerConfig(samples=5, seed=11)
    assert sample_points((2, 1), cfg) == sample_points((2, 1), cfg)
    assert sample_points((2, 1), cfg) != sample_points((2, 1), SamplerConfig(samples=5, seed=12))


def test_sampler_respects_separation_and_box():
    cfg = SamplerConfig(samples=30, seed=2, min_separation=0.05)
    for pt in sample_points((2, 2), cfg, secondary=(1, 0)):
        coords = pt.x + pt.y + pt.X
        assert len(coords) == 5
        assert all(abs(c.real) <= cfg.re_width and abs(c.imag) <= cfg.im_width for c in coords)
        assert min(abs(a - b) for i, a in enumerate(coords) for b in coords[:i]) >= 0.05


def test_sampler_gives_up():
    with pytest.raises(SamplingError):
        sample_points((1, 0), SamplerConfig(samples=1, max_retries=5), validate=lambda pt: False)


def test_residual_report_summary():
    rep = ResidualReport("demo", [1e-12, 3e-12, 2e-12], 1e-8, seed=7)
    assert rep.passed and rep.samples == 3
    assert rep.median_residual == pytest.approx(2e-12)
    assert "demo: pass" in rep.summary()
    assert not ResidualReport("bad", [float("nan")], 1e-8)


@settings(max_examples=50, deadline=None)
@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_residual_is_symmetric_and_bounded(a, b):
    assert residual(a, b) == residual(b, a)
    assert 0 <= residual(a, b) < 1
    assert residual(a, a) == 0


def test_rule_of_built_operators_is_additive(params):
    assert build_H(1, 1, 1, params).rule == additive_rule(params)
