import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fantappie.mindex import enumerate_upto
from fantappie.series import (
    DegreeOverflowError,
    Space,
    TruncatedSeries,
    UndefinedPairingError,
    cayley,
    evaluate,
    inner_product,
    inverse_cayley,
    monomial_norm_sq,
    multiplier_lower_bound,
    norm,
    optimal_multiplier_lower_bound,
    q_form,
    reciprocal,
)


def rand_series(seed, n, D):
    rng = np.random.default_rng(seed)
    return TruncatedSeries.from_function(lambda a: complex(*rng.standard_normal(2)), n, D)


def brute_eval(f, z):
    return sum(c * math.prod(zi**ai for zi, ai in zip(z, a)) for a, c in f.coeffs.items())


def test_monomial_norms():
    assert monomial_norm_sq(Space.DRURY, (1, 1)) == Fraction(1, 2)
    assert monomial_norm_sq(Space.HARDY, (1, 0)) == Fraction(1, 2)
    assert monomial_norm_sq(Space.BERGMAN, (1, 0)) == Fraction(1, 6)
    assert monomial_norm_sq("bergman", (0, 0)) == Fraction(1, 2)


def test_construction_rejects_bad_keys():
    with pytest.raises(ValueError):
        TruncatedSeries(2, 1, {(2, 0): 1})
    with pytest.raises(ValueError):
        TruncatedSeries(2, 3, {(1,): 1})
    with pytest.raises(ValueError):
        TruncatedSeries(2, -1, {})


def test_product_truncates_at_smaller_cap():
    x = TruncatedSeries.variable(0, 2, 3)
    y = TruncatedSeries.variable(1, 2, 1)
    p = x * y
    assert p.max_degree == 1
    assert p.is_zero()
    assert (x * x)[(2, 0)] == 1


def test_evaluate_matches_direct_sum():
    f = rand_series(1, 3, 6)
    pts = np.random.default_rng(2).standard_normal((7, 3)) * 0.3 + 0j
    vals = evaluate(f, pts)
    for z, v in zip(pts, vals):
        assert abs(v - brute_eval(f, z)) < 1e-12
    assert abs(evaluate(f, pts[0]) - vals[0]) < 1e-14


def test_evaluate_high_degree_sparse_uses_stable_path():
    # (1+q)/(1-q) with q = 2 z1 z2 at high degree: compare with the closed form
    q = TruncatedSeries(2, 2, {(1, 1): 2})
    f = cayley(q.with_max_degree(400))
    z = np.array([[0.5, 0.6j], [0.3 - 0.2j, 0.4]])
    w = 2 * z[:, 0] * z[:, 1]
    assert np.allclose(evaluate(f, z), (1 + w) / (1 - w), atol=1e-10)


def test_reciprocal_exact_and_sparse():
    one_minus = TruncatedSeries(2, 6, {(0, 0): 1, (1, 0): -1})
    g = reciprocal(one_minus)
    assert all(g[(k, 0)] == 1 for k in range(7))
    assert len(g) == 7
    with pytest.raises(ZeroDivisionError):
        reciprocal(TruncatedSeries.variable(0, 2, 3))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(0, 5))
def test_reciprocal_inverts(seed, n, D):
    f = rand_series(seed, n, D) + 3
    prod = f * reciprocal(f)
    assert prod.allclose(TruncatedSeries.constant(1, n, D), atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(0, 5))
def test_cayley_round_trip(seed, n, D):
    q = rand_series(seed, n, D) * 0.1
    assert inverse_cayley(cayley(q)).allclose(q, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_inner_product_hermitian_and_positive(seed, n):
    f, g = rand_series(seed, n, 4), rand_series(seed + 1, n, 4)
    for space in Space:
        assert abs(inner_product(space, f, g) - complex(inner_product(space, g, f)).conjugate()) < 1e-12
        assert float(inner_product(space, f, f).real) > 0


def test_q_form_adds_constant_pairing_and_strict_mode():
    f = TruncatedSeries.constant(2.0, 2, 2)
    g = TruncatedSeries.constant(3.0, 2, 2)
    assert q_form(f, g) == 12.0
    t = f.replace(is_truncation=True)
    assert q_form(t, t) == 8.0
    with pytest.raises(UndefinedPairingError):
        q_form(t, t, strict=True)


def test_multiplier_lower_bound_drury_example():
    for n in range(2, 7):
        q = TruncatedSeries(n, n, {(1,) * n: math.sqrt(n**n)})
        one = TruncatedSeries.constant(1.0, n)
        assert abs(multiplier_lower_bound(q, one) - math.sqrt(n**n / math.factorial(n))) < 1e-12
    q = TruncatedSeries(2, 2, {(1, 1): 2.0})
    assert abs(multiplier_lower_bound(q, TruncatedSeries.constant(1.0, 2)) - math.sqrt(2)) < 1e-15


def test_multiplier_lower_bound_overflow_and_zero():
    q = TruncatedSeries.variable(0, 2, 1)
    h = TruncatedSeries.variable(1, 2, 1)
    with pytest.raises(DegreeOverflowError):
        multiplier_lower_bound(q, h)
    with pytest.raises(ZeroDivisionError):
        multiplier_lower_bound(q, TruncatedSeries.zero(2, 1))


def test_optimal_bound_dominates_constant_test_function():
    q = TruncatedSeries(2, 2, {(1, 1): 2.0})
    assert optimal_multiplier_lower_bound(q, 3) >= math.sqrt(2) - 1e-12
    # a coordinate is a row contraction: its multiplier norm is 1
    assert abs(optimal_multiplier_lower_bound(TruncatedSeries.variable(0, 2), 4) - 1) < 1e-9


def test_norm_of_variable():
    assert norm(Space.DRURY, TruncatedSeries.variable(0, 3)) == 1.0
    assert abs(norm(Space.BERGMAN, TruncatedSeries.variable(0, 2)) - math.sqrt(1 / 6)) < 1e-15


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_unitary_invariance_of_drury_norm_degree_one(seed):
    # linear functions: ||<., v>||_Drury = |v| for every unitary rotation
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    f = TruncatedSeries(3, 1, {a: v[i] for i, a in enumerate(enumerate_upto(3, 1)[1:])})
    assert abs(norm(Space.DRURY, f) - np.linalg.norm(v)) < 1e-12
