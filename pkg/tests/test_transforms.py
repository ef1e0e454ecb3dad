import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fantappie.measures import DiscreteMeasure, random_ball_points, random_sphere_measure
from fantappie.mindex import enumerate_upto
from fantappie.series import TruncatedSeries, evaluate
from fantappie.transforms import (
    PoleError,
    euler_L,
    fantappie_measure,
    fantappie_measure_series,
    fantappie_series,
    gamma_op,
    gamma_operator,
    general_lambda_gamma,
    hardy_euler_E,
    herglotz_measure,
    herglotz_measure_series,
    lambda_op,
    lambda_operator,
    sphere_moment,
    szego_herglotz_measure,
    szego_herglotz_series,
)

z1 = TruncatedSeries.variable(0, 2)


def mono(alpha, c=1):
    return TruncatedSeries.monomial(alpha, Fraction(c))


@pytest.mark.parametrize(
    "op, f, expected",
    [
        (fantappie_series, z1, mono((1, 0), Fraction(1, 6))),
        (fantappie_series, TruncatedSeries.constant(1, 2), TruncatedSeries.constant(Fraction(1, 2), 2)),
        (fantappie_series, mono((4,)), mono((4,), Fraction(1, 5))),
        (euler_L, z1, mono((1, 0), 6)),
        (hardy_euler_E, mono((1, 1)), mono((1, 1), 3)),
        (hardy_euler_E, mono((3,)), mono((3,))),
        (hardy_euler_E, TruncatedSeries.constant(5, 3), TruncatedSeries.constant(5, 3)),
        (lambda_op, z1, mono((1, 0), Fraction(1, 4))),
        (lambda_op, TruncatedSeries.constant(1, 2), TruncatedSeries.constant(1, 2)),
        (lambda_op, mono((3,)), mono((3,), Fraction(1, 2))),
        (gamma_op, z1, mono((1, 0), 4)),
        (gamma_op, mono((2, 2)), mono((2, 2), 10)),
        (gamma_op, TruncatedSeries.constant(1, 4), TruncatedSeries.constant(1, 4)),
    ],
)
def test_documented_examples(op, f, expected):
    assert op(f).max_abs_difference(expected) == 0


def test_zero_maps_to_zero():
    for n in (1, 2, 3):
        assert euler_L(TruncatedSeries.zero(n, 4)).is_zero()


def test_conventions_agree_up_to_two_variables_and_split_after():
    for n in (1, 2):
        for a in enumerate_upto(n, 6):
            assert lambda_operator(n).eigenvalue(a) == lambda_operator(n, "factorial").eigenvalue(a)
    a = (1, 0, 0)
    assert lambda_operator(3).eigenvalue(a) == Fraction(1, 6)
    assert lambda_operator(3, "factorial").eigenvalue(a) == Fraction(1, 12)
    assert gamma_operator(3, "factorial").eigenvalue(a) == 12
    with pytest.raises(ValueError):
        lambda_operator(2, "other")


def test_gamma_on_homogeneous_parts():
    # sphere convention: degree-d part scaled by 2 (d+1)...(d+n-1)/(n-1)!
    for n in (2, 3, 4):
        for d in range(1, 6):
            a = (d,) + (0,) * (n - 1)
            expected = Fraction(2 * math.prod(range(d + 1, d + n)), math.factorial(n - 1))
            assert gamma_operator(n).eigenvalue(a) == expected


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4))
def test_inverse_pairs_on_random_series(seed, n):
    rng = np.random.default_rng(seed)
    f = TruncatedSeries.from_function(lambda a: Fraction(int(rng.integers(-9, 10)), 7), n, 5)
    assert euler_L(fantappie_series(f)).max_abs_difference(f) == 0
    assert gamma_op(lambda_op(f)).max_abs_difference(f) == 0


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        lambda_operator(3)(z1)
    with pytest.raises(ValueError):
        lambda_operator(2).eigenvalue((1, 0, 0))


def test_measure_transforms_closed_forms():
    e1 = DiscreteMeasure.point_mass([1, 0])
    z = np.array([0.3 + 0.1j, -0.2j])
    assert abs(fantappie_measure(e1, z) - 1 / (1 - z[0])) < 1e-15
    assert abs(herglotz_measure(e1, z) - (1 + z[0]) / (1 - z[0])) < 1e-15
    assert abs(szego_herglotz_measure(e1, 0.5, z) - (2 / (1 - z[0]) ** 2 - 1 + 0.5j)) < 1e-14
    assert fantappie_measure(DiscreteMeasure.zero(2), z) == 0
    with pytest.raises(PoleError):
        fantappie_measure(e1, np.array([1.0, 0.0]))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 3))
def test_measure_series_converge_to_closed_forms(seed, n):
    rng = np.random.default_rng(seed)
    mu = random_sphere_measure(rng, n, 5)
    pts = random_ball_points(rng, 10, n, 0.3)
    D = 30
    assert np.allclose(evaluate(fantappie_measure_series(mu, D), pts), fantappie_measure(mu, pts), atol=1e-12)
    assert np.allclose(evaluate(herglotz_measure_series(mu, D), pts), herglotz_measure(mu, pts), atol=1e-12)
    assert np.allclose(evaluate(szego_herglotz_series(mu, 0.3, D), pts),
                       szego_herglotz_measure(mu, 0.3, pts), atol=1e-10)


def test_sphere_moment_values():
    assert sphere_moment((1, 0)) == Fraction(1, 2)
    assert sphere_moment((1, 1)) == Fraction(1, 6)
    assert sphere_moment((0, 0, 0)) == 1


def test_general_lambda_gamma_errors():
    with pytest.raises(ValueError):
        general_lambda_gamma({(1, 0): 0}, 2)
    with pytest.raises(ValueError):
        general_lambda_gamma({(1, 0, 0): 1}, 2)
    lam, _ = general_lambda_gamma({(0, 0): 1}, 2)
    with pytest.raises(KeyError):
        lam.eigenvalue((1, 0))
