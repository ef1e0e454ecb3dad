import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fantappie.measures import (
    DiscreteMeasure,
    OffSphereError,
    quasi_random_ball_points,
    quasi_random_sphere_points,
    random_ball_points,
    simplex_rule,
    sphere_quadrature,
)
from fantappie.mindex import enumerate_upto, factorial
from fantappie.transforms import sphere_moment


def test_simplex_rule_volume_and_monomials():
    for dim in (1, 2, 3):
        nodes, w = simplex_rule(dim, 6)
        assert abs(w.sum() - 1 / math.factorial(dim)) < 1e-15
        assert np.all(w > 0)
        for a in enumerate_upto(dim, 6):
            exact = factorial(a) / math.factorial(sum(a) + dim)
            assert abs(np.dot(w, np.prod(nodes ** np.array(a), axis=1)) - exact) < 1e-15


@pytest.mark.parametrize("n, D", [(2, 3), (2, 6), (3, 4)])
def test_sphere_quadrature_moments(n, D):
    mu = sphere_quadrature(n, D)
    assert mu.on_sphere(1e-12)
    assert abs(mu.total_mass - 1) < 1e-13
    for a in enumerate_upto(n, D + 1):
        for b in enumerate_upto(n, D + 1):
            if sum(a) + sum(b) > 2 * D + 2:
                continue
            exact = float(sphere_moment(a)) if a == b else 0.0
            assert abs(mu.moment(a, b) - exact) < 1e-13


def test_sphere_quadrature_range():
    with pytest.raises(ValueError):
        sphere_quadrature(4, 2)
    with pytest.raises(ValueError):
        sphere_quadrature(2, 13)


def test_measure_validation():
    with pytest.raises(ValueError):
        DiscreteMeasure(np.ones((2, 2)), np.ones(3))
    with pytest.raises(ValueError):
        DiscreteMeasure(np.ones((1, 2)), np.array([1j]))
    m = DiscreteMeasure(np.ones((1, 2)), np.array([1j]), allow_complex=True)
    assert not m.is_positive()
    with pytest.raises(OffSphereError):
        DiscreteMeasure.point_mass([0.5, 0]).require_sphere()
    z = DiscreteMeasure.zero(3)
    assert len(z) == 0 and z.dim == 3 and z.total_mass == 0


def test_measure_addition_and_scaling():
    a = DiscreteMeasure.point_mass([1, 0], 2.0)
    b = DiscreteMeasure.point_mass([0, 1], 1.0)
    s = (a + b).scaled(0.5)
    assert len(s) == 2
    assert s.total_mass == 1.5


def test_quasi_random_points_deterministic_and_inside():
    p = quasi_random_ball_points(1000, 3, 7)
    assert np.array_equal(p, quasi_random_ball_points(1000, 3, 7))
    assert np.all(np.linalg.norm(p, axis=1) < 1)
    s = quasi_random_sphere_points(100, 2)
    assert np.allclose(np.linalg.norm(s, axis=1), 1)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4), st.floats(0.1, 1.0))
def test_random_ball_points_radius(seed, n, r):
    pts = random_ball_points(np.random.default_rng(seed), 50, n, r)
    assert pts.shape == (50, n)
    assert np.all(np.linalg.norm(pts, axis=1) <= r + 1e-12)
