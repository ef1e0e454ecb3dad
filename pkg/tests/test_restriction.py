import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fantappie.mindex import enumerate_upto
from fantappie.restriction import (
    ReinhardtDomain,
    ResolutionError,
    bergman_norm_sq_domain,
    gelfand_isometry_check,
    polar_membership,
    polar_of_semi_axes,
    polar_semi_axes,
    quadrature_gram,
    quadrature_moment,
    restriction_eigenvalue,
    spectra_table,
    spectral_data,
    verify_fant_diag,
)
from fantappie.series import TruncatedSeries


def test_closed_form_examples():
    # radius 1 is excluded from domains, so check the ball value through the scaling law
    half = ReinhardtDomain.scaled_ball(Fraction(1, 2), 2)
    assert bergman_norm_sq_domain(half, (1, 0)) == Fraction(1, 2) ** 6 / 6
    assert bergman_norm_sq_domain(half, (0, 0)) == Fraction(1, 2) ** 4 / 2
    assert restriction_eigenvalue(half, (0, 0)) == Fraction(1, 32)
    assert restriction_eigenvalue(half, (0, 0), "rescaled") == 1


def test_ellipsoid_with_equal_radii_is_the_ball():
    r = Fraction(3, 5)
    for n in (2, 3):
        ball = ReinhardtDomain.scaled_ball(r, n)
        ell = ReinhardtDomain.ellipsoid((r,) * n)
        for a in enumerate_upto(n, 8):
            assert bergman_norm_sq_domain(ball, a) == bergman_norm_sq_domain(ell, a)


@settings(max_examples=20, deadline=None)
@given(st.fractions(Fraction(1, 100), Fraction(99, 100)), st.integers(1, 4), st.integers(0, 10))
def test_eigenvalue_formula_and_monotonicity(r, n, d):
    dom = ReinhardtDomain.scaled_ball(r, n)
    a = (d,) + (0,) * (n - 1)
    lam = restriction_eigenvalue(dom, a)
    assert lam == r ** (2 * d + 2 * n) * Fraction(math.factorial(d), math.factorial(d + n))
    nxt = restriction_eigenvalue(dom, (d + 1,) + (0,) * (n - 1))
    assert 0 < nxt < lam


def test_domain_validation_and_parsing():
    with pytest.raises(ValueError):
        ReinhardtDomain.scaled_ball(1.0, 2)
    with pytest.raises(ValueError):
        ReinhardtDomain.ellipsoid((0.5, 0.0))
    with pytest.raises(ValueError):
        ReinhardtDomain("cube", (0.5,))
    assert ReinhardtDomain.parse("ball:0.5", 3).radii == (0.5, 0.5, 0.5)
    assert ReinhardtDomain.parse("ellipsoid:0.3,0.6", 7).dim == 2
    for bad in ("ball:x", "disc:0.3", "ball:0.2,0.3"):
        with pytest.raises(ValueError):
            ReinhardtDomain.parse(bad, 2)
    with pytest.raises(ValueError):
        restriction_eigenvalue(ReinhardtDomain.scaled_ball(0.5, 2), (1, 0), "other")


def test_polar_set():
    dom = ReinhardtDomain.scaled_ball(0.5, 2)
    assert polar_membership(dom, [1.9, 0])
    assert not polar_membership(dom, [2.1, 0])
    ell = ReinhardtDomain.ellipsoid((0.4, 0.8))
    assert polar_semi_axes(ell) == (2.5, 1.25)
    assert polar_of_semi_axes(polar_semi_axes(ell)) == pytest.approx(ell.radii)
    assert polar_membership(ell, [0, 1.24])
    assert not polar_membership(ell, [1.8, 0.9])
    with pytest.raises(ValueError):
        polar_membership(ell, [1, 2, 3])


def test_quadrature_matches_closed_form_and_orthogonality():
    dom = ReinhardtDomain.ellipsoid((0.3, 0.6, 0.9))
    basis, G = quadrature_gram(dom, 5)
    diag = np.array([float(bergman_norm_sq_domain(dom, a)) for a in basis])
    assert np.allclose(np.diag(G).real, diag, rtol=1e-12, atol=0)
    assert np.abs(G - np.diag(np.diag(G))).max() < 1e-15
    assert abs(quadrature_moment(dom, (1, 2, 0)) - diag[basis.index((1, 2, 0))]) < 1e-15
    assert abs(quadrature_moment(dom, (1, 0, 0), (0, 1, 0))) < 1e-17


def test_quadrature_resolution_error():
    dom = ReinhardtDomain.scaled_ball(0.5, 2)
    with pytest.raises(ResolutionError):
        quadrature_moment(dom, (4, 0), (0, 0), angular_points=3)


def test_fant_diag_and_spectra_table():
    dom = ReinhardtDomain.scaled_ball(0.9, 3)
    rep = verify_fant_diag(dom, (2, 1, 0), D=6)
    assert rep.passed
    assert rep.relative_deviation <= 1e-8
    rows = spectra_table(dom, 8)
    assert len(rows) == math.comb(11, 3)
    assert max(r[3] for r in rows) <= 1e-8


def test_gelfand_isometry():
    rng = np.random.default_rng(1)
    dom = ReinhardtDomain.ellipsoid((0.4, 0.8))
    f = TruncatedSeries.from_function(lambda a: complex(*rng.standard_normal(2)), 2, 8)
    rep = gelfand_isometry_check(dom, f)
    assert rep.passed and rep.relative_deviation <= 1e-10
    assert gelfand_isometry_check(dom, TruncatedSeries.zero(2, 3)).passed
    with pytest.raises(ValueError):
        gelfand_isometry_check(dom, TruncatedSeries.zero(3, 1))


def test_spectral_data_lookup():
    sd = spectral_data(ReinhardtDomain.scaled_ball(Fraction(1, 2), 2), 3, "rescaled")
    assert sd[(0, 0)] == 1
    assert sd[[1, 0]] == Fraction(1, 12)
