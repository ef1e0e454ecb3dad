"""Spectra of the restriction operator for Reinhardt domains inside the ball.

Volume is normalized so that the unit ball has volume ``1/n!``, which gives
``||z^a||^2 = a!/(|a|+n)!`` on the ball.  On a Reinhardt domain the monomials
are orthogonal in both the Drury space and ``A^2(Omega)``, so the restriction
operator is diagonal with eigenvalues ``lambda_a`` equal to the norm ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .measures import simplex_rule
from .mindex import MultiIndex, as_multi_index, degree, enumerate_upto, factorial, multinomial_weight
from .series import Space, TruncatedSeries, monomial_norm_sq

__all__ = [
    "ReinhardtDomain",
    "SpectralData",
    "ResolutionError",
    "bergman_norm_sq_domain",
    "restriction_eigenvalue",
    "spectral_data",
    "polar_membership",
    "polar_semi_axes",
    "polar_of_semi_axes",
    "FantDiagReport",
    "GelfandReport",
    "quadrature_moment",
    "quadrature_gram",
    "verify_fant_diag",
    "gelfand_isometry_check",
    "spectra_table",
]

Normalization = Literal["raw", "rescaled"]


class ResolutionError(ValueError):
    """The angular grid is too coarse to separate the requested frequencies."""


@dataclass(frozen=True)
class ReinhardtDomain:
    """``scaled_ball``: ``|z| < r``.  ``ellipsoid``: ``sum |z_i|^2 / r_i^2 < 1``."""

    kind: Literal["scaled_ball", "ellipsoid"]
    radii: tuple

    def __post_init__(self):
        if self.kind not in ("scaled_ball", "ellipsoid"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        radii = tuple(self.radii)
        if not radii:
            raise ValueError("domain needs at least one radius")
        if self.kind == "scaled_ball" and len(set(radii)) != 1:
            raise ValueError("a scaled ball has a single radius")
        if any(not 0 < r < 1 for r in radii):
            raise ValueError("radii must lie strictly between 0 and 1")
        object.__setattr__(self, "radii", radii)

    @classmethod
    def scaled_ball(cls, r, n: int) -> "ReinhardtDomain":
        return cls("scaled_ball", (r,) * n)

    @classmethod
    def ellipsoid(cls, radii) -> "ReinhardtDomain":
        return cls("ellipsoid", tuple(radii))

    @classmethod
    def parse(cls, text: str, n: int) -> "ReinhardtDomain":
        """``ball:0.5`` or ``ellipsoid:0.3,0.6``."""
        kind, _, rest = text.partition(":")
        try:
            values = [float(v) for v in rest.split(",")]
        except ValueError as exc:
            raise ValueError(f"cannot parse domain {text!r}") from exc
        if kind == "ball" and len(values) == 1:
            return cls.scaled_ball(values[0], n)
        if kind == "ellipsoid":
            return cls.ellipsoid(values)
        raise ValueError(f"cannot parse domain {text!r}")

    @property
    def dim(self) -> int:
        return len(self.radii)


def _check_index(domain: ReinhardtDomain, alpha) -> MultiIndex:
    return as_multi_index(alpha, domain.dim)


def bergman_norm_sq_domain(domain: ReinhardtDomain, alpha):
    """``prod r_i^(2 a_i + 2) a!/(|a|+n)!``; exact when the radii are ``Fraction``."""
    alpha = _check_index(domain, alpha)
    scale = math.prod(r ** (2 * a + 2) for r, a in zip(domain.radii, alpha))
    return scale * monomial_norm_sq(Space.BERGMAN, alpha)


def restriction_eigenvalue(domain: ReinhardtDomain, alpha, normalization: Normalization = "raw"):
    """``lambda_a = (|a|!/a!) ||z^a||^2_{A^2(Omega)}``; ``rescaled`` divides by ``lambda_0``."""
    alpha = _check_index(domain, alpha)
    lam = multinomial_weight(alpha) * bergman_norm_sq_domain(domain, alpha)
    if normalization == "raw":
        return lam
    if normalization == "rescaled":
        return lam / bergman_norm_sq_domain(domain, (0,) * domain.dim)
    raise ValueError("normalization must be 'raw' or 'rescaled'")


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: dict
    normalization: Normalization

    def __getitem__(self, alpha):
        return self.eigenvalues[tuple(alpha)]


def spectral_data(domain: ReinhardtDomain, D: int, normalization: Normalization = "raw") -> SpectralData:
    return SpectralData(
        {a: restriction_eigenvalue(domain, a, normalization) for a in enumerate_upto(domain.dim, D)},
        normalization,
    )


# polar set


def polar_semi_axes(domain: ReinhardtDomain) -> tuple:
    """Semi-axes of the closed polar ``{sum r_i^2 |z_i|^2 <= 1}``, namely ``1/r_i``.

    The polar of an ellipsoid with semi-axes ``a_i`` is the ellipsoid with
    semi-axes ``1/a_i`` (Cauchy-Schwarz), so applying the map twice is the
    identity.
    """
    return tuple(1 / r for r in domain.radii)


def polar_of_semi_axes(axes) -> tuple:
    return tuple(1 / a for a in axes)


def polar_membership(domain: ReinhardtDomain, z) -> bool:
    z = np.asarray(z, dtype=complex)
    if z.shape != (domain.dim,):
        raise ValueError("point dimension mismatch")
    r = np.asarray([float(x) for x in domain.radii])
    return bool(np.sum(r**2 * np.abs(z) ** 2) <= 1)


# quadrature oracle


def _angular_factor(diff: np.ndarray, M: int) -> float:
    """Equispaced M-point average of ``e^{i k theta}`` per coordinate, multiplied."""
    theta = 2 * np.pi * np.arange(M) / M
    vals = [np.mean(np.exp(1j * k * theta)) for k in diff]
    return complex(np.prod(vals))


def _radial_integral(domain: ReinhardtDomain, powers: np.ndarray, deg: int) -> float:
    """``int_{solid simplex} prod s_j^(powers_j) ds`` by the collapsed Gauss rule."""
    nodes, weights = simplex_rule(domain.dim, deg)
    return float(np.dot(weights, np.prod(nodes**powers, axis=1)))


def quadrature_moment(domain: ReinhardtDomain, alpha, beta=None, angular_points: int | None = None):
    """``int_Omega z^a conj(z)^b dV`` by radial Gauss times angular trapezoid.

    With ``z_j = r_j sqrt(s_j) e^{i theta_j}`` the normalized volume becomes
    ``prod r_j^2 ds dtheta/(2 pi)^n`` over the solid simplex in ``s``.
    """
    alpha = _check_index(domain, alpha)
    beta = alpha if beta is None else _check_index(domain, beta)
    a, b = np.asarray(alpha), np.asarray(beta)
    D = max(degree(alpha), degree(beta))
    M = 2 * D + 1 if angular_points is None else angular_points
    diff = a - b
    if np.max(np.abs(diff), initial=0) >= M:
        raise ResolutionError(f"{M} angular points cannot resolve frequency {np.abs(diff).max()}")
    ang = _angular_factor(diff, M)
    radii = np.asarray([float(r) for r in domain.radii])
    scale = float(np.prod(radii ** (a + b + 2)))
    radial = _radial_integral(domain, (a + b) / 2, D)
    return ang * scale * radial


def quadrature_gram(domain: ReinhardtDomain, D: int) -> tuple[list[MultiIndex], np.ndarray]:
    """``G[i, j] = int_Omega z^(a_i) conj(z)^(a_j) dV`` for all ``|a| <= D`` at once.

    Same rule as :func:`quadrature_moment`: the angular factor is a product of
    one-dimensional trapezoid averages over ``2D + 1`` points and the radial
    factor is ``Phi^T diag(w) Phi`` with ``Phi[k, a] = prod s_kj^(a_j / 2)``.
    """
    basis = enumerate_upto(domain.dim, D)
    E = np.array(basis)
    M = 2 * D + 1
    theta = 2 * np.pi * np.arange(M) / M
    freqs = np.arange(-D, D + 1)
    table = np.exp(1j * freqs[:, None] * theta[None, :]).mean(axis=1)
    diff = E[:, None, :] - E[None, :, :]
    ang = np.prod(table[diff + D], axis=2)
    nodes, weights = simplex_rule(domain.dim, D)
    phi = np.prod(nodes[:, None, :] ** (E[None, :, :] / 2), axis=2)
    radial = phi.T @ (weights[:, None] * phi)
    radii = np.asarray([float(r) for r in domain.radii])
    rpow = np.prod(radii[None, :] ** E, axis=1)
    scale = np.outer(rpow, rpow) * np.prod(radii**2)
    return basis, ang * radial * scale


@dataclass
class FantDiagReport:
    alpha: MultiIndex
    closed_form: float
    quadrature: float
    relative_deviation: float
    max_off_diagonal: float
    passed: bool


def verify_fant_diag(
    domain: ReinhardtDomain, alpha, D: int | None = None, tol: float = 1e-8, off_tol: float = 1e-10
) -> FantDiagReport:
    """Compare the ``z^b`` coefficients of ``F(z^a dV|_Omega)`` with ``lambda_a delta_ab``.

    The coefficient of ``z^b`` is ``(|b|!/b!) int w^a conj(w)^b dV``; every
    ``|b| <= D`` is computed on a common angular grid.
    """
    alpha = _check_index(domain, alpha)
    D = max(degree(alpha), degree(alpha) if D is None else D)
    basis, G = quadrature_gram(domain, D)
    i = basis.index(alpha)
    mult = np.array([multinomial_weight(b) for b in basis], dtype=float)
    row = mult * G[i]
    closed = float(restriction_eigenvalue(domain, alpha))
    diag = row[i].real
    off = float(np.abs(np.delete(row, i)).max(initial=0.0))
    dev = abs(diag - closed) / closed
    return FantDiagReport(alpha, closed, diag, dev, off, dev <= tol and off <= off_tol)


@dataclass
class GelfandReport:
    bergman_norm: float
    polar_norm: float
    relative_deviation: float
    passed: bool


def gelfand_isometry_check(domain: ReinhardtDomain, f: TruncatedSeries, tol: float = 1e-10) -> GelfandReport:
    """``||F f||_{H(Omega polar)} = ||f||_{A^2(Omega)}``.

    The left side uses ``||z^a||^2_{H(Omega polar)} = ||z^a||^2_H / lambda_a``
    with ``F z^a = lambda_a z^a``; the right side is an independent quadrature
    Gram form including the (vanishing) off-diagonal terms.
    """
    if f.dim != domain.dim:
        raise ValueError("series and domain dimensions differ")
    items = [(a, complex(c)) for a, c in f.coeffs.items() if c != 0]
    if not items:
        return GelfandReport(0.0, 0.0, 0.0, True)
    D = max(degree(a) for a, _ in items)
    basis, G = quadrature_gram(domain, D)
    pos = {a: i for i, a in enumerate(basis)}
    c = np.zeros(len(basis), dtype=complex)
    for a, ca in items:
        c[pos[a]] = ca
    bergman = math.sqrt(max((c @ G @ c.conj()).real, 0.0))
    polar_sq = 0.0
    for a, ca in items:
        lam = float(restriction_eigenvalue(domain, a))
        polar_sq += abs(lam * ca) ** 2 * float(monomial_norm_sq(Space.DRURY, a)) / lam
    polar = math.sqrt(polar_sq)
    dev = abs(polar - bergman) / max(bergman, 1e-300)
    return GelfandReport(bergman, polar, dev, dev <= tol)


def spectra_table(domain: ReinhardtDomain, D: int) -> list[tuple]:
    """Rows ``(alpha, lambda closed form, lambda by quadrature, relative error)``."""
    basis, G = quadrature_gram(domain, D)
    rows = []
    for i, a in enumerate(basis):
        closed = float(restriction_eigenvalue(domain, a))
        quad = multinomial_weight(a) * G[i, i].real
        rows.append((a, closed, quad, abs(quad - closed) / closed))
    return rows
