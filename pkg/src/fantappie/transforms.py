"""Coefficient-diagonal operators and measure transforms.

Every operator here multiplies the coefficient of ``z^alpha`` by an exact
rational eigenvalue.  Eigenvalues are computed as ``Fraction`` and only meet
floating point when applied to float coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .measures import DiscreteMeasure
from .mindex import MultiIndex, binom, degree, enumerate_upto, factorial, multinomial_weight, rising_product
from .series import TruncatedSeries

__all__ = [
    "DiagonalOperator",
    "PoleError",
    "fantappie_operator",
    "euler_operator",
    "hardy_euler_operator",
    "lambda_operator",
    "gamma_operator",
    "fantappie_series",
    "euler_L",
    "hardy_euler_E",
    "lambda_op",
    "gamma_op",
    "fantappie_measure",
    "herglotz_measure",
    "szego_herglotz_measure",
    "fantappie_measure_series",
    "herglotz_measure_series",
    "szego_herglotz_series",
    "sphere_moment",
    "general_lambda_gamma",
]

POLE_TOL = 1e-14


class PoleError(ZeroDivisionError):
    """An evaluation point hits the singular set ``<z, u> = 1``."""


@dataclass(frozen=True)
class DiagonalOperator:
    """``z^alpha -> eigenvalue(alpha) z^alpha`` on series in ``dim`` variables."""

    dim: int
    rule: Callable[[MultiIndex], Fraction]
    name: str = ""

    def eigenvalue(self, alpha) -> Fraction:
        alpha = tuple(alpha)
        if len(alpha) != self.dim:
            raise ValueError(f"multi-index {alpha} does not have length {self.dim}")
        return self.rule(alpha)

    def __call__(self, f: TruncatedSeries) -> TruncatedSeries:
        if f.dim != self.dim:
            raise ValueError(f"operator on dim {self.dim} applied to series of dim {f.dim}")
        return f.map_coefficients(lambda a, c: c * self.rule(a))

    def __matmul__(self, other: "DiagonalOperator") -> "DiagonalOperator":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return DiagonalOperator(
            self.dim, lambda a: self.rule(a) * other.rule(a), f"{self.name}*{other.name}"
        )

    def inverse(self) -> "DiagonalOperator":
        return DiagonalOperator(self.dim, lambda a: 1 / self.rule(a), f"inv({self.name})")


def fantappie_operator(n: int) -> DiagonalOperator:
    return DiagonalOperator(n, lambda a: Fraction(1, rising_product(degree(a), n)), "F")


def euler_operator(n: int) -> DiagonalOperator:
    return DiagonalOperator(n, lambda a: Fraction(rising_product(degree(a), n)), "L")


def hardy_euler_operator(n: int) -> DiagonalOperator:
    return DiagonalOperator(n, lambda a: Fraction(binom(n + degree(a) - 1, n - 1)), "E")


LAMBDA_CONVENTIONS = ("sphere", "factorial")


def _lambda_rule(n: int, convention: str):
    if convention not in LAMBDA_CONVENTIONS:
        raise ValueError(f"convention must be one of {LAMBDA_CONVENTIONS}")
    scale = math.factorial(n - 1) if convention == "sphere" else 1

    def rule(a):
        d = degree(a)
        if d == 0:
            return Fraction(1)
        return Fraction(scale, 2 * rising_product(d, n - 1))

    return rule


def lambda_operator(n: int, convention: str = "sphere") -> DiagonalOperator:
    """Half Fantappie transform against surface measure, plus half the value at 0.

    ``convention="sphere"`` integrates against the probability measure on the
    sphere: ``z^a -> (n-1)! / (2 (|a|+1)...(|a|+n-1)) z^a`` for ``a != 0``,
    ``1 -> 1``.  ``convention="factorial"`` drops the ``(n-1)!`` factor.  The
    two agree for ``n <= 2``.
    """
    return DiagonalOperator(n, _lambda_rule(n, convention), "Lambda")


def gamma_operator(n: int, convention: str = "sphere") -> DiagonalOperator:
    """Inverse of :func:`lambda_operator`: ``p -> 2 c E[p - p(0)] + p(0)``.

    ``c = 1`` under the sphere convention and ``c = (n-1)!`` under the
    factorial one, where ``E`` is :func:`hardy_euler_operator`.
    """
    lam = _lambda_rule(n, convention)
    return DiagonalOperator(n, lambda a: 1 / lam(a), "Gamma")


def fantappie_series(f: TruncatedSeries) -> TruncatedSeries:
    return fantappie_operator(f.dim)(f)


def euler_L(f: TruncatedSeries) -> TruncatedSeries:
    return euler_operator(f.dim)(f)


def hardy_euler_E(f: TruncatedSeries) -> TruncatedSeries:
    return hardy_euler_operator(f.dim)(f)


def lambda_op(f: TruncatedSeries, convention: str = "sphere") -> TruncatedSeries:
    return lambda_operator(f.dim, convention)(f)


def gamma_op(f: TruncatedSeries, convention: str = "sphere") -> TruncatedSeries:
    return gamma_operator(f.dim, convention)(f)


# measure transforms


def _pairings(mu: DiscreteMeasure, z) -> tuple[np.ndarray, bool]:
    pts = np.asarray(z, dtype=complex)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != mu.dim:
        raise ValueError("point dimension does not match measure")
    # <z, u> = sum_i z_i conj(u_i); rows index points, columns atoms
    x = pts @ mu.points.conj().T
    if np.any(np.abs(1 - x) <= POLE_TOL):
        raise PoleError("evaluation point on the singular set <z, u> = 1")
    return x, single


def _finish(vals: np.ndarray, single: bool):
    return complex(vals[0]) if single else vals


def fantappie_measure(mu: DiscreteMeasure, z):
    """``sum_k w_k / (1 - <z, u_k>)``."""
    x, single = _pairings(mu, z)
    return _finish((1 / (1 - x)) @ mu.weights, single)


def herglotz_measure(mu: DiscreteMeasure, z):
    """``sum_k w_k (1 + <z, u_k>) / (1 - <z, u_k>)``."""
    x, single = _pairings(mu, z)
    return _finish(((1 + x) / (1 - x)) @ mu.weights, single)


def szego_herglotz_measure(mu: DiscreteMeasure, t: float, z):
    """``sum_k w_k [2 (1 - <z, u_k>)^(-n) - 1] + i t``."""
    x, single = _pairings(mu, z)
    vals = (2 * (1 - x) ** (-mu.dim) - 1) @ mu.weights + 1j * t
    return _finish(np.atleast_1d(vals), single)


def _conj_moments(mu: DiscreteMeasure, D: int) -> dict[MultiIndex, complex]:
    """``sum_k w_k conj(u_k)^alpha`` for all ``|alpha| <= D``."""
    out = {}
    pc = mu.points.conj()
    for a in enumerate_upto(mu.dim, D):
        out[a] = complex(np.dot(mu.weights, np.prod(pc ** np.asarray(a), axis=1))) if len(mu) else 0j
    return out


def fantappie_measure_series(mu: DiscreteMeasure, D: int) -> TruncatedSeries:
    """Taylor coefficients ``(|a|!/a!) sum_k w_k conj(u_k)^a`` up to degree D."""
    m = _conj_moments(mu, D)
    return TruncatedSeries(
        mu.dim, D, {a: multinomial_weight(a) * v for a, v in m.items()}, is_truncation=True
    )


def herglotz_measure_series(mu: DiscreteMeasure, D: int) -> TruncatedSeries:
    """Truncated Taylor series of the Herglotz transform: ``2 F mu - mu(total)``."""
    f = fantappie_measure_series(mu, D) * 2
    return f - complex(mu.total_mass)


def szego_herglotz_series(mu: DiscreteMeasure, t: float, D: int) -> TruncatedSeries:
    """Truncated series of ``sum_k w_k [2 S(z, u_k) - 1] + i t``.

    ``S(z, u) = sum_a ((|a|+n-1)!/(a! (n-1)!)) z^a conj(u)^a``.
    """
    n = mu.dim
    m = _conj_moments(mu, D)
    coeffs = {
        a: 2 * Fraction(math.factorial(degree(a) + n - 1), factorial(a) * math.factorial(n - 1)) * v
        for a, v in m.items()
    }
    zero = (0,) * n
    coeffs[zero] = coeffs[zero] - complex(mu.total_mass) + 1j * t
    return TruncatedSeries(n, D, coeffs, is_truncation=True)


# general circular domains


def sphere_moment(alpha) -> Fraction:
    """``int |u^alpha|^2 dsigma`` for the probability measure on the sphere."""
    n = len(alpha)
    return Fraction(factorial(alpha) * math.factorial(n - 1), math.factorial(degree(alpha) + n - 1))


def general_lambda_gamma(
    moments: Mapping[MultiIndex, Fraction | float], n: int
) -> tuple[DiagonalOperator, DiagonalOperator]:
    """Diagonal Lambda/Gamma pair for a Reinhardt boundary quadrature.

    ``moments[alpha] = int |u^alpha|^2 domega``.  Then
    ``Lambda z^a = (|a|!/a!) M_a / 2 z^a`` for ``a != 0``,
    ``Lambda 1 = (M_0 + 1)/2``, and Gamma is the diagonal inverse.
    """
    table = {}
    for a, m in moments.items():
        a = tuple(a)
        if len(a) != n:
            raise ValueError(f"moment index {a} does not have length {n}")
        if not m > 0:
            raise ValueError(f"moment for {a} must be positive, got {m}")
        table[a] = m

    def lam(a):
        if a not in table:
            raise KeyError(f"no moment supplied for multi-index {a}")
        m = table[a]
        if degree(a) == 0:
            return (m + 1) / 2
        return multinomial_weight(a) * m / 2

    return (
        DiagonalOperator(n, lam, "Lambda_omega"),
        DiagonalOperator(n, lambda a: 1 / lam(a), "Gamma_omega"),
    )
