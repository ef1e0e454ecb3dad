"""Truncated holomorphic power series on the unit ball of C^n.

Coefficients are stored sparsely in a dict keyed by multi-index.  Values may be
any number type: complex floats for numerical work, ``Fraction`` when an exact
check is wanted.  All products truncate at the smaller of the two degree caps.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Number
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .mindex import (
    MultiIndex,
    as_multi_index,
    canonical_key,
    degree,
    enumerate_upto,
    factorial,
    multinomial_weight,
    unit,
)

__all__ = [
    "Space",
    "TruncatedSeries",
    "DegreeOverflowError",
    "UndefinedPairingError",
    "monomial_norm_sq",
    "inner_product",
    "norm",
    "q_form",
    "evaluate",
    "reciprocal",
    "cayley",
    "inverse_cayley",
    "multiplier_lower_bound",
    "best_multiplier_lower_bound",
    "optimal_multiplier_lower_bound",
]


class DegreeOverflowError(ValueError):
    """A product would need terms above the available degree cap."""


class UndefinedPairingError(ValueError):
    """The Q-pairing of two truncations is not determined by the stored terms."""


class Space(enum.Enum):
    DRURY = "drury"
    HARDY = "hardy"
    BERGMAN = "bergman"


def monomial_norm_sq(space: Space | str, alpha: Sequence[int]) -> Fraction:
    """Squared norm of ``z^alpha`` in the Drury, Hardy or Bergman space.

    ``alpha!/|alpha|!``, ``alpha!/(|alpha|+n-1)!`` and ``alpha!/(|alpha|+n)!``
    respectively, with ``n = len(alpha)``.
    """
    space = Space(space)
    n, d = len(alpha), degree(alpha)
    shift = {Space.DRURY: 0, Space.HARDY: n - 1, Space.BERGMAN: n}[space]
    return Fraction(factorial(alpha), math.factorial(d + shift))


def _is_zero(c) -> bool:
    return c == 0


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """A polynomial in ``dim`` variables of degree at most ``max_degree``.

    ``is_truncation`` marks a series that stands in for an infinite one (for
    instance a Herglotz transform cut at ``max_degree``); pairings that need
    the tail can refuse such inputs.
    """

    dim: int
    max_degree: int
    coeffs: Mapping[MultiIndex, Number] = field(default_factory=dict)
    is_truncation: bool = False

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.max_degree < 0:
            raise ValueError("max_degree must be >= 0")
        clean = {}
        for key, value in self.coeffs.items():
            alpha = as_multi_index(key, self.dim)
            if degree(alpha) > self.max_degree:
                raise ValueError(
                    f"coefficient {alpha} exceeds max_degree {self.max_degree}"
                )
            clean[alpha] = value
        ordered = dict(sorted(clean.items(), key=lambda kv: canonical_key(kv[0])))
        object.__setattr__(self, "coeffs", MappingProxyType(ordered))

    # constructors

    @classmethod
    def _trusted(cls, dim: int, max_degree: int, coeffs: dict, is_truncation: bool = False):
        """Skip key validation for coefficients produced by series arithmetic."""
        obj = object.__new__(cls)
        ordered = dict(sorted(coeffs.items(), key=lambda kv: canonical_key(kv[0])))
        object.__setattr__(obj, "dim", dim)
        object.__setattr__(obj, "max_degree", max_degree)
        object.__setattr__(obj, "coeffs", MappingProxyType(ordered))
        object.__setattr__(obj, "is_truncation", is_truncation)
        return obj

    @classmethod
    def zero(cls, dim: int, max_degree: int) -> "TruncatedSeries":
        return cls(dim, max_degree, {})

    @classmethod
    def constant(cls, value, dim: int, max_degree: int = 0) -> "TruncatedSeries":
        return cls(dim, max_degree, {(0,) * dim: value})

    @classmethod
    def monomial(cls, alpha, coeff=1, max_degree: int | None = None) -> "TruncatedSeries":
        alpha = as_multi_index(alpha)
        cap = degree(alpha) if max_degree is None else max_degree
        return cls(len(alpha), cap, {alpha: coeff})

    @classmethod
    def variable(cls, i: int, dim: int, max_degree: int = 1) -> "TruncatedSeries":
        return cls(dim, max_degree, {unit(dim, i): 1})

    @classmethod
    def from_function(cls, fn, dim: int, max_degree: int, **kw) -> "TruncatedSeries":
        """Build a series from ``fn(alpha) -> coefficient`` over all ``|alpha| <= D``."""
        return cls(dim, max_degree, {a: fn(a) for a in enumerate_upto(dim, max_degree)}, **kw)

    # basic access

    def __getitem__(self, alpha) -> Number:
        return self.coeffs.get(tuple(alpha), 0)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs.items())

    def __repr__(self) -> str:
        terms = ", ".join(f"{a}: {c}" for a, c in self.coeffs.items())
        return f"TruncatedSeries(dim={self.dim}, max_degree={self.max_degree}, {{{terms}}})"

    @property
    def constant_term(self) -> Number:
        return self[(0,) * self.dim]

    @property
    def degree(self) -> int:
        """Largest degree of a non-zero stored coefficient (-1 for the zero series)."""
        nz = [degree(a) for a, c in self.coeffs.items() if not _is_zero(c)]
        return max(nz, default=-1)

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.coeffs.values())

    def replace(self, coeffs=None, max_degree=None, is_truncation=None) -> "TruncatedSeries":
        return TruncatedSeries(
            self.dim,
            self.max_degree if max_degree is None else max_degree,
            dict(self.coeffs) if coeffs is None else coeffs,
            self.is_truncation if is_truncation is None else is_truncation,
        )

    def canonical(self, tol: float = 1e-30) -> "TruncatedSeries":
        """Drop coefficients with modulus below ``tol``."""
        return self._trusted(
            self.dim, self.max_degree, {a: c for a, c in self.coeffs.items() if abs(c) >= tol}, self.is_truncation
        )

    def truncate(self, D: int) -> "TruncatedSeries":
        if D < 0:
            raise ValueError("max_degree must be >= 0")
        return self._trusted(
            self.dim, D, {a: c for a, c in self.coeffs.items() if degree(a) <= D}, self.is_truncation
        )

    def with_max_degree(self, D: int) -> "TruncatedSeries":
        """Raise (or lower, dropping terms) the degree cap."""
        return self.truncate(D)

    def homogeneous_part(self, d: int) -> "TruncatedSeries":
        return self._trusted(
            self.dim, self.max_degree, {a: c for a, c in self.coeffs.items() if degree(a) == d}, self.is_truncation
        )

    def map_coefficients(self, fn) -> "TruncatedSeries":
        """Apply ``fn(alpha, coeff)`` to every stored coefficient."""
        return self._trusted(
            self.dim, self.max_degree, {a: fn(a, c) for a, c in self.coeffs.items()}, self.is_truncation
        )

    def conj_coefficients(self) -> "TruncatedSeries":
        return self.map_coefficients(lambda a, c: c.conjugate())

    def allclose(self, other: "TruncatedSeries", atol: float = 1e-12) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self[k] - other[k]) <= atol for k in keys)

    def max_abs_difference(self, other: "TruncatedSeries") -> float:
        keys = set(self.coeffs) | set(other.coeffs)
        return max((float(abs(self[k] - other[k])) for k in keys), default=0.0)

    # arithmetic

    def _check_dim(self, other: "TruncatedSeries"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            self._check_dim(other)
            return other
        if isinstance(other, Number):
            return TruncatedSeries.constant(other, self.dim, self.max_degree)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, 0) + c
        return self._trusted(
            self.dim,
            max(self.max_degree, other.max_degree),
            out,
            self.is_truncation or other.is_truncation,
        )

    __radd__ = __add__

    def __neg__(self):
        return self.map_coefficients(lambda a, c: -c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return self.map_coefficients(lambda a, c: c * other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._check_dim(other)
        cap = min(self.max_degree, other.max_degree)
        out: dict[MultiIndex, Number] = {}
        for a, ca in self.coeffs.items():
            da = degree(a)
            if da > cap:
                continue
            for b, cb in other.coeffs.items():
                if da + degree(b) > cap:
                    continue
                key = tuple(x + y for x, y in zip(a, b))
                out[key] = out.get(key, 0) + ca * cb
        return self._trusted(self.dim, cap, out, self.is_truncation or other.is_truncation)

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Number):
            return self.map_coefficients(lambda a, c: c / other)
        return self * reciprocal(other)

    # evaluation

    @cached_property
    def _packed(self):
        """Exponent array and complex values (``None`` if some value overflows)."""
        items = [(a, c) for a, c in self.coeffs.items() if not _is_zero(c)]
        exps = np.array([a for a, _ in items], dtype=np.int64).reshape(len(items), self.dim)
        try:
            vals = np.array([complex(c) for _, c in items], dtype=complex)
            if not np.all(np.isfinite(vals)):
                vals = None
        except OverflowError:
            vals = None
        return exps, vals

    @cached_property
    def _log_coeffs(self) -> np.ndarray:
        return np.array(
            [_log_coeff(c) for c in self.coeffs.values() if not _is_zero(c)], dtype=complex
        )

    def __call__(self, z):
        return evaluate(self, z)


def _log_coeff(c) -> complex:
    """Principal log of a coefficient; exact ints and Fractions may exceed float range."""
    if isinstance(c, (int, Fraction)):
        c = Fraction(c)
        mag = math.log(abs(c.numerator)) - math.log(c.denominator)
        return complex(mag, 0.0 if c > 0 else math.pi)
    return complex(np.log(complex(c)))


def _gathered_values(pts: np.ndarray, exps: np.ndarray, vals: np.ndarray) -> np.ndarray:
    top = int(exps.max())
    mon = np.ones((pts.shape[0], exps.shape[0]), dtype=complex)
    for j in range(pts.shape[1]):
        powers = pts[:, j, None] ** np.arange(top + 1)
        mon *= powers[:, exps[:, j]]
    return mon @ vals


def _dense_values(pts: np.ndarray, tensor: np.ndarray) -> np.ndarray:
    """Contract a dense coefficient tensor against per-coordinate power tables."""
    m = pts.shape[0]
    tops = tensor.shape
    out = (pts[:, 0, None] ** np.arange(tops[0])) @ tensor.reshape(tops[0], -1)
    for j in range(1, len(tops)):
        out = out.reshape(m, tops[j], -1)
        out = np.einsum("mkr,mk->mr", out, pts[:, j, None] ** np.arange(tops[j]))
    return out[:, 0]


def _log_values(pts: np.ndarray, exps: np.ndarray, logs: np.ndarray) -> np.ndarray:
    """``sum exp(log c + alpha . log z)``: no power tables, no coefficient overflow."""
    zero = pts == 0
    log_z = np.log(np.where(zero, 1, pts))
    terms = np.exp(log_z @ exps.T.astype(float) + logs[None, :])
    hits = zero.astype(float) @ (exps.T > 0).astype(float)
    terms[hits > 0] = 0
    return terms.sum(axis=1)


def evaluate(f: TruncatedSeries, z) -> complex | np.ndarray:
    """``sum_alpha f_alpha z^alpha`` at one point (shape ``(n,)``) or many (``(m, n)``)."""
    pts = np.asarray(z, dtype=complex)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != f.dim:
        raise ValueError(f"point dimension {pts.shape[1]} does not match series dim {f.dim}")
    exps, vals = f._packed
    out = np.zeros(pts.shape[0], dtype=complex)
    if not len(exps):
        return 0j if single else out
    tops = tuple(int(t) + 1 for t in exps.max(axis=0))
    box = math.prod(tops)
    if vals is not None and max(tops) <= 129 and box <= max(4 * len(vals), 4096):
        tensor = np.zeros(tops, dtype=complex)
        tensor[tuple(exps.T)] = vals
        chunk = max(1, 4_000_000 // max(1, box // tops[0]))
        fn = lambda block: _dense_values(block, tensor)
    elif vals is not None and max(tops) <= 129:
        chunk = max(1, 2_000_000 // len(vals))
        fn = lambda block: _gathered_values(block, exps, vals)
    else:
        logs = f._log_coeffs
        chunk = max(1, 2_000_000 // len(logs))
        fn = lambda block: _log_values(block, exps, logs)
    for start in range(0, pts.shape[0], chunk):
        out[start : start + chunk] = fn(pts[start : start + chunk])
    return complex(out[0]) if single else out


def inner_product(space: Space | str, f: TruncatedSeries, g: TruncatedSeries):
    """Coefficientwise pairing ``sum f_a conj(g_a) ||z^a||^2``."""
    f._check_dim(g)
    total = 0
    for a, ca in f.coeffs.items():
        cb = g.coeffs.get(a)
        if cb is None:
            continue
        w = monomial_norm_sq(space, a)
        total += ca * _conj(cb) * w
    return total


def _conj(c):
    return c.conjugate() if hasattr(c, "conjugate") else c


def norm(space: Space | str, f: TruncatedSeries) -> float:
    return math.sqrt(float(abs(inner_product(space, f, f))))


def q_form(f: TruncatedSeries, g: TruncatedSeries, *, strict: bool = False):
    """``sum f_a conj(g_a) a!/|a|! + conj(f(0)) g(0)``.

    With ``strict=True`` the pairing of two truncations raises
    :class:`UndefinedPairingError`: neither side then determines the tail.
    """
    f._check_dim(g)
    if strict and f.is_truncation and g.is_truncation:
        raise UndefinedPairingError("Q(f, g) undefined: both arguments are truncations")
    return inner_product(Space.DRURY, f, g) + _conj(f.constant_term) * g.constant_term


def reciprocal(f: TruncatedSeries) -> TruncatedSeries:
    """``1/f`` truncated at ``f.max_degree``.

    Solves ``f g = 1`` coefficient by coefficient:
    ``g_a = -(1/f_0) sum_{0 < b <= a} f_b g_{a-b}``.  Only exponents reachable
    as sums of exponents of ``f - f(0)`` are visited, so a sparse ``f`` stays
    cheap at high degree.
    """
    c = f.constant_term
    if c == 0:
        raise ZeroDivisionError("reciprocal needs a non-zero constant term")
    D = f.max_degree
    zero = (0,) * f.dim
    tail = [(a, v) for a, v in f.coeffs.items() if any(a) and not _is_zero(v)]
    support = {zero}
    frontier = [zero]
    while frontier:
        fresh = []
        for a in frontier:
            for b, _ in tail:
                s = tuple(x + y for x, y in zip(a, b))
                if degree(s) <= D and s not in support:
                    support.add(s)
                    fresh.append(s)
        frontier = fresh
    inv_c = Fraction(1) / c if isinstance(c, (int, Fraction)) else 1 / c
    g = {zero: inv_c}
    for a in sorted(support, key=canonical_key)[1:]:
        acc = 0
        for b, v in tail:
            r = tuple(x - y for x, y in zip(a, b))
            if min(r) >= 0 and r in g:
                acc += v * g[r]
        g[a] = -acc * inv_c
    return TruncatedSeries._trusted(f.dim, D, g, f.is_truncation)


def cayley(q: TruncatedSeries) -> TruncatedSeries:
    """``(1 + q)/(1 - q)`` truncated at ``q.max_degree``."""
    if q.constant_term == 1:
        raise ZeroDivisionError("cayley transform undefined when q(0) = 1")
    one = TruncatedSeries.constant(1, q.dim, q.max_degree)
    return (one + q) * reciprocal(one - q)


def inverse_cayley(p: TruncatedSeries) -> TruncatedSeries:
    """``(p - 1)/(p + 1)``, the inverse of :func:`cayley`."""
    if p.constant_term == -1:
        raise ZeroDivisionError("inverse cayley undefined when p(0) = -1")
    one = TruncatedSeries.constant(1, p.dim, p.max_degree)
    return (p - one) * reciprocal(p + one)


def multiplier_lower_bound(q: TruncatedSeries, h: TruncatedSeries) -> float:
    """``||q h||_H / ||h||_H``, a lower bound for the Drury multiplier norm of q.

    The product must be exact: ``deg q + deg h`` may not exceed the larger of
    the two caps.
    """
    q._check_dim(h)
    if h.is_zero():
        raise ZeroDivisionError("h must be non-zero")
    cap = max(q.max_degree, h.max_degree)
    if q.degree + h.degree > cap:
        raise DegreeOverflowError(
            f"deg q + deg h = {q.degree + h.degree} exceeds cap {cap}; raise max_degree"
        )
    prod = q.with_max_degree(cap) * h.with_max_degree(cap)
    return norm(Space.DRURY, prod) / norm(Space.DRURY, h)


def best_multiplier_lower_bound(q: TruncatedSeries, family: Iterable[TruncatedSeries]) -> float:
    """Largest :func:`multiplier_lower_bound` over a family of test functions."""
    return max(multiplier_lower_bound(q, h) for h in family)


def optimal_multiplier_lower_bound(q: TruncatedSeries, h_degree: int) -> float:
    """Sup of ``||q h|| / ||h||`` over all polynomials ``h`` of degree <= ``h_degree``.

    Solved as a generalized Hermitian eigenproblem on the Drury Gram matrices.
    """
    from scipy.linalg import eigh

    n = q.dim
    qd = q.degree
    basis = enumerate_upto(n, h_degree)
    out_basis = enumerate_upto(n, h_degree + qd)
    pos = {a: i for i, a in enumerate(out_basis)}
    M = np.zeros((len(out_basis), len(basis)), dtype=complex)
    for j, b in enumerate(basis):
        for a, c in q.coeffs.items():
            M[pos[tuple(x + y for x, y in zip(a, b))], j] += complex(c)
    w_out = np.array([float(monomial_norm_sq(Space.DRURY, a)) for a in out_basis])
    w_in = np.array([float(monomial_norm_sq(Space.DRURY, a)) for a in basis])
    A = M.conj().T @ (w_out[:, None] * M)
    vals = eigh(A, np.diag(w_in), eigvals_only=True)
    return math.sqrt(max(vals[-1], 0.0))
