"""Symmetrized functional calculus and joint numerical ranges.

``p_s(T)`` replaces each monomial ``z^a`` by the average of all distinct
operator words with ``a_i`` copies of ``T_i``.  The calculus is bounded by the
sup norm of ``Gamma p`` over the ball whenever the joint numerical range of T
lies in the closed ball, which is what :func:`verify_calculus_bound` tests.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cones import op_positivity_sample
from .measures import quasi_random_ball_points, quasi_random_sphere_points
from .mindex import MultiIndex, as_multi_index, degree, factorial
from .series import TruncatedSeries, evaluate
from .transforms import DiagonalOperator, gamma_operator

log = logging.getLogger(__name__)

__all__ = [
    "OperatorTuple",
    "MatrixPolynomial",
    "NumRangeReport",
    "BoundReport",
    "NilpotentWordReport",
    "PositiveCalcReport",
    "PreconditionError",
    "UncertifiedTupleError",
    "WordDegreeError",
    "sym_monomial",
    "sym_poly",
    "numerical_radius",
    "joint_num_radius",
    "scale_to_ball",
    "sup_norm_ball",
    "verify_calculus_bound",
    "check_nilpotent_word_bound",
    "check_eqi8",
    "check_positive_calc",
    "central_binomial_inequality",
    "random_polynomial",
]

DEFAULT_SEED = 0x5EED
WORD_CAP = 16


class WordDegreeError(ValueError):
    """The requested word length exceeds the configured cap."""


class PreconditionError(ValueError):
    pass


class UncertifiedTupleError(PreconditionError):
    """The tuple's joint numerical range is not certified to lie in the ball."""


@dataclass(frozen=True, eq=False)
class OperatorTuple:
    """``n`` square complex matrices of a common size ``d``; no commutation assumed."""

    matrices: tuple

    def __post_init__(self):
        mats = tuple(np.array(M, dtype=complex) for M in self.matrices)
        if not mats:
            raise ValueError("an operator tuple needs at least one matrix")
        d = mats[0].shape[0]
        for M in mats:
            if M.ndim != 2 or M.shape != (d, d):
                raise ValueError("all matrices must be square of equal size")
            M.setflags(write=False)
        object.__setattr__(self, "matrices", mats)

    @property
    def n(self) -> int:
        return len(self.matrices)

    @property
    def d(self) -> int:
        return self.matrices[0].shape[0]

    def __getitem__(self, i) -> np.ndarray:
        return self.matrices[i]

    def __iter__(self):
        return iter(self.matrices)

    def scaled(self, c: complex) -> "OperatorTuple":
        return OperatorTuple(tuple(c * M for M in self.matrices))

    def conjugated(self, U: np.ndarray) -> "OperatorTuple":
        """``(U* T_1 U, ..., U* T_n U)``."""
        return OperatorTuple(tuple(U.conj().T @ M @ U for M in self.matrices))

    def norm_bound(self) -> float:
        """``(sum ||T_i||^2)^(1/2)``, an upper bound for the joint numerical radius."""
        return math.sqrt(sum(np.linalg.norm(M, 2) ** 2 for M in self.matrices))

    def is_zero(self) -> bool:
        return all(not np.any(M) for M in self.matrices)

    @classmethod
    def random(cls, rng: np.random.Generator, n: int, d: int) -> "OperatorTuple":
        return cls(
            tuple(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(n))
        )


# symmetrized calculus


class _WordSums:
    """Memoized sums of all distinct words with prescribed letter counts.

    ``W(a) = sum_i T_i W(a - e_i)`` since every word starts with some letter;
    the table has ``prod (a_i + 1)`` entries instead of one per word.
    """

    def __init__(self, T: OperatorTuple):
        self.T = T
        self.table: dict[MultiIndex, np.ndarray] = {(0,) * T.n: np.eye(T.d, dtype=complex)}

    def __call__(self, a: MultiIndex) -> np.ndarray:
        hit = self.table.get(a)
        if hit is not None:
            return hit
        acc = np.zeros((self.T.d, self.T.d), dtype=complex)
        for i, k in enumerate(a):
            if k:
                rest = a[:i] + (k - 1,) + a[i + 1 :]
                acc += self.T[i] @ self(rest)
        self.table[a] = acc
        return acc


def sym_monomial(T: OperatorTuple, alpha, cap: int = WORD_CAP) -> np.ndarray:
    """``(z^alpha)_s(T)``: the average over distinct arrangements of the word."""
    alpha = as_multi_index(alpha, T.n)
    if degree(alpha) > cap:
        raise WordDegreeError(f"|alpha| = {degree(alpha)} exceeds the word cap {cap}")
    weight = Fraction(factorial(alpha), math.factorial(degree(alpha)))
    return float(weight) * _WordSums(T)(alpha)


@dataclass(frozen=True, eq=False)
class MatrixPolynomial:
    """An ``r x c`` grid of scalar series in a common number of variables."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.entries)
        if not rows or not rows[0]:
            raise ValueError("matrix polynomial needs at least one entry")
        width = len(rows[0])
        dims = {p.dim for row in rows for p in row}
        if any(len(row) != width for row in rows) or len(dims) != 1:
            raise ValueError("entries must form a rectangular grid of equal dimension")
        object.__setattr__(self, "entries", rows)

    @property
    def dim(self) -> int:
        return self.entries[0][0].dim

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    @property
    def degree(self) -> int:
        return max(p.degree for row in self.entries for p in row)

    def map(self, fn) -> "MatrixPolynomial":
        return MatrixPolynomial(tuple(tuple(fn(p) for p in row) for row in self.entries))

    def evaluate(self, z) -> np.ndarray:
        """Values at points of shape ``(m, n)``; result has shape ``(m, r, c)``."""
        pts = np.atleast_2d(np.asarray(z, dtype=complex))
        r, c = self.shape
        out = np.empty((pts.shape[0], r, c), dtype=complex)
        for i, j in itertools.product(range(r), range(c)):
            out[:, i, j] = evaluate(self.entries[i][j], pts)
        return out

    @classmethod
    def random(cls, rng: np.random.Generator, n: int, deg: int, shape=(2, 2)) -> "MatrixPolynomial":
        return cls(
            tuple(tuple(random_polynomial(rng, n, deg) for _ in range(shape[1])) for _ in range(shape[0]))
        )


def random_polynomial(rng: np.random.Generator, n: int, deg: int) -> TruncatedSeries:
    """Complex Gaussian coefficients on every monomial of degree ``<= deg``."""
    return TruncatedSeries.from_function(
        lambda a: complex(rng.standard_normal(), rng.standard_normal()), n, deg
    )


def _sym_scalar(words: _WordSums, p: TruncatedSeries, cap: int) -> np.ndarray:
    out = np.zeros((words.T.d, words.T.d), dtype=complex)
    for a, c in p.coeffs.items():
        if c == 0:
            continue
        if degree(a) > cap:
            raise WordDegreeError(f"|alpha| = {degree(a)} exceeds the word cap {cap}")
        out += complex(c) * (factorial(a) / math.factorial(degree(a))) * words(a)
    return out


def sym_poly(T: OperatorTuple, p, cap: int = WORD_CAP) -> np.ndarray:
    """``p_s(T)``; a matrix polynomial gives the block matrix ``[p_ij]_s(T)``."""
    words = _WordSums(T)
    if isinstance(p, TruncatedSeries):
        if p.dim != T.n:
            raise ValueError(f"polynomial in {p.dim} variables, tuple has {T.n} operators")
        return _sym_scalar(words, p, cap)
    if isinstance(p, MatrixPolynomial):
        if p.dim != T.n:
            raise ValueError(f"polynomial in {p.dim} variables, tuple has {T.n} operators")
        return np.block([[_sym_scalar(words, q, cap) for q in row] for row in p.entries])
    raise TypeError("p must be a TruncatedSeries or MatrixPolynomial")


# joint numerical range


@dataclass
class NumRangeReport:
    """Bracket ``lower_bound <= nu <= upper_bound``.

    ``witness`` is a unit vector attaining the lower bound and ``direction``
    the unit ``u`` in C^n whose compression attains it.  ``grid_resolution``
    is the angular radius of the finest cells examined.
    """

    lower_bound: float
    upper_bound: float
    grid_resolution: float
    witness: np.ndarray
    direction: np.ndarray
    cells: int = 0
    certified: bool = True

    @property
    def value(self) -> float:
        return (self.lower_bound + self.upper_bound) / 2

    @property
    def gap(self) -> float:
        return self.upper_bound - self.lower_bound


def _face_points(faces: np.ndarray, signs: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Embed face coordinates into R^m by inserting ``sign`` at position ``face``."""
    k, m1 = centers.shape
    out = np.empty((k, m1 + 1))
    cols = np.arange(m1 + 1)
    for f in np.unique(faces):
        rows = faces == f
        others = cols[cols != f]
        out[np.ix_(rows, others)] = centers[rows]
        out[rows, f] = signs[rows]
    return out


def _top_eig(G: np.ndarray, C: np.ndarray):
    """``lambda_max`` and top eigenvector of ``sum_k C[:, k] G[k]`` for a batch of C."""
    M = np.einsum("bk,kij->bij", C, G)
    vals, vecs = np.linalg.eigh(M)
    return vals[:, -1], vecs[:, :, -1]


def _joint_values(G: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """``x_k = <G_k xi, xi>`` (real since the G_k are Hermitian) for a batch of xi."""
    return np.einsum("bi,kij,bj->bk", xi.conj(), G, xi).real


def _ascent(G: np.ndarray, C: np.ndarray, steps: int):
    """Alternate ``xi = top eigenvector(c)`` and ``c = x(xi)/|x(xi)|``; monotone in ``|x|``."""
    best_val = np.full(len(C), -np.inf)
    best_xi = None
    best_c = C
    for _ in range(steps):
        _, xi = _top_eig(G, C)
        x = _joint_values(G, xi)
        r = np.linalg.norm(x, axis=1)
        if best_xi is None:
            best_xi = xi.copy()
        better = r > best_val
        best_val = np.where(better, r, best_val)
        best_xi[better] = xi[better]
        best_c = np.where(better[:, None], C, best_c)
        C = np.where(r[:, None] > 0, x / np.where(r > 0, r, 1)[:, None], C)
    return best_val, best_xi, best_c


def _hermitian_generators(T: OperatorTuple) -> np.ndarray:
    H = [(M + M.conj().T) / 2 for M in T]
    K = [(M - M.conj().T) / 2j for M in T]
    return np.array(H + K)


def _direction_from_c(c: np.ndarray, n: int) -> np.ndarray:
    # sum a_k H_k + b_k K_k is the hermitian part of sum (a_k - i b_k) T_k
    return c[:n] + 1j * c[n:]


def joint_num_radius(
    T: OperatorTuple,
    tol: float = 1e-8,
    max_cells: int = 400_000,
    restarts: int = 8,
    seed: int = DEFAULT_SEED,
) -> NumRangeReport:
    """``nu(T) = sup_u w(sum conj(u_i) T_i) = sup_xi |(<T_i xi, xi>)_i|``.

    Writing ``T_i = H_i + i K_i`` with Hermitian parts, ``nu`` is the maximum
    over unit ``c`` in R^2n of ``h(c) = lambda_max(sum c_k G_k)`` with
    ``G = (H_1..H_n, K_1..K_n)``.  The sphere is covered by cube-face cells refined by branch and
    bound.  If the maximizer lies in a cell with centre ``c`` and angular
    radius ``delta < pi/2`` then ``h(c) >= nu cos(delta)``, so
    ``h(c)/cos(delta)`` is an upper bound for every cell that can still
    contain the maximizer.  Lower bounds come from ``|x(xi)|`` at top
    eigenvectors, improved by alternating ascent.
    """
    n, m = T.n, 2 * T.n
    fallback = T.norm_bound()
    zero_witness = np.zeros(T.d, dtype=complex)
    zero_witness[0] = 1
    if fallback == 0:
        u = np.zeros(n, dtype=complex)
        u[0] = 1
        return NumRangeReport(0.0, 0.0, 0.0, zero_witness, u, 0, True)
    G = _hermitian_generators(T)

    # lower bound from random restarts
    rng = np.random.default_rng(seed)
    C0 = rng.standard_normal((restarts, m))
    C0 /= np.linalg.norm(C0, axis=1, keepdims=True)
    vals, xis, cs = _ascent(G, C0, 30)
    i = int(np.argmax(vals))
    lower, best_xi, best_c = float(vals[i]), xis[i], cs[i]

    # initial cells: the 2m faces of the cube, each a full (m-1)-cube
    faces = np.repeat(np.arange(m), 2)
    signs = np.tile([1.0, -1.0], m)
    centers = np.zeros((2 * m, m - 1))
    half = 1.0
    corner_offsets = np.array(list(itertools.product([-1.0, 1.0], repeat=m - 1)))
    child_offsets = corner_offsets / 2
    total_cells = 0
    upper = fallback
    delta = math.pi
    certified = False
    while True:
        total_cells += len(centers)
        P = _face_points(faces, signs, centers)
        C = P / np.linalg.norm(P, axis=1, keepdims=True)
        # angular radius: max angle to the (projected) corners
        cos_delta = np.full(len(C), np.inf)
        for off in corner_offsets:
            Q = _face_points(faces, signs, centers + half * off)
            Q /= np.linalg.norm(Q, axis=1, keepdims=True)
            cos_delta = np.minimum(cos_delta, np.einsum("bk,bk->b", C, Q))
        delta = float(np.arccos(np.clip(cos_delta.min(), -1, 1)))
        h, xi = _top_eig(G, C)
        x = _joint_values(G, xi)
        r = np.linalg.norm(x, axis=1)
        j = int(np.argmax(r))
        if r[j] > lower:
            lower, best_xi, best_c = float(r[j]), xi[j], x[j] / r[j]
        # polish the most promising cells
        top = np.argsort(-h)[: min(4, len(h))]
        v2, xi2, c2 = _ascent(G, C[top], 5)
        k = int(np.argmax(v2))
        if v2[k] > lower:
            lower, best_xi, best_c = float(v2[k]), xi2[k], c2[k]
        ub = np.where(cos_delta > 1e-3, h / np.maximum(cos_delta, 1e-3), np.inf)
        keep = ub >= lower - 1e-15 * max(1.0, lower)
        level_upper = float(np.max(ub[keep])) if np.any(keep) else lower
        upper = min(fallback, level_upper)
        if upper - lower <= tol:
            certified = True
            break
        survivors = int(keep.sum())
        if survivors * len(child_offsets) > max_cells:
            log.info("joint_num_radius: cell cap reached with gap %.3e", upper - lower)
            break
        faces = np.repeat(faces[keep], len(child_offsets))
        signs = np.repeat(signs[keep], len(child_offsets))
        centers = (centers[keep][:, None, :] + half * child_offsets[None, :, :]).reshape(-1, m - 1)
        half /= 2
    upper = max(upper, lower)
    best_xi = best_xi / np.linalg.norm(best_xi)
    return NumRangeReport(
        lower, upper, delta, best_xi, _direction_from_c(best_c, n), total_cells, certified
    )


def numerical_radius(A, tol: float = 1e-8, max_cells: int = 400_000) -> NumRangeReport:
    """``w(A) = max_theta lambda_max(Re(e^{i theta} A))``, certified to ``tol``."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("numerical_radius needs a square matrix")
    return joint_num_radius(OperatorTuple((A,)), tol=tol, max_cells=max_cells)


def scale_to_ball(
    T: OperatorTuple, margin: float = 0.0, tol: float = 1e-7, max_cells: int = 200_000
) -> OperatorTuple:
    """Divide T by ``upper_bound(nu(T)) (1 + margin)`` so that ``nu <= 1``."""
    if T.is_zero():
        raise ValueError("cannot scale the zero tuple")
    rep = joint_num_radius(T, tol=tol, max_cells=max_cells)
    return T.scaled(1 / (rep.upper_bound * (1 + margin)))


# sup norms over the ball


def _pointwise_norm(p, pts: np.ndarray) -> np.ndarray:
    if isinstance(p, TruncatedSeries):
        return np.abs(evaluate(p, pts))
    vals = p.evaluate(pts)
    return np.linalg.svd(vals, compute_uv=False)[:, 0]


def sup_norm_ball(p, effort: int = 1, seed: int = DEFAULT_SEED) -> float:
    """Estimate ``sup_{|z| <= 1} ||p(z)||`` (operator norm for matrix coefficients).

    ``|p|`` and ``||p||`` are subharmonic, so the sup is attained on the
    sphere.  Quasi-random sphere samples seed a local ascent from the best
    few points; the result is a lower estimate of the true sup.
    """
    from scipy.optimize import minimize

    n = p.dim
    if p.degree <= 0:
        zero = np.zeros((1, n))
        return float(_pointwise_norm(p, zero)[0])
    m = 512 * effort
    pts = quasi_random_sphere_points(m, n, seed)
    vals = _pointwise_norm(p, pts)
    best = float(vals.max())
    starts = pts[np.argsort(-vals)[: 4 * effort]]

    def neg(x):
        z = x[:n] + 1j * x[n:]
        nz = np.linalg.norm(z)
        if nz == 0:
            return 0.0
        return -float(_pointwise_norm(p, (z / nz)[None, :])[0])

    for z0 in starts:
        x0 = np.concatenate([z0.real, z0.imag])
        res = minimize(neg, x0, method="L-BFGS-B", options={"ftol": 1e-15, "gtol": 1e-12})
        best = max(best, -float(res.fun), -neg(x0))
    return best


# bound verification


@dataclass
class BoundReport:
    lhs: float
    rhs: float
    passed: bool
    slack: float
    effort: int
    eps: float
    witness: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "inspect numerics"


def _certify(T: OperatorTuple, force: bool, tol: float = 1e-9) -> None:
    if force:
        return
    rep = joint_num_radius(T, tol=1e-8)
    if rep.upper_bound > 1 + tol:
        raise UncertifiedTupleError(
            f"joint numerical radius upper bound {rep.upper_bound:.12g} exceeds 1"
        )


def verify_calculus_bound(
    T: OperatorTuple,
    p,
    gamma: DiagonalOperator | None = None,
    eps: float = 1e-6,
    assume_scaled: bool = False,
    force: bool = False,
    seed: int = DEFAULT_SEED,
) -> BoundReport:
    """Check ``||p_s(T)|| <= (1 + eps) sup_ball ||Gamma p||``.

    Failures are retried with 10x and 100x sampling effort before being
    reported; a persistent failure carries the full witness.
    """
    if p.dim != T.n:
        raise ValueError("polynomial and tuple dimensions differ")
    if not assume_scaled:
        _certify(T, force)
    gamma = gamma_operator(T.n) if gamma is None else gamma
    gp = gamma(p) if isinstance(p, TruncatedSeries) else p.map(gamma)
    lhs = float(np.linalg.norm(sym_poly(T, p), 2))
    for effort in (1, 10, 100):
        rhs = sup_norm_ball(gp, effort=effort, seed=seed)
        if lhs <= rhs * (1 + eps):
            break
    passed = lhs <= rhs * (1 + eps)
    witness = {} if passed else {"tuple": T, "polynomial": p, "gamma_p": gp}
    slack = (rhs - lhs) / rhs if rhs > 0 else 0.0
    return BoundReport(lhs, rhs, passed, slack, effort, eps, witness)


def central_binomial_inequality(m: int) -> bool:
    """``C(2m, m) >= 2^(2m-1)/(2m+1)``, compared as exact integers."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return math.comb(2 * m, m) * (2 * m + 1) >= 2 ** (2 * m - 1)


@dataclass
class NilpotentWordReport:
    m: int
    value: float
    bound: Fraction
    binomial_ok: bool
    matrix: np.ndarray
    passed: bool


def check_nilpotent_word_bound(m: int, A, tol: float = 1e-9) -> NilpotentWordReport:
    """``lambda_max (z1^m z2^m)_s(A, A*) <= (2m+1)/2^(m-1)`` when ``w(A) <= 1/sqrt 2``."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    A = np.asarray(A, dtype=complex)
    # only the ascent lower bound matters for rejection, so a loose bracket suffices
    w = numerical_radius(A, tol=1e-3)
    if w.lower_bound > 1 / math.sqrt(2) + 1e-10:
        raise PreconditionError(f"numerical radius {w.lower_bound:.12g} exceeds 1/sqrt(2)")
    M = sym_monomial(OperatorTuple((A, A.conj().T)), (m, m))
    H = (M + M.conj().T) / 2
    value = float(np.linalg.eigvalsh(H)[-1])
    bound = Fraction(2 * m + 1, 2 ** (m - 1))
    binom_ok = central_binomial_inequality(m)
    return NilpotentWordReport(m, value, bound, binom_ok, M, value <= float(bound) + tol and binom_ok)


check_eqi8 = check_nilpotent_word_bound


@dataclass
class PositiveCalcReport:
    hypothesis_holds: bool
    hypothesis_min: float
    min_eigenvalue: float
    passed: bool


def check_positive_calc(
    T: OperatorTuple,
    p: TruncatedSeries,
    samples: int = 4096,
    tol: float = 1e-8,
    assume_scaled: bool = False,
    force: bool = False,
    seed: int = DEFAULT_SEED,
) -> PositiveCalcReport:
    """If ``Re(Gamma p / 2) >= 0`` on sampled ball points, assert ``Re p_s(T) >= -tol``."""
    if p.dim != T.n:
        raise ValueError("polynomial and tuple dimensions differ")
    if not assume_scaled:
        _certify(T, force)
    half_gamma = gamma_operator(T.n)(p) * 0.5
    pts = np.vstack([quasi_random_ball_points(samples, T.n, seed), quasi_random_sphere_points(samples, T.n, seed)])
    hyp = op_positivity_sample(half_gamma, pts, tol=1e-12)
    M = sym_poly(T, p)
    lam = float(np.linalg.eigvalsh((M + M.conj().T) / 2)[0])
    log.info("positive calculus: hypothesis min %.6g, Re p_s(T) min eig %.6g", hyp.min_eigenvalue, lam)
    passed = (not hyp.passed) or lam >= -tol
    return PositiveCalcReport(hyp.passed, hyp.min_eigenvalue, lam, passed)
