"""Positivity cones of holomorphic functions on the ball.

The three nested cones are: Herglotz transforms of positive measures, the
positive Schur class of the Drury space, and functions of positive real part.
None of them is decidable from finite data, so the tests here are sampled
necessary conditions, exact identities on finite measures, or realization
formulas evaluated pointwise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .measures import DiscreteMeasure, random_ball_points, sphere_quadrature
from .mindex import MultiIndex, binom, degree, enumerate_upto, factorial, multinomial_weight, unit
from .series import TruncatedSeries, evaluate, q_form
from .transforms import (
    PoleError,
    fantappie_measure_series,
    hardy_euler_E,
    herglotz_measure,
    szego_herglotz_series,
)

__all__ = [
    "PositivityReport",
    "RealizationData",
    "SingularResolventError",
    "kernel_eval",
    "schur_kernel_gram",
    "schur_gram_from_values",
    "psd_check",
    "op_positivity_sample",
    "schur_witness_search",
    "sphere_quadrature",
    "kp_annihilation_check",
    "kp_family_values",
    "realization_eval",
    "normal_realization",
    "creation_operator_row",
    "build_f2_realization",
    "isometry_defect",
    "mharmonic_link_check",
    "ef_functional",
    "mp_necessary_check",
    "dual_pair_check",
    "constant_shift",
    "eqi7_shift",
    "cayley_tail_degree",
]

Verdict = Literal["pass", "fail", "inconclusive"]


class SingularResolventError(np.linalg.LinAlgError):
    """``I - A(z)`` is not invertible at the requested point."""


@dataclass
class PositivityReport:
    verdict: Verdict
    min_eigenvalue: float
    witness: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


# kernels

KernelKind = Literal["drury", "szego", "bergman", "inv_poisson"]


def _hermitian(z, w) -> np.ndarray:
    return np.asarray(z, dtype=complex) @ np.asarray(w, dtype=complex).conj().T


def kernel_eval(kind: KernelKind, z, w):
    """Reproducing kernels of the ball, or the invariant Poisson kernel.

    ``z`` and ``w`` may be single points or arrays of points; arrays give the
    full matrix ``K[i, j] = k(z_i, w_j)``.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    single = z.ndim == 1 and w.ndim == 1
    Z, W = np.atleast_2d(z), np.atleast_2d(w)
    n = Z.shape[1]
    x = _hermitian(Z, W)
    if np.any(np.abs(1 - x) <= 1e-14):
        raise PoleError("<z, w> = 1")
    if kind == "drury":
        K = 1 / (1 - x)
    elif kind == "szego":
        K = (1 - x) ** (-n)
    elif kind == "bergman":
        K = (1 - x) ** (-(n + 1))
    elif kind == "inv_poisson":
        sq = np.sum(np.abs(Z) ** 2, axis=1)
        if np.any(sq >= 1):
            raise PoleError("invariant Poisson kernel needs |z| < 1")
        K = np.abs((1 - x) ** (-n)) ** 2 * ((1 - sq) ** n)[:, None]
    else:
        raise ValueError(f"unknown kernel kind {kind!r}")
    return complex(K[0, 0]) if single and kind != "inv_poisson" else (
        float(K[0, 0]) if single else K
    )


def schur_kernel_gram(f: TruncatedSeries, points) -> np.ndarray:
    """``G[i, j] = (f(z_i) + conj f(z_j)) / (1 - <z_i, z_j>)``."""
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    return schur_gram_from_values(evaluate(f, pts), pts)


def schur_gram_from_values(values, points) -> np.ndarray:
    """:func:`schur_kernel_gram` from precomputed values ``f(z_i)``."""
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    if np.any(np.linalg.norm(pts, axis=1) >= 1):
        raise ValueError("sample points must lie in the open ball")
    vals = np.asarray(values, dtype=complex)
    return (vals[:, None] + vals.conj()[None, :]) * kernel_eval("drury", pts, pts)


def psd_check(G, tol: float = 1e-9) -> PositivityReport:
    """Pass iff ``lambda_min((G + G*)/2) >= -tol (1 + ||G||)``."""
    G = np.asarray(G)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError("psd_check needs a square matrix")
    H = (G + G.conj().T) / 2
    vals, vecs = np.linalg.eigh(H)
    scale = np.linalg.norm(H, 2) if H.size else 0.0
    lam = float(vals[0]) if len(vals) else 0.0
    ok = lam >= -tol * (1 + scale)
    witness = {} if ok else {"eigenvector": vecs[:, 0]}
    return PositivityReport("pass" if ok else "fail", lam, witness, {"norm": float(scale)})


def op_positivity_sample(f: TruncatedSeries, points, tol: float = 1e-12) -> PositivityReport:
    """Sampled necessary condition for positive real part: ``Re f(z_i) >= -tol``.

    A pass certifies nothing beyond the samples.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    re = evaluate(f, pts).real
    i = int(np.argmin(re))
    lam = float(re[i])
    ok = lam >= -tol
    return PositivityReport(
        "pass" if ok else "fail", lam, {} if ok else {"point": pts[i]}, {"samples": len(pts)}
    )


def schur_witness_search(
    f: TruncatedSeries,
    seed: int = 0x5EED,
    sizes: Sequence[int] = (2, 4, 6, 8, 12, 16, 24, 32, 40),
    radii: Sequence[float] = (0.5, 0.6, 0.7, 0.8, 0.9, 0.95),
    max_evals: int = 100_000,
    tol: float = 1e-9,
) -> PositivityReport:
    """Randomized search for points where the Schur kernel Gram of f is indefinite.

    Best effort only: a ``fail`` verdict ships the witness points; an
    exhausted budget returns ``inconclusive``, never ``pass``.
    """
    rng = np.random.default_rng(seed)
    evals = 0
    best = math.inf
    best_pts = None
    while evals < max_evals:
        for m in sizes:
            for r in radii:
                pts = random_ball_points(rng, m, f.dim, radius=r)
                rep = psd_check(schur_kernel_gram(f, pts), tol)
                evals += 1
                if rep.min_eigenvalue < best:
                    best, best_pts = rep.min_eigenvalue, pts
                if not rep.passed:
                    rep.witness["points"] = pts
                    rep.detail["evaluations"] = evals
                    return rep
                if evals >= max_evals:
                    break
            if evals >= max_evals:
                break
    return PositivityReport(
        "inconclusive", float(best), {"points": best_pts}, {"evaluations": evals}
    )


# Koranyi-Pukansky annihilation conditions


def _mono(points: np.ndarray, a, b) -> np.ndarray:
    return np.prod(points ** np.asarray(a) * points.conj() ** np.asarray(b), axis=1)


def _leq(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def kp_family_values(mu: DiscreteMeasure, D: int):
    """Yield ``(family, alpha, beta, j, value)`` for every annihilation condition.

    Families, with ``|alpha| + |beta| <= D``:

    1. ``u^a conj(u)^b`` for incomparable ``a, b``;
    2. ``u^a conj(u)^(a+b) [a_j + b_j + 1 - (|a| + |b| + n) |u_j|^2]``;
    3. the conjugate-position twin ``u^(a+b) conj(u)^a [...]``.

    ``j`` is 0-based in the output; ``None`` for family 1.
    """
    n = mu.dim
    P = mu.points
    w = mu.weights
    idx = enumerate_upto(n, D)
    for a in idx:
        for b in idx:
            if degree(a) + degree(b) > D:
                continue
            if not _leq(a, b) and not _leq(b, a):
                yield 1, a, b, None, complex(np.dot(w, _mono(P, a, b))) if len(mu) else 0j
    for a in idx:
        for b in idx:
            if degree(a) + degree(b) > D:
                continue
            ab = tuple(x + y for x, y in zip(a, b))
            s = degree(a) + degree(b) + n
            for j in range(n):
                bracket = a[j] + b[j] + 1 - s * np.abs(P[:, j]) ** 2 if len(mu) else 0
                v2 = complex(np.dot(w, _mono(P, a, ab) * bracket)) if len(mu) else 0j
                v3 = complex(np.dot(w, _mono(P, ab, a) * bracket)) if len(mu) else 0j
                yield 2, a, b, j, v2
                yield 3, a, b, j, v3


def kp_annihilation_check(mu: DiscreteMeasure, D: int, tol: float = 1e-12) -> PositivityReport:
    """Pass iff every annihilation sum has modulus ``<= tol``; reports the worst."""
    mu.require_sphere()
    worst = (0.0, None)
    count = 0
    for fam, a, b, j, v in kp_family_values(mu, D):
        count += 1
        if abs(v) > worst[0]:
            worst = (abs(v), (fam, a, b, j, v))
    ok = worst[0] <= tol
    witness = {}
    if worst[1] is not None:
        fam, a, b, j, v = worst[1]
        witness = {"family": fam, "alpha": a, "beta": b, "j": j, "value": v}
    return PositivityReport(
        "pass" if ok else "fail", -worst[0], witness, {"conditions": count, "max_abs": worst[0]}
    )


# realization formulas

RealizationForm = Literal["schur_f4", "op_f5", "normal_h9"]


@dataclass
class RealizationData:
    """Data for ``f(z) = <[2 (I - A(z))^-1 - I] xi, xi> + i t``.

    ``blocks`` maps a multi-index to a square matrix on the state space L.
    ``A(z) = sum_alpha c_alpha z^alpha V_alpha`` with ``c_alpha = 1`` for the
    ``schur_f4`` and ``normal_h9`` forms (linear, ``alpha = e_i``), and
    ``c_alpha = sqrt(C(n, |alpha|))`` over odd ``|alpha| <= n`` for ``op_f5``.
    """

    form: RealizationForm
    dim: int
    blocks: dict[MultiIndex, np.ndarray]
    xi: np.ndarray
    t: float = 0.0
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=complex)
        size = self.xi.shape[0]
        for a, V in list(self.blocks.items()):
            V = np.asarray(V, dtype=complex)
            if V.shape != (size, size):
                raise ValueError(f"block {a} has shape {V.shape}, state space is {size}")
            if len(a) != self.dim:
                raise ValueError(f"block index {a} does not have length {self.dim}")
            if self.form in ("schur_f4", "normal_h9") and degree(a) != 1:
                raise ValueError(f"{self.form} blocks must be indexed by unit vectors")
            if self.form == "op_f5" and (degree(a) % 2 == 0 or degree(a) > self.dim):
                raise ValueError("op_f5 blocks must have odd degree <= n")
            self.blocks[a] = V
        if self.form == "normal_h9":
            for V in self.blocks.values():
                if np.any(np.abs(V - np.diag(np.diag(V))) > 0):
                    raise ValueError("normal_h9 blocks must be diagonal")

    @property
    def state_dim(self) -> int:
        return self.xi.shape[0]

    def weight(self, alpha) -> float:
        if self.form == "op_f5":
            return math.sqrt(binom(self.dim, degree(alpha)))
        return 1.0

    def pencil(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        A = np.zeros((self.state_dim, self.state_dim), dtype=complex)
        for a, V in self.blocks.items():
            A += self.weight(a) * np.prod(z ** np.asarray(a)) * V
        return A


def realization_eval(R: RealizationData, z) -> complex:
    """Evaluate the realization formula at one point."""
    z = np.asarray(z, dtype=complex)
    if z.shape != (R.dim,):
        raise ValueError("point dimension mismatch")
    if R.state_dim == 0:
        return 1j * R.t
    M = np.eye(R.state_dim) - R.pencil(z)
    try:
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > 1e14:
            raise SingularResolventError(f"I - A(z) singular at z = {z}")
        k = np.linalg.solve(M, R.xi)
    except np.linalg.LinAlgError as exc:
        raise SingularResolventError(str(exc)) from exc
    return complex(2 * np.vdot(R.xi, k) - np.vdot(R.xi, R.xi)) + 1j * R.t


def normal_realization(mu: DiscreteMeasure, t: float = 0.0) -> RealizationData:
    """Multiplication by the (conjugated) coordinates on ``L^2(mu)``.

    The blocks are ``diag(conj(u_k,i))`` and ``xi = sqrt(w)``; the formula then
    reproduces the Herglotz transform of mu plus ``i t``.
    """
    if not mu.is_positive():
        raise ValueError("normal realization needs a positive measure")
    n = mu.dim
    blocks = {unit(n, i): np.diag(mu.points[:, i].conj()) for i in range(n)}
    return RealizationData("normal_h9", n, blocks, np.sqrt(mu.weights), t)


def creation_operator_row(n: int, depth: int) -> RealizationData:
    """Left creation operators on the Fock space truncated at word length ``depth``.

    ``V_i`` maps the word ``w`` to ``i w``; words longer than ``depth`` are
    dropped, so ``V_i* V_j = delta_ij`` holds exactly on words shorter than
    ``depth``.  ``xi`` is the vacuum vector.
    """
    words = [()]
    for k in range(1, depth + 1):
        words.extend(itertools.product(range(n), repeat=k))
    pos = {w: i for i, w in enumerate(words)}
    N = len(words)
    blocks = {}
    for i in range(n):
        V = np.zeros((N, N))
        for w, col in pos.items():
            target = (i,) + w
            if target in pos:
                V[pos[target], col] = 1.0
        blocks[unit(n, i)] = V
    xi = np.zeros(N)
    xi[0] = 1.0
    return RealizationData("schur_f4", n, blocks, xi, 0.0, {"words": words})


def isometry_defect(R: RealizationData) -> float:
    """``||V* V - I||`` for the row ``V = [V_1 ... V_n]`` of a linear realization."""
    if R.form == "op_f5":
        raise ValueError("isometry_defect is defined for linear (f4/h9) realizations")
    row = np.hstack([R.blocks[unit(R.dim, i)] for i in range(R.dim)])
    G = row.conj().T @ row
    return float(np.linalg.norm(G - np.eye(G.shape[0]), 2))


def _positive_map(b: np.ndarray, y: np.ndarray) -> np.ndarray:
    """A positive definite P with ``P b = y``; requires ``<b, y>`` real positive."""
    yb = np.vdot(y, b)
    if not (abs(yb.imag) <= 1e-14 * abs(yb) and yb.real > 0):
        raise ValueError("need <y, b> > 0")
    nb = np.vdot(b, b).real
    proj = np.eye(len(b)) - np.outer(b, b.conj()) / nb
    return np.outer(y, y.conj()) / yb.real + proj


def _szego_atom_block(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Matrix B and vector xi with ``<(I - x B)^-1 xi, xi> = (1 - x)^-n``.

    Starts from the Jordan block J (eigenvalue 1): the (0, j) entry of
    ``(I - x J)^-1`` is ``x^j / (1 - x)^(j+1)``, and
    ``(1 - x)^-n = sum_j C(n-1, j) x^j / (1 - x)^(j+1)``.  This realizes the
    function as ``c (I - xJ)^-1 b`` with ``c = e_0``; a positive definite
    similarity then makes the input and output vectors coincide.
    """
    J = np.eye(n) + np.diag(np.ones(n - 1), 1)
    b = np.array([math.comb(n - 1, j) for j in range(n)], dtype=complex)
    c = np.zeros(n, dtype=complex)
    c[0] = 1
    P = _positive_map(b, c)
    S = np.linalg.cholesky(P).conj().T  # P = S* S
    B = S @ J @ np.linalg.inv(S)
    return B, S @ b


def build_f2_realization(
    mu: DiscreteMeasure, t: float = 0.0, samples: int = 16, seed: int = 0x5EED
) -> RealizationData:
    """Odd-degree realization of ``sum_k w_k [2 S(z, u_k) - 1] + i t``.

    Each atom contributes an n-dimensional block driven by ``<z, u_k>`` alone,
    so only the degree-one blocks ``V_{e_i}`` are non-zero.  The isometry
    property of the full colligation is not imposed; its Gram defect on a
    sample of points is recorded in ``info["gram_defect"]``.
    """
    if not mu.is_positive():
        raise ValueError("build_f2_realization needs a positive measure")
    mu.require_sphere()
    n = mu.dim
    m = len(mu)
    if m == 0:
        blocks = {unit(n, i): np.zeros((0, 0)) for i in range(n)}
        R = RealizationData("op_f5", n, blocks, np.zeros(0), t)
        R.info["gram_defect"] = 0.0
        return R
    B, xi0 = _szego_atom_block(n)
    size = m * n
    xi = np.zeros(size, dtype=complex)
    Bbig = np.zeros((size, size), dtype=complex)
    for k in range(m):
        sl = slice(k * n, (k + 1) * n)
        xi[sl] = math.sqrt(mu.weights[k]) * xi0
        Bbig[sl, sl] = B
    # A(z) = sum_i z_i conj(u_k,i) B on block k; undo the sqrt(C(n,1)) weight
    blocks = {}
    for i in range(n):
        D = np.kron(np.diag(mu.points[:, i].conj()), np.eye(n))
        blocks[unit(n, i)] = D @ Bbig / math.sqrt(n)
    R = RealizationData("op_f5", n, blocks, xi, t)
    R.info["gram_defect"] = _f5_gram_defect(R, samples, seed)
    return R


def _f5_gram_defect(R: RealizationData, samples: int, seed: int) -> float:
    """Largest violation of ``<k(z)-k(0), k(w)-k(0)> = (1 - (1 - <z,w>)^n) <k(z), k(w)>``.

    ``k(z) = (I - A(z))^-1 xi``.  Zero iff the block map extends to an
    isometry on the span of the samples.
    """
    rng = np.random.default_rng(seed)
    pts = random_ball_points(rng, samples, R.dim, radius=0.8)
    ks = np.array([np.linalg.solve(np.eye(R.state_dim) - R.pencil(z), R.xi) for z in pts])
    k0 = R.xi
    lhs = (ks - k0).conj() @ (ks - k0).T
    gram = ks.conj() @ ks.T
    x = pts.conj() @ pts.T  # x[i, j] = <z_j, z_i>
    rhs = (1 - (1 - x) ** R.dim) * gram
    scale = max(1.0, float(np.abs(gram).max()))
    return float(np.abs(lhs - rhs).max() / scale)


# duality and moment checks


def mharmonic_link_check(mu: DiscreteMeasure, D: int, tol: float = 1e-10) -> PositivityReport:
    """Coefficientwise ``E[f + conj f(0)] = 2 v(., 0)`` up to degree D.

    ``f`` is the Herglotz transform of mu, built from the Fantappie series;
    ``v(z, 0) = sum_k w_k S(z, u_k)`` is expanded independently.
    """
    mu.require_sphere()
    n = mu.dim
    f = fantappie_measure_series(mu, D) * 2 - complex(mu.total_mass)
    lhs = hardy_euler_E(f + f.constant_term.conjugate())
    # 2 v(z, 0) = szego_herglotz + mass, since szego_herglotz = 2 v - mass
    rhs = szego_herglotz_series(mu, 0.0, D) + complex(mu.total_mass)
    dev = lhs.max_abs_difference(rhs)
    return PositivityReport("pass" if dev <= tol else "fail", -dev, {}, {"max_deviation": dev})


def ef_functional(f: TruncatedSeries, mu: DiscreteMeasure) -> complex:
    """``sum_k w_k (E f)(u_k)``."""
    mu.require_sphere()
    if len(mu) == 0:
        return 0j
    return complex(np.dot(mu.weights, evaluate(hardy_euler_E(f), mu.points)))


def mp_necessary_check(f: TruncatedSeries, tol: float = 1e-12) -> PositivityReport:
    """Trivially necessary moment bounds for membership in the Herglotz cone.

    Candidate moments ``m_a = (a!/|a|!) [z^a] (f + conj f(0))/2``, so
    ``m_0 = Re f(0)``.  Passes iff ``m_0 >= 0`` and ``|m_a| <= m_0`` for all a.
    Necessary only.
    """
    zero = (0,) * f.dim
    m0 = complex(f.constant_term).real
    worst = (m0 if m0 < 0 else 0.0, zero)
    for a, c in f.coeffs.items():
        if a == zero:
            continue
        m = complex(c) / 2 / multinomial_weight(a)
        excess = abs(m) - m0
        if excess > worst[0]:
            worst = (excess, a)
    if m0 < -tol:
        ok = False
    else:
        ok = worst[0] <= tol * max(1.0, abs(m0))
    return PositivityReport(
        "pass" if ok else "fail", -worst[0], {} if ok else {"alpha": worst[1]}, {"m0": m0}
    )


def dual_pair_check(f: TruncatedSeries, g: TruncatedSeries) -> float:
    """``Re Q(f, g)``."""
    return float(complex(q_form(f, g)).real)


def constant_shift(p: TruncatedSeries) -> TruncatedSeries:
    """``p - Re p(0)/2 - i Im p(0)``."""
    c = complex(p.constant_term)
    return p - complex(c.real / 2, c.imag)


eqi7_shift = constant_shift


def cayley_tail_degree(rho: float, q_degree: int, tail_tol: float | None = None) -> int:
    """Truncation degree making the Cayley partial sums trustworthy where ``|q| <= rho``.

    ``(1+w)/(1-w) - (1 + 2 sum_{k<=K} w^k) = 2 w^(K+1)/(1-w)``, bounded by
    ``2 rho^(K+1)/(1-rho)``.  By default the tail is kept below half of the
    smallest real part ``(1-rho)/(1+rho)``, so sampled positivity of the
    truncation reflects the exact transform.  Returns ``q_degree * K``.
    """
    if not 0 <= rho < 1:
        raise ValueError("rho must lie in [0, 1)")
    if rho == 0:
        return q_degree
    if tail_tol is None:
        tail_tol = (1 - rho) / (1 + rho) / 2
    K = math.ceil(math.log(tail_tol * (1 - rho) / 2) / math.log(rho)) - 1
    return q_degree * max(K, 1)
