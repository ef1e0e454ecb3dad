"""Finitely supported measures on the closed ball and quadrature rules."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "DiscreteMeasure",
    "OffSphereError",
    "simplex_rule",
    "sphere_quadrature",
    "random_sphere_measure",
    "random_sphere_points",
    "random_ball_points",
    "quasi_random_ball_points",
    "quasi_random_sphere_points",
]

SPHERE_TOL = 1e-12


class OffSphereError(ValueError):
    """An atom required to lie on the unit sphere does not."""


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Weighted atoms ``sum_k w_k delta_{u_k}`` in C^n.

    ``points`` has shape ``(m, n)``; ``weights`` shape ``(m,)``.  Weights are
    real unless ``allow_complex`` is set.
    """

    points: np.ndarray
    weights: np.ndarray
    allow_complex: bool = False

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=complex))
        w = np.atleast_1d(np.asarray(self.weights))
        if pts.size == 0:
            dim = pts.shape[1] if pts.ndim == 2 and pts.shape[1] else None
            if dim is None:
                raise ValueError("empty measure needs points of shape (0, n)")
        if w.shape != (pts.shape[0],):
            raise ValueError(f"{pts.shape[0]} atoms but {w.shape} weights")
        if np.iscomplexobj(w) and not self.allow_complex:
            if np.any(np.abs(w.imag) > 0):
                raise ValueError("complex weights need allow_complex=True")
            w = w.real
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        w = w.astype(complex if self.allow_complex else float)
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def zero(cls, dim: int) -> "DiscreteMeasure":
        return cls(np.zeros((0, dim), dtype=complex), np.zeros(0))

    @classmethod
    def point_mass(cls, u, weight: float = 1.0) -> "DiscreteMeasure":
        return cls(np.asarray(u, dtype=complex)[None, :], np.array([weight]))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def total_mass(self):
        return self.weights.sum()

    def is_positive(self) -> bool:
        return not self.allow_complex and bool(np.all(self.weights >= 0))

    def on_sphere(self, tol: float = SPHERE_TOL) -> bool:
        if len(self) == 0:
            return True
        return bool(np.all(np.abs(np.linalg.norm(self.points, axis=1) - 1) <= tol))

    def require_sphere(self, tol: float = SPHERE_TOL) -> None:
        if not self.on_sphere(tol):
            raise OffSphereError("all atoms must lie on the unit sphere")

    def integrate(self, fn) -> complex:
        """``sum_k w_k fn(u_k)``; ``fn`` maps an ``(m, n)`` array to ``(m,)`` values."""
        if len(self) == 0:
            return 0.0
        return complex(np.dot(self.weights, fn(self.points)))

    def moment(self, alpha, beta=None) -> complex:
        """``int u^alpha conj(u)^beta dmu``."""
        beta = alpha if beta is None else beta
        a = np.asarray(alpha)
        b = np.asarray(beta)
        vals = np.prod(self.points**a * self.points.conj() ** b, axis=1)
        return complex(np.dot(self.weights, vals))

    def scaled(self, c: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.points, self.weights * c, self.allow_complex)

    def __add__(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return DiscreteMeasure(
            np.vstack([self.points, other.points]),
            np.concatenate([self.weights, other.weights]),
            self.allow_complex or other.allow_complex,
        )


# quadrature


@lru_cache(maxsize=None)
def simplex_rule(dim: int, deg: int) -> tuple[np.ndarray, np.ndarray]:
    """Positive rule on ``{x >= 0, sum x <= 1}`` in R^dim exact to total degree ``deg``.

    Collapsed (Duffy) coordinates ``x_k = y_k prod_{j<k} (1 - y_j)`` turn the
    simplex into the unit cube with Jacobian ``prod_k (1 - y_k)^(dim - k)``;
    each cube axis gets a Gauss-Legendre rule of sufficient order.  Weights sum
    to ``1/dim!``.
    """
    if dim == 0:
        return np.zeros((1, 0)), np.ones(1)
    axes = []
    for k in range(1, dim + 1):
        m = (deg + (dim - k)) // 2 + 1
        x, w = np.polynomial.legendre.leggauss(m)
        y = (x + 1) / 2
        axes.append((y, w / 2 * (1 - y) ** (dim - k)))
    nodes, weights = [], []
    for combo in itertools.product(*[range(len(a[0])) for a in axes]):
        ys = [axes[k][0][i] for k, i in enumerate(combo)]
        wt = math.prod(axes[k][1][i] for k, i in enumerate(combo))
        xs, rest = [], 1.0
        for y in ys:
            xs.append(rest * y)
            rest *= 1 - y
        nodes.append(xs)
        weights.append(wt)
    return np.array(nodes), np.array(weights)


def sphere_quadrature(n: int, D: int) -> DiscreteMeasure:
    """Positive rule for normalized surface measure on the sphere in C^n.

    Exact for every ``int u^a conj(u)^b dsigma`` with ``|a| + |b| <= 2D + 2``
    (one degree of headroom over ``2D``).  Built as a product of a simplex rule
    for ``(|u_1|^2, ..., |u_n|^2)``, which is uniformly distributed, and an
    equispaced grid of ``2D + 3`` phases per coordinate.
    """
    if n not in (2, 3):
        raise ValueError(f"sphere_quadrature supports n in {{2, 3}}, got {n}")
    if not 0 <= D <= 12:
        raise ValueError("sphere_quadrature supports 0 <= D <= 12")
    radial_deg = D + 1
    tn, tw = simplex_rule(n - 1, radial_deg)
    t = np.hstack([tn, 1 - tn.sum(axis=1, keepdims=True)])
    tw = tw * math.factorial(n - 1)
    M = 2 * D + 3
    phases = np.exp(2j * np.pi * np.arange(M) / M)
    angle_grid = np.array(list(itertools.product(phases, repeat=n)))
    mod = np.sqrt(np.clip(t, 0, None))
    pts = (mod[:, None, :] * angle_grid[None, :, :]).reshape(-1, n)
    wts = np.repeat(tw, len(angle_grid)) / len(angle_grid)
    keep = wts > 0
    return DiscreteMeasure(pts[keep], wts[keep])


# sampling


def random_sphere_points(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    g = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def random_ball_points(
    rng: np.random.Generator, m: int, n: int, radius: float = 1.0
) -> np.ndarray:
    """Uniform points in the ball of the given radius in C^n = R^{2n}."""
    u = random_sphere_points(rng, m, n)
    r = rng.random(m) ** (1 / (2 * n))
    return radius * r[:, None] * u


def random_sphere_measure(
    rng: np.random.Generator, n: int, max_atoms: int = 8, min_atoms: int = 1
) -> DiscreteMeasure:
    k = int(rng.integers(min_atoms, max_atoms + 1))
    return DiscreteMeasure(random_sphere_points(rng, k, n), rng.random(k) + 0.05)


def _sobol(m: int, d: int, seed: int) -> np.ndarray:
    from scipy.stats import qmc

    eng = qmc.Sobol(d, scramble=True, seed=seed)
    pts = eng.random_base2(max(0, math.ceil(math.log2(max(m, 1)))))[:m]
    return np.clip(pts, 1e-12, 1 - 1e-12)


def quasi_random_sphere_points(m: int, n: int, seed: int = 0x5EED) -> np.ndarray:
    from scipy.stats import norm

    g = norm.ppf(_sobol(m, 2 * n, seed))
    z = g[:, :n] + 1j * g[:, n:]
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def quasi_random_ball_points(m: int, n: int, seed: int = 0x5EED) -> np.ndarray:
    """Scrambled-Sobol points, uniformly distributed in the open unit ball."""
    from scipy.stats import norm

    s = _sobol(m, 2 * n + 1, seed)
    g = norm.ppf(s[:, : 2 * n])
    z = g[:, :n] + 1j * g[:, n:]
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z * s[:, -1:] ** (1 / (2 * n))
