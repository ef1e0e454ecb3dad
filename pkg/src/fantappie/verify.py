"""Named verification suites, one per acceptance criterion.

Each suite returns a :class:`SuiteResult` whose checks carry the identity
they exercise, the computed evidence and the tolerance applied.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import cones, funcalc, restriction
from .measures import (
    DiscreteMeasure,
    quasi_random_ball_points,
    random_ball_points,
    random_sphere_measure,
    sphere_quadrature,
)
from .mindex import enumerate_upto
from .series import (
    Space,
    TruncatedSeries,
    cayley,
    evaluate,
    inner_product,
    monomial_norm_sq,
    multiplier_lower_bound,
)
from .transforms import (
    euler_operator,
    fantappie_operator,
    fantappie_series,
    gamma_operator,
    general_lambda_gamma,
    hardy_euler_operator,
    herglotz_measure,
    herglotz_measure_series,
    lambda_operator,
    sphere_moment,
    szego_herglotz_measure,
)

log = logging.getLogger(__name__)

__all__ = ["Check", "SuiteResult", "SUITES", "run_suite", "drury_counterexample_q"]

DEFAULT_SEED = 0x5EED


@dataclass
class Check:
    name: str
    anchor: str
    passed: bool
    values: dict = field(default_factory=dict)
    tolerance: float | None = None


@dataclass
class SuiteResult:
    name: str
    parameters: dict
    checks: list[Check]
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _random_complex_series(rng: np.random.Generator, n: int, D: int) -> TruncatedSeries:
    return TruncatedSeries.from_function(
        lambda a: complex(rng.standard_normal(), rng.standard_normal()), n, D
    )


# 1


def diagonal_identities(n_values=(1, 2, 3, 4), degree: int = 12) -> list[Check]:
    checks = []
    for n in n_values:
        idx = enumerate_upto(n, degree)
        F, L, E = fantappie_operator(n), euler_operator(n), hardy_euler_operator(n)
        lam, gam = lambda_operator(n), gamma_operator(n)
        bad_lf = sum((L @ F).eigenvalue(a) != 1 for a in idx)
        bad_gl = sum((gam @ lam).eigenvalue(a) != 1 or (lam @ gam).eigenvalue(a) != 1 for a in idx)
        # Szego coefficient (|a|+n-1)!/(|a|! (n-1)!) as an independent oracle
        bad_e = sum(
            E.eigenvalue(a)
            != Fraction(math.factorial(sum(a) + n - 1), math.factorial(sum(a)) * math.factorial(n - 1))
            for a in idx
        )
        # the same identities applied to a series with exact coefficients
        f = TruncatedSeries.from_function(lambda a: Fraction(1 + sum(a), 1 + a[0]), n, degree)
        series_err = max(
            L(F(f)).max_abs_difference(f),
            gam(lam(f)).max_abs_difference(f),
            lam(gam(f)).max_abs_difference(f),
        )
        checks.append(
            Check(
                f"n={n}",
                "Euler operator inverts the Fantappie transform; Gamma inverts Lambda; Hardy Euler eigenvalues",
                bad_lf == 0 and bad_gl == 0 and bad_e == 0 and series_err == 0,
                {"monomials": len(idx), "LF_errors": bad_lf, "GammaLambda_errors": bad_gl,
                 "E_errors": bad_e, "series_max_error": float(series_err)},
                0.0,
            )
        )
    return checks


# 2


def adjoint(pairs: int = 100, n_values=(2, 3), degree: int = 8, seed: int = DEFAULT_SEED,
            tol: float = 1e-10) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(pairs):
        n = n_values[k % len(n_values)]
        f = _random_complex_series(rng, n, degree)
        g = _random_complex_series(rng, n, degree)
        lhs = inner_product(Space.DRURY, fantappie_series(f), g)
        rhs = inner_product(Space.BERGMAN, f, g)
        worst = max(worst, abs(complex(lhs) - complex(rhs)))
    return [Check("drury-bergman adjoint", "<F f, g>_Drury = <f, g>_Bergman", worst <= tol,
                  {"pairs": pairs, "max_abs_error": worst}, tol)]


# 3


def norm_chain(n_max: int = 4, degree: int = 12) -> list[Check]:
    bad = 0
    count = 0
    for n in range(1, n_max + 1):
        for a in enumerate_upto(n, degree):
            h = monomial_norm_sq(Space.DRURY, a)
            h2 = monomial_norm_sq(Space.HARDY, a)
            a2 = monomial_norm_sq(Space.BERGMAN, a)
            count += 1
            bad += not (h >= h2 >= a2)
    return [Check("monomial norm chain", "||.||_Drury >= ||.||_Hardy >= ||.||_Bergman",
                  bad == 0, {"monomials": count, "violations": bad}, 0.0)]


# 4


def drury_counterexample_q(n: int, exact: bool = True) -> TruncatedSeries:
    """``sqrt(n^n) z_1 ... z_n``; ``exact`` stores the coefficient as int or Fraction.

    Exact coefficients let high-degree Cayley transforms avoid float overflow.
    """
    c = math.sqrt(n**n)
    if exact:
        c = n ** (n // 2) if n % 2 == 0 else Fraction(c)
    return TruncatedSeries(n, n, {(1,) * n: c})


def drury_counterexample(n_values=(2, 3, 4, 5, 6), points: int = 10_000, seed: int = DEFAULT_SEED,
                         tol: float = 1e-12) -> list[Check]:
    checks = []
    for n in n_values:
        q = drury_counterexample_q(n, exact=False)
        one = TruncatedSeries.constant(1.0, n)
        bound = multiplier_lower_bound(q, one)
        expected = math.sqrt(n**n / math.factorial(n))
        checks.append(Check(f"multiplier bound n={n}", "||q 1||_Drury / ||1||_Drury exceeds the sup norm 1",
                            abs(bound - expected) <= tol and bound > 1,
                            {"bound": bound, "expected": expected}, tol))
        P = quasi_random_ball_points(points, n, seed)
        qe = drury_counterexample_q(n)
        rho = float(np.abs(evaluate(qe, P)).max())
        D = cones.cayley_tail_degree(rho, n)
        rep = cones.op_positivity_sample(cayley(qe.with_max_degree(D)), P)
        checks.append(Check(f"positive real part n={n}", "Re (1+q)/(1-q) >= 0 on sampled ball points",
                            rep.passed, {"min_real_part": rep.min_eigenvalue, "max_abs_q": rho,
                                         "truncation_degree": D, "points": points}, 1e-12))
    return checks


# 5


EXAMPLE_NILPOTENT = np.array([[0, math.sqrt(2)], [0, 0]], dtype=complex)


def eqi8(m_max: int = 8, binom_max: int = 15, tol: float = 1e-12) -> list[Check]:
    checks = []
    A = EXAMPLE_NILPOTENT
    for m in range(1, m_max + 1):
        rep = funcalc.check_nilpotent_word_bound(m, A)
        expected = 2**m / math.comb(2 * m, m)
        err = float(np.abs(rep.matrix - expected * np.eye(2)).max())
        checks.append(Check(f"m={m}", "(z1^m z2^m)_s(A, A*) = 2^m / C(2m, m) I and is below (2m+1)/2^(m-1)",
                            err <= tol and rep.passed,
                            {"value": rep.value, "expected": expected, "max_entry_error": err,
                             "bound": float(rep.bound)}, tol))
    bad = [m for m in range(1, binom_max + 1) if not funcalc.central_binomial_inequality(m)]
    checks.append(Check("central binomial inequality", "C(2m, m) >= 2^(2m-1)/(2m+1) over the integers",
                        not bad, {"m_max": binom_max, "violations": bad}, 0.0))
    return checks


# 6


def bound_sweep(trials: int = 200, matrix_trials: int = 50, seed: int = DEFAULT_SEED,
                max_degree: int = 4, eps: float = 1e-6) -> list[Check]:
    rng = np.random.default_rng(seed)

    def run(count: int, matrix: bool):
        violations, min_slack, witnesses = 0, math.inf, []
        for _ in range(count):
            n = int(rng.integers(2, 4))
            d = int(rng.integers(2, 6))
            T = funcalc.scale_to_ball(funcalc.OperatorTuple.random(rng, n, d))
            deg = int(rng.integers(0, max_degree + 1))
            if matrix:
                p = funcalc.MatrixPolynomial.random(rng, n, deg, (2, 2))
            else:
                p = funcalc.random_polynomial(rng, n, deg)
            rep = funcalc.verify_calculus_bound(T, p, eps=eps, assume_scaled=True, seed=seed)
            min_slack = min(min_slack, rep.slack)
            if not rep.passed:
                violations += 1
                witnesses.append(rep.witness)
        return violations, min_slack, witnesses

    v1, s1, w1 = run(trials, False)
    v2, s2, w2 = run(matrix_trials, True)
    anchor = "||p_s(T)|| <= sup over the ball of ||Gamma p|| when the joint numerical range lies in the ball"
    return [
        Check("scalar polynomials", anchor, v1 == 0,
              {"trials": trials, "violations": v1, "min_relative_slack": s1, "witnesses": w1}, eps),
        Check("2x2 matrix polynomials", anchor, v2 == 0,
              {"trials": matrix_trials, "violations": v2, "min_relative_slack": s2, "witnesses": w2}, eps),
    ]


# 7


def n1_collapse(trials: int = 50, max_degree: int = 6, seed: int = DEFAULT_SEED,
                eps: float = 1e-6) -> list[Check]:
    rng = np.random.default_rng(seed)
    violations, chain_violations, min_slack = 0, 0, math.inf
    for _ in range(trials):
        d = int(rng.integers(2, 6))
        A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        A = A / funcalc.numerical_radius(A).upper_bound
        p = funcalc.random_polynomial(rng, 1, int(rng.integers(0, max_degree + 1)))
        lhs = float(np.linalg.norm(funcalc.sym_poly(funcalc.OperatorTuple((A,)), p), 2))
        two_p = p * 2 - complex(p.constant_term)
        rhs = funcalc.sup_norm_ball(two_p, effort=4, seed=seed)
        sup_p = funcalc.sup_norm_ball(p, effort=4, seed=seed)
        violations += lhs > rhs * (1 + eps)
        chain_violations += rhs > 3 * sup_p * (1 + eps)
        if rhs > 0:
            min_slack = min(min_slack, (rhs - lhs) / rhs)
    return [
        Check("single operator bound", "||p(T)|| <= ||2p - p(0)|| on the closed disc when w(T) <= 1",
              violations == 0, {"trials": trials, "violations": violations, "min_relative_slack": min_slack}, eps),
        Check("disc chain", "||2p - p(0)|| <= 3 ||p|| on the closed disc", chain_violations == 0,
              {"trials": trials, "violations": chain_violations}, eps),
    ]


# 8


def schur_inclusion(measures: int = 100, point_sets: int = 100, points: int = 20, n: int = 2,
                    radius: float = 0.7, seed: int = DEFAULT_SEED, tol: float = 1e-8) -> list[Check]:
    """Points come from the ball of the given radius; the truncation degree keeps
    the Herglotz tail ``2 mass r^(D+1)/(1-r)`` below 1e-13 relative to the mass."""
    rng = np.random.default_rng(seed)
    D = math.ceil(math.log(1e-13 * (1 - radius) / 2) / math.log(radius))
    worst = math.inf
    for _ in range(measures):
        mu = random_sphere_measure(rng, n, max_atoms=8)
        f = herglotz_measure_series(mu, D)
        pts = random_ball_points(rng, point_sets * points, n, radius)
        vals = evaluate(f, pts)
        for k in range(point_sets):
            sl = slice(k * points, (k + 1) * points)
            rep = cones.psd_check(cones.schur_gram_from_values(vals[sl], pts[sl]), tol)
            worst = min(worst, rep.min_eigenvalue)
    return [Check("Herglotz transforms are in the positive Schur class",
                  "(f(z) + conj f(w)) / (1 - <z, w>) is positive semidefinite for f a Herglotz transform",
                  worst >= -tol, {"gram_matrices": measures * point_sets, "truncation_degree": D,
                                  "radius": radius, "min_eigenvalue": worst}, tol)]


# 9


def kp(D: int = 6, tol: float = 1e-12) -> list[Check]:
    rep = cones.kp_annihilation_check(sphere_quadrature(2, D), D, tol)
    atom = DiscreteMeasure.point_mass([1, 0])
    values = {(fam, a, b, j): v for fam, a, b, j, v in cones.kp_family_values(atom, D)}
    predicted = values[(2, (0, 0), (0, 0), 1)]
    atom_rep = cones.kp_annihilation_check(atom, D, tol)
    anchor = "surface measure annihilates the pluriharmonic moment families"
    return [
        Check("sphere quadrature", anchor, rep.passed, {"max_abs": rep.detail["max_abs"],
                                                         "conditions": rep.detail["conditions"]}, tol),
        Check("single atom", anchor, (not atom_rep.passed) and abs(predicted - 1) <= tol,
              {"verdict": atom_rep.verdict, "family2_alpha0_beta0_j2": predicted}, tol),
    ]


# 10


def realization(measures: int = 20, points: int = 50, degree: int = 8, seed: int = DEFAULT_SEED,
                tol: float = 1e-12, link_tol: float = 1e-10) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    link = 0.0
    for k in range(measures):
        n = 2 + k % 2
        mu = random_sphere_measure(rng, n, max_atoms=10)
        R = cones.normal_realization(mu)
        pts = random_ball_points(rng, points, n, 0.9)
        vals = np.array([cones.realization_eval(R, z) for z in pts])
        worst = max(worst, float(np.abs(vals - herglotz_measure(mu, pts)).max()))
        link = max(link, cones.mharmonic_link_check(mu, degree, link_tol).detail["max_deviation"])
    e1 = DiscreteMeasure.point_mass([1, 0])
    link = max(link, cones.mharmonic_link_check(e1, degree, link_tol).detail["max_deviation"])
    return [
        Check("diagonal realization", "normal tuple of coordinate multipliers realizes the Herglotz transform",
              worst <= tol, {"measures": measures, "points": points, "max_abs_error": worst}, tol),
        Check("M-harmonic link", "E[f + conj f(0)] = 2 v(., 0) coefficientwise", link <= link_tol,
              {"degree": degree, "max_deviation": link}, link_tol),
    ]


# 11


def spectra(degree: int = 8, series_trials: int = 5, seed: int = DEFAULT_SEED, tol: float = 1e-8,
            iso_tol: float = 1e-10) -> list[Check]:
    rng = np.random.default_rng(seed)
    domains = [restriction.ReinhardtDomain.scaled_ball(r, n) for n in (2, 3) for r in (0.3, 0.5, 0.9)]
    domains += [restriction.ReinhardtDomain.ellipsoid((0.4, 0.8)),
                restriction.ReinhardtDomain.ellipsoid((0.3, 0.6, 0.9))]
    checks = []
    for dom in domains:
        rows = restriction.spectra_table(dom, degree)
        rel = max(r[3] for r in rows)
        off = max(restriction.verify_fant_diag(dom, a, D=degree).max_off_diagonal
                  for a in enumerate_upto(dom.dim, min(degree, 3)))
        iso = 0.0
        for _ in range(series_trials):
            f = _random_complex_series(rng, dom.dim, degree)
            iso = max(iso, restriction.gelfand_isometry_check(dom, f).relative_deviation)
        label = f"{dom.kind}{tuple(float(r) for r in dom.radii)}"
        checks.append(Check(label, "monomials diagonalize the restriction operator; F is an isometry onto the polar space",
                            rel <= tol and off <= iso_tol and iso <= iso_tol,
                            {"max_relative_error": rel, "max_off_diagonal": off, "isometry_deviation": iso}, tol))
    return checks


# 12


def general_domain(n_values=(2, 3), degree: int = 10) -> list[Check]:
    checks = []
    for n in n_values:
        idx = enumerate_upto(n, degree)
        lam_w, gam_w = general_lambda_gamma({a: sphere_moment(a) for a in idx}, n)
        lam, gam = lambda_operator(n), gamma_operator(n)
        bad = sum(lam_w.eigenvalue(a) != lam.eigenvalue(a) or gam_w.eigenvalue(a) != gam.eigenvalue(a)
                  for a in idx)
        checks.append(Check(f"n={n}", "Lambda/Gamma from boundary moments reduce to the ball operators",
                            bad == 0, {"monomials": len(idx), "mismatches": bad}, 0.0))
    return checks


# 13


def f2_realization(measures: int = 30, points: int = 50, seed: int = DEFAULT_SEED,
                   tol: float = 1e-8) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    defect = 0.0
    for k in range(measures):
        n = 2 + k % 2
        mu = random_sphere_measure(rng, n, max_atoms=3)
        t = float(rng.standard_normal())
        R = cones.build_f2_realization(mu, t)
        pts = random_ball_points(rng, points, n, 0.9)
        vals = np.array([cones.realization_eval(R, z) for z in pts])
        worst = max(worst, float(np.abs(vals - szego_herglotz_measure(mu, t, pts)).max()))
        defect = max(defect, R.info["gram_defect"])
    e1 = DiscreteMeasure.point_mass([1, 0])
    R = cones.build_f2_realization(e1)
    pts = random_ball_points(rng, points, 2, 0.9)
    e1_err = max(abs(cones.realization_eval(R, z) - (2 * (1 - z[0]) ** -2 - 1)) for z in pts)
    R0 = cones.build_f2_realization(DiscreteMeasure.zero(2), 0.5)
    zero_err = abs(cones.realization_eval(R0, pts[0]) - 0.5j)
    anchor = "odd-degree transfer-function realization of sum w_k (2 S(z, u_k) - 1) + i t"
    return [
        Check("random measures", anchor, worst <= tol,
              {"measures": measures, "points": points, "max_abs_error": worst,
               "max_gram_defect": defect}, tol),
        Check("single atom", anchor, e1_err <= tol and zero_err <= tol,
              {"atom_error": e1_err, "zero_measure_error": zero_err}, tol),
    ]


SUITES: dict[str, Callable[..., list[Check]]] = {
    "diagonal-identities": diagonal_identities,
    "adjoint": adjoint,
    "norm-chain": norm_chain,
    "drury-counterexample": drury_counterexample,
    "eqi8": eqi8,
    "bound-sweep": bound_sweep,
    "n1-collapse": n1_collapse,
    "schur-inclusion": schur_inclusion,
    "kp": kp,
    "realization": realization,
    "spectra": spectra,
    "general-domain": general_domain,
    "f2-realization": f2_realization,
}


def run_suite(name: str, **overrides: Any) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    fn = SUITES[name]
    start = time.perf_counter()
    checks = fn(**overrides)
    elapsed = time.perf_counter() - start
    log.info("suite %s finished in %.2fs", name, elapsed)
    return SuiteResult(name, dict(overrides), checks, elapsed)
