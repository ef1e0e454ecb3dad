"""Fantappie transforms, positivity cones and symmetrized functional calculus on the ball."""

from .measures import DiscreteMeasure, sphere_quadrature
from .mindex import enumerate_upto
from .series import Space, TruncatedSeries, cayley, evaluate, inner_product, norm, q_form
from .transforms import (
    fantappie_series,
    gamma_op,
    herglotz_measure,
    lambda_op,
    szego_herglotz_measure,
)
from .funcalc import OperatorTuple, joint_num_radius, numerical_radius, sym_monomial, sym_poly
from .restriction import ReinhardtDomain, restriction_eigenvalue

__version__ = "0.1.0"

__all__ = [
    "DiscreteMeasure",
    "OperatorTuple",
    "ReinhardtDomain",
    "Space",
    "TruncatedSeries",
    "cayley",
    "enumerate_upto",
    "evaluate",
    "fantappie_series",
    "gamma_op",
    "herglotz_measure",
    "inner_product",
    "joint_num_radius",
    "lambda_op",
    "norm",
    "numerical_radius",
    "q_form",
    "restriction_eigenvalue",
    "sphere_quadrature",
    "sym_monomial",
    "sym_poly",
    "szego_herglotz_measure",
]
