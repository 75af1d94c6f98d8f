"""Exact scalars, the LP kernel and polyhedral primitives."""

from .geometry import (
    MAX_ENUM_DIM,
    DimensionCapError,
    EmptyPolytope,
    EmptySetError,
    PolyCone,
    Polytope,
    cone_inequalities,
    cone_membership,
    cone_rays_from_inequalities,
    hull_membership,
    hull_membership_lp,
    polytope_inequalities,
    polytope_vertices_from_inequalities,
    same_cone,
    same_polytope,
)
from .lp import Constraint, LPError, LPResult, eq, geq, leq, lp_solve, verify_farkas
from .scalars import BOTTOM, TOP, ExtScalar, LexScalar, Q, ext_inf, ext_sup, fmt_q, qvec, std_part

__all__ = [
    "BOTTOM", "TOP", "Constraint", "DimensionCapError", "EmptyPolytope", "EmptySetError",
    "ExtScalar", "LPError", "LPResult", "LexScalar", "MAX_ENUM_DIM", "PolyCone", "Polytope",
    "Q", "cone_inequalities", "cone_membership", "cone_rays_from_inequalities", "eq",
    "ext_inf", "ext_sup", "fmt_q", "geq", "hull_membership", "hull_membership_lp", "leq",
    "lp_solve", "polytope_inequalities", "polytope_vertices_from_inequalities", "qvec",
    "same_cone", "same_polytope", "std_part", "verify_farkas",
]
