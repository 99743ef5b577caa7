"""Exact vertex guarding of simple polygons, parameterized by the number of reflex vertices."""

from .csp import CspInstance, solve_csp
from .geom import Point, Polygon, load_polygon, sees, validate_polygon
from .oracle import brute_force
from .structured import Variant, certify, make_problem, solve, solve_bv, solve_vb

__all__ = [
    "CspInstance",
    "Point",
    "Polygon",
    "Variant",
    "brute_force",
    "certify",
    "load_polygon",
    "make_problem",
    "sees",
    "solve",
    "solve_bv",
    "solve_csp",
    "solve_vb",
    "validate_polygon",
]
