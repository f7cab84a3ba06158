"""Bergman and Beurling transforms, n-adic grids and periodisation."""

from .beltrami import (
    BeltramiCoefficient,
    boxed_coefficient,
    coefficient_from_json,
    constant_coefficient,
    damp_boundary,
    mu_from_bloch,
    periodize,
    splice_outside_ball,
)
from .grids import NAdicBox, box_area_quadrature, box_containing, box_indices, boundary_distance, collar_ratio
from .operators import (
    bergman_project,
    beurling_derivative,
    beurling_modified,
    beurling_quotient,
    box_average,
    locality_gap,
)

__all__ = [
    "BeltramiCoefficient",
    "NAdicBox",
    "bergman_project",
    "beurling_derivative",
    "beurling_modified",
    "beurling_quotient",
    "box_area_quadrature",
    "box_average",
    "box_containing",
    "box_indices",
    "boundary_distance",
    "boxed_coefficient",
    "coefficient_from_json",
    "collar_ratio",
    "constant_coefficient",
    "damp_boundary",
    "locality_gap",
    "mu_from_bloch",
    "periodize",
    "splice_outside_ball",
]
