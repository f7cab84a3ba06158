"""Interval arithmetic and hyperbolic geometry primitives."""

from .expr import interval_eval
from .hyperbolic import (
    DISK,
    HALF_PLANE,
    HyperbolicPoint,
    ball_points,
    bloch_quotient,
    cayley,
    density,
    disk_automorphism,
    disk_to_half_plane,
    distance,
    euclidean_radius,
    hyperbolic_area_disk,
    hyperbolic_radius,
    inverse_cayley,
    quotient_values,
)
from .interval import Interval, get_precision, interval_max, interval_min, isum, set_precision, working_precision
