"""Exact solvers for the colored path problem on color-connected graphs."""

from .graph import (
    ColoredGraph,
    ContractionTrace,
    InstanceError,
    NotColorConnected,
    chi_of_path,
    color_contract,
    is_color_connected,
    lift_path,
    normalize_st,
    reduce_to_irreducible,
    validate_instance,
)
from .repset import Solution, solve_colored_path

__version__ = "0.1.0"

__all__ = [
    "ColoredGraph",
    "ContractionTrace",
    "InstanceError",
    "NotColorConnected",
    "Solution",
    "chi_of_path",
    "color_contract",
    "is_color_connected",
    "lift_path",
    "normalize_st",
    "reduce_to_irreducible",
    "solve_colored_path",
    "validate_instance",
]
