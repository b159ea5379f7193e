"""carbonlab: simulation, equilibria, stability, sensitivity and optimal
control for a coupled CO2 / GDP / forest / population system."""

from ._backend import backend_name
from .model import (
    BASELINE,
    COMPARTMENTS,
    PARAM_NAMES,
    ParameterError,
    Parameters,
    RegionBounds,
    UnboundedRegionError,
    compute_bounds,
    eval_jacobian,
    eval_rhs,
    relative_residual,
    validate_params,
)

__version__ = "0.1.0"

__all__ = [
    "BASELINE",
    "COMPARTMENTS",
    "PARAM_NAMES",
    "ParameterError",
    "Parameters",
    "RegionBounds",
    "UnboundedRegionError",
    "backend_name",
    "compute_bounds",
    "eval_jacobian",
    "eval_rhs",
    "relative_residual",
    "validate_params",
]
