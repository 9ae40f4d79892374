"""1D fluctuating Navier-Stokes finite-volume schemes with a DSMC cross-check."""

__version__ = "0.1.0"

from .gas import (
    KB,
    CellField,
    ConservedState,
    GasSpec,
    GridSpec,
    PrimitiveState,
    conserved_from_primitive,
    max_stable_dt,
    primitive,
    primitive_from_conserved,
    transport_coefficients,
    uniform_field,
)

__all__ = [
    "KB",
    "CellField",
    "ConservedState",
    "GasSpec",
    "GridSpec",
    "PrimitiveState",
    "conserved_from_primitive",
    "max_stable_dt",
    "primitive",
    "primitive_from_conserved",
    "transport_coefficients",
    "uniform_field",
    "__version__",
]
