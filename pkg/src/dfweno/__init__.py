"""dfweno: hybrid discontinuity-feedback / WENO-AO finite-volume Euler solver."""

__version__ = "0.1.0"

from .state import (  # noqa: F401
    NG,
    ConservedState,
    Field1D,
    Field2D,
    GammaModel,
    Mesh1D,
    Mesh2D,
    PrimitiveState,
    conserved_to_primitive,
    primitive_to_conserved,
)
