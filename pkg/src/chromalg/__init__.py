"""Exact formal group law and co-operation algebra computations in characteristic p."""
from .coeff_ring import CoeffElement, Generator, Ring, RingSpec, ring_make
from .coop_algebra import (
    CoopAlgebra, CoopElement, RelationSet, additive_loop_height, derive_relations,
    hopf_quotient_check, rw_lhs, rw_rhs, unstable_height_bounds,
)
from .fgl import (
    FormalGroupLaw, PSeriesData, fgl_additive, fgl_honda, fgl_kn, fgl_multiplicative, make_law,
)
from .kernels import backend
from .power_series import PrecisionError, Series
from .split_deloop import (
    IdempotentS, StableClass, deloop_component, deloop_normalize, destabilise, split_project,
    verify_idempotent, view_convert,
)

__version__ = "0.1.0"

__all__ = [
    "CoeffElement", "CoopAlgebra", "CoopElement", "FormalGroupLaw", "Generator", "IdempotentS",
    "PSeriesData", "PrecisionError", "RelationSet", "Ring", "RingSpec", "Series", "StableClass",
    "additive_loop_height", "backend", "deloop_component", "deloop_normalize", "derive_relations",
    "destabilise", "fgl_additive", "fgl_honda", "fgl_kn", "fgl_multiplicative",
    "hopf_quotient_check", "make_law", "ring_make", "rw_lhs", "rw_rhs", "split_project",
    "unstable_height_bounds", "verify_idempotent", "view_convert",
]
