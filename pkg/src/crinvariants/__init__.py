"""Exact pointwise invariants of real hypersurfaces in C^n: Levi form, cubic and
quartic tensors, normal forms, type and multitype, boundary-system steps."""

__version__ = "0.1.0"

from .exact import GaussianRational, ExactMatrix, gr
from .poly import PolyExpr, ambient_ring, graph_ring, vector_ring
from .geometry import Hypersurface, VectorField, lie_bracket, contact_form
from .normal_form import cubic_normal_form, quartic_normal_form
from .tensors import TensorLab, NormalFormTensors, symmetric_extension
from .invariants import (
    dangelo_type_le4,
    is_pseudoconvex_at,
    is_psh_quartic,
    kernel_coincidence_check,
    multitype_prefix,
    point_invariants,
)
from .boundary import BoundarySystemState, boundary_system_step, quartic_reduction_check
from .parser import HypersurfaceSpec, SpecError, parse_spec, load_spec
from .report import AnalysisConfig, analyze

__all__ = [
    "GaussianRational", "ExactMatrix", "gr", "PolyExpr", "ambient_ring", "graph_ring", "vector_ring",
    "Hypersurface", "VectorField", "lie_bracket", "contact_form", "cubic_normal_form",
    "quartic_normal_form", "TensorLab", "NormalFormTensors", "symmetric_extension", "dangelo_type_le4",
    "is_pseudoconvex_at", "is_psh_quartic", "kernel_coincidence_check", "multitype_prefix",
    "point_invariants", "BoundarySystemState", "boundary_system_step", "quartic_reduction_check",
    "HypersurfaceSpec", "SpecError", "parse_spec", "load_spec", "AnalysisConfig", "analyze",
]
