"""Exact Hodge theory on exterior algebras, flat tori and cohomology rings."""
from .degeneration import IntersectionMatrix, PrimitiveLimitTrace, contractibility_check, primitive_limit
from .exterior import (
    ExteriorElement,
    MetricSpec,
    OrientationSpec,
    dual_metric,
    hodge_star,
    inner_product,
    volume_element,
    wedge,
)
from .hermitian import BigradedElement, HermitianForm, RealForm, complex_star, hermitian_inner, weil_apply
from .lefschetz import (
    GradedRing,
    HodgeStructureSlice,
    RingCertificationError,
    hard_lefschetz_check,
    hodge_diamond,
    hodge_riemann_check,
    load_ring,
    polarization_check,
    primitive_decompose,
    ring_builtin,
)
from .sparse import ExactSparse, backend_name
from .torus import FourierForm, hodge_decompose, kahler_identity_suite, laplacian, operator_block

BACKEND = backend_name()

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BigradedElement",
    "ExactSparse",
    "ExteriorElement",
    "FourierForm",
    "GradedRing",
    "HermitianForm",
    "HodgeStructureSlice",
    "IntersectionMatrix",
    "MetricSpec",
    "OrientationSpec",
    "PrimitiveLimitTrace",
    "RealForm",
    "RingCertificationError",
    "backend_name",
    "complex_star",
    "contractibility_check",
    "dual_metric",
    "hard_lefschetz_check",
    "hermitian_inner",
    "hodge_decompose",
    "hodge_diamond",
    "hodge_riemann_check",
    "hodge_star",
    "inner_product",
    "kahler_identity_suite",
    "laplacian",
    "load_ring",
    "operator_block",
    "polarization_check",
    "primitive_decompose",
    "primitive_limit",
    "ring_builtin",
    "volume_element",
    "wedge",
]
