"""
Cell-centered grids on truncated convex boxes, the Gamma-calculus on them, and
the quadrature used by every other module.
"""

from .checks import (
    CheckReport,
    check_bochner_integral_identity,
    check_cd_condition,
    check_gamma2_forms,
    check_hessian_gamma_identity,
    check_integration_by_parts,
)
from .domain import Domain, Face, FaceKind
from .field import Field, VectorField
from .operators import (
    divergence,
    face_values,
    gamma,
    gamma2,
    gamma2_bochner,
    gradient,
    hessian,
    hessian_form,
    interior_mask,
    laplacian,
    normal_derivative,
)
from .quadrature import (
    boundary_flux,
    boundary_integral,
    integrate,
    integrate_on_face,
    trace_integrate,
)

__all__ = [
    "CheckReport",
    "Domain",
    "Face",
    "FaceKind",
    "Field",
    "VectorField",
    "boundary_flux",
    "boundary_integral",
    "check_bochner_integral_identity",
    "check_cd_condition",
    "check_gamma2_forms",
    "check_hessian_gamma_identity",
    "check_integration_by_parts",
    "divergence",
    "face_values",
    "gamma",
    "gamma2",
    "gamma2_bochner",
    "gradient",
    "hessian",
    "hessian_form",
    "integrate",
    "integrate_on_face",
    "interior_mask",
    "laplacian",
    "normal_derivative",
    "trace_integrate",
]
