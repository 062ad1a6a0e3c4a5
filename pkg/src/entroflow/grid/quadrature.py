"""
Quadrature on cell-centered grids.

Cell values are integrated with the composite midpoint rule, which is what the
trapezoid rule reduces to for cell-averaged data. Boundary integrals use the
face values extrapolated from the adjacent cell layers.
"""

import numpy as np

from ..errors import FaceClassificationError
from .domain import Domain, Face, FaceKind
from .field import Field, VectorField
from .operators import face_values


def integrate(f: Field) -> float:
    return float(np.sum(f.values) * f.domain.cell_volume)


def _face_measure(domain: Domain, face: Face) -> float:
    """(d-1)-dimensional measure of one cell on the face."""
    others = [domain.spacing[k] for k in range(domain.d) if k != face.axis]
    return float(np.prod(others)) if others else 1.0


def integrate_on_face(values: np.ndarray, domain: Domain, face: Face) -> float:
    """Integrate face data (one value per face cell) over the face."""
    return float(np.sum(values) * _face_measure(domain, face))


def trace_integrate(f: Field, face: Face) -> float:
    """Integral of the trace of f over a true-boundary face."""
    if f.domain.face_kind(face) != FaceKind.TRUE_BOUNDARY:
        msg = f"Face {face} is a truncation face; it carries no trace."
        raise FaceClassificationError(msg)
    return integrate_on_face(face_values(f, face), f.domain, face)


def boundary_integral(f: Field) -> float:
    """Integral of f over every face of the box, truncation faces included."""
    return sum(integrate_on_face(face_values(f, face), f.domain, face) for face in f.domain.faces())


def boundary_flux(F: VectorField) -> float:
    """Outward flux of F through the whole box boundary."""
    total = 0.0
    for face in F.domain.faces():
        normal_component = face.sign * face_values(F[face.axis], face)
        total += integrate_on_face(normal_component, F.domain, face)
    return total
