"""
Finite-difference calculus on cell-centered grids.

First derivatives are second-order centered differences with second-order
one-sided differences in the boundary cells (`numpy.gradient`, edge_order=2).
Pure second derivatives use the three-point stencil inside and a four-point
one-sided stencil in the boundary cells; mixed derivatives compose first
derivatives. The Laplacian is the trace of this discrete Hessian, so that
Gamma_2(a) - (Delta a)^2 / d is a discrete Cauchy-Schwarz gap and never
negative beyond roundoff.
"""

import typing

import numpy as np

from ..errors import DimensionMismatch, ParameterOutOfRange
from .domain import Domain, Face
from .field import Field, VectorField

MIN_CELLS = 4


def _require_cells(domain: Domain) -> None:
    if min(domain.cells) < MIN_CELLS:
        msg = f"Differential operators need at least {MIN_CELLS} cells per axis, got {domain.cells}."
        raise ParameterOutOfRange(msg)


def _same_grid(*fields: Field) -> Domain:
    domain = fields[0].domain
    for f in fields[1:]:
        if not domain.same_grid(f.domain):
            msg = "Operands live on different grids."
            raise DimensionMismatch(msg)
    return domain


def _d1(values: np.ndarray, step: float, axis: int) -> np.ndarray:
    return np.gradient(values, step, axis=axis, edge_order=2)


def _d2(values: np.ndarray, step: float, axis: int) -> np.ndarray:
    f = np.moveaxis(values, axis, 0)
    out = np.empty_like(f)
    out[1:-1] = f[2:] - 2.0 * f[1:-1] + f[:-2]
    out[0] = 2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]
    out[-1] = 2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]
    return np.moveaxis(out / step**2, 0, axis)


def gradient(f: Field) -> VectorField:
    domain = f.domain
    _require_cells(domain)
    comps = [_d1(f.values, domain.spacing[k], k) for k in range(domain.d)]
    return VectorField(domain, np.stack(comps))


def divergence(F: VectorField) -> Field:
    domain = F.domain
    _require_cells(domain)
    total = np.zeros(domain.shape)
    for k in range(domain.d):
        total += _d1(F.components[k], domain.spacing[k], k)
    return Field(domain, total)


def hessian(f: Field) -> np.ndarray:
    """Discrete Hessian as an array of shape (d, d) + cells."""
    domain = f.domain
    _require_cells(domain)
    d = domain.d
    out = np.empty((d, d, *domain.shape))
    first = [_d1(f.values, domain.spacing[k], k) for k in range(d)]
    for i in range(d):
        out[i, i] = _d2(f.values, domain.spacing[i], i)
        for j in range(i + 1, d):
            out[i, j] = out[j, i] = _d1(first[i], domain.spacing[j], j)
    return out


def laplacian(f: Field) -> Field:
    return Field(f.domain, np.trace(hessian(f)))


def gamma(a: Field, b: Field) -> Field:
    """Carre du champ: Gamma(a, b) = grad a . grad b."""
    _same_grid(a, b)
    if a is b:
        return gradient(a).norm2()
    return gradient(a).dot(gradient(b))


def gamma2(a: Field, b: Field) -> Field:
    """Iterated carre du champ in Hessian form, tr((D^2 a)^T D^2 b)."""
    domain = _same_grid(a, b)
    ha = hessian(a)
    hb = ha if a is b else hessian(b)
    return Field(domain, np.einsum("ij...,ij...->...", ha, hb))


def gamma2_bochner(a: Field, b: Field) -> Field:
    """Defining form 1/2 (Delta Gamma(a,b) - Gamma(a, Delta b) - Gamma(b, Delta a))."""
    _same_grid(a, b)
    return 0.5 * (
        laplacian(gamma(a, b)) - gamma(a, laplacian(b)) - gamma(b, laplacian(a))
    )


def hessian_form(f: Field, g: Field, h: Field) -> Field:
    """D^2 f (grad g, grad h)."""
    domain = _same_grid(f, g, h)
    hf = hessian(f)
    gg = gradient(g).components
    gh = gg if g is h else gradient(h).components
    return Field(domain, np.einsum("ij...,i...,j...->...", hf, gg, gh))


def face_values(f: Field, face: Face) -> np.ndarray:
    """Third-order extrapolation of f from the adjacent cell layers to the face."""
    _require_cells(f.domain)
    v = np.moveaxis(f.values, face.axis, 0)
    if face.upper:
        v = v[::-1]
    return (15.0 * v[0] - 10.0 * v[1] + 3.0 * v[2]) / 8.0


def normal_derivative(f: Field, face: Face) -> np.ndarray:
    """Outer normal derivative on a face, second-order one-sided."""
    _require_cells(f.domain)
    step = f.domain.spacing[face.axis]
    v = np.moveaxis(f.values, face.axis, 0)
    if face.upper:
        return (2.0 * v[-1] - 3.0 * v[-2] + v[-3]) / step
    return (2.0 * v[0] - 3.0 * v[1] + v[2]) / step


def interior_mask(domain: Domain, width: int = 1) -> np.ndarray:
    """True on cells at least `width` cells away from every face."""
    mask = np.zeros(domain.shape, dtype=bool)
    inner: typing.Tuple[slice, ...] = tuple(slice(width, n - width) for n in domain.cells)
    mask[inner] = True
    return mask
