"""
Numerical certificates for the Gamma-calculus identities.

Pointwise identities are checked on interior cells only; the one-sided
stencils in the outer layers are consistent but lose accuracy, and the masks
are recorded in the reports. Integral identities use every cell.
"""

import typing
from dataclasses import dataclass

import numpy as np

from .domain import Domain
from .field import Field
from .operators import (
    face_values,
    gamma,
    gamma2,
    gamma2_bochner,
    hessian_form,
    interior_mask,
    laplacian,
    normal_derivative,
)
from .quadrature import integrate, integrate_on_face


@dataclass(frozen=True)
class CheckReport:
    name: str
    worst: float
    worst_point: typing.Tuple[float, ...]
    step: float
    mask: str
    tolerance: float
    # margins pass when >= -tolerance, errors when <= tolerance
    is_margin: bool = False

    @property
    def passed(self) -> bool:
        if self.is_margin:
            return self.worst >= -self.tolerance
        return self.worst <= self.tolerance

    def as_dict(self) -> typing.Dict[str, typing.Any]:
        return {
            "name": self.name,
            "worst": self.worst,
            "worst_point": list(self.worst_point),
            "step": self.step,
            "mask": self.mask,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _point(domain: Domain, index: typing.Tuple[int, ...]) -> typing.Tuple[float, ...]:
    return tuple(float(axis[i]) for axis, i in zip(domain.axes(), index))


def _default_tolerance(domain: Domain, factor: float = 10.0) -> float:
    return factor * domain.min_spacing**2


def check_cd_condition(
    a: Field, tolerance: typing.Optional[float] = None, width: int = 1
) -> CheckReport:
    """Worst interior margin of Gamma_2(a) - (Delta a)^2 / d."""
    domain = a.domain
    margin = (gamma2(a, a) - laplacian(a) ** 2 / domain.d).values
    mask = interior_mask(domain, width)
    masked = np.where(mask, margin, np.inf)
    i = np.unravel_index(np.argmin(masked), domain.shape)
    return CheckReport(
        name="cd-margin",
        worst=float(masked[i]),
        worst_point=_point(domain, i),
        step=domain.min_spacing,
        mask=f"interior, {width} layer(s) excluded",
        tolerance=_default_tolerance(domain) if tolerance is None else tolerance,
        is_margin=True,
    )


def _worst_abs(name: str, err: np.ndarray, domain: Domain, width: int, tolerance: float) -> CheckReport:
    masked = np.where(interior_mask(domain, width), np.abs(err), -np.inf)
    i = np.unravel_index(np.argmax(masked), domain.shape)
    return CheckReport(
        name=name,
        worst=float(masked[i]),
        worst_point=_point(domain, i),
        step=domain.min_spacing,
        mask=f"interior, {width} layer(s) excluded",
        tolerance=tolerance,
    )


def check_hessian_gamma_identity(
    f: Field, g: Field, h: Field, tolerance: typing.Optional[float] = None, width: int = 2
) -> CheckReport:
    """
    D^2 f (grad g, grad h) against
    1/2 (Gamma(g, Gamma(f, h)) + Gamma(h, Gamma(f, g)) - Gamma(f, Gamma(g, h))).
    """
    lhs = hessian_form(f, g, h)
    rhs = 0.5 * (gamma(g, gamma(f, h)) + gamma(h, gamma(f, g)) - gamma(f, gamma(g, h)))
    tol = 10.0 * f.domain.min_spacing if tolerance is None else tolerance
    return _worst_abs("hessian-gamma", (lhs - rhs).values, f.domain, width, tol)


def check_gamma2_forms(
    a: Field, b: Field, tolerance: typing.Optional[float] = None, width: int = 3
) -> CheckReport:
    """Hessian-trace form of Gamma_2 against its defining Bochner form."""
    err = (gamma2(a, b) - gamma2_bochner(a, b)).values
    tol = _default_tolerance(a.domain) if tolerance is None else tolerance
    return _worst_abs("gamma2-forms", err, a.domain, width, tol)


def _boundary_sum(values_per_face: typing.Callable[..., np.ndarray], domain: Domain) -> float:
    return sum(
        integrate_on_face(values_per_face(face), domain, face) for face in domain.faces()
    )


def check_integration_by_parts(
    a: Field, b: Field, tolerance: typing.Optional[float] = None
) -> CheckReport:
    """
    int Gamma(a, b) + int b Delta a - oint b d_nu a, in both orderings. The
    boundary integral runs over every face of the box.
    """
    domain = a.domain
    worst = 0.0
    for x, y in ((a, b), (b, a)):
        boundary = _boundary_sum(
            lambda face, x=x, y=y: face_values(y, face) * normal_derivative(x, face), domain
        )
        err = integrate(gamma(x, y)) + integrate(y * laplacian(x)) - boundary
        worst = max(worst, abs(err))
    tol = _default_tolerance(domain) if tolerance is None else tolerance
    return CheckReport("integration-by-parts", worst, (), domain.min_spacing, "all cells", tol)


def check_bochner_integral_identity(
    phi: Field, tolerance: typing.Optional[float] = None
) -> CheckReport:
    """
    For phi with vanishing normal derivative on the box faces,
    2 (int Gamma_2(phi) - int (Delta phi)^2) - oint d_nu Gamma(phi) = 0.
    """
    domain = phi.domain
    g = gamma(phi, phi)
    boundary = _boundary_sum(lambda face: normal_derivative(g, face), domain)
    err = 2.0 * (integrate(gamma2(phi, phi)) - integrate(laplacian(phi) ** 2)) - boundary
    tol = _default_tolerance(domain) if tolerance is None else tolerance
    return CheckReport("bochner-integral", abs(err), (), domain.min_spacing, "all cells", tol)
