"""
Gagliardo-Nirenberg-Sobolev inequality on the half space,

    ||f||_{2 alpha/(2 alpha - 1)} <= C_alpha ||grad f||_2^theta ||f||_{2/(2 alpha - 1)}^{1 - theta},
    theta = (1 - 1/delta)(1 - 1/(2 alpha)),  delta = d (alpha - 1) + 1,

with equality for f = (1 - ||x||^2)_+^{(2 alpha - 1)/(2 (alpha - 1))} and its
translates along the boundary.
"""

import math
import typing
from dataclasses import dataclass

import numpy as np
from scipy import special

from ..errors import ParameterOutOfRange, ZeroFieldError
from ..grid import Domain, Field, gradient, integrate


def _require_alpha(alpha: float) -> None:
    if not alpha > 1.0:
        msg = f"The GNS inequality needs alpha > 1, got {alpha}."
        raise ParameterOutOfRange(msg)


def gns_theta(alpha: float, d: int) -> float:
    delta = d * (alpha - 1.0) + 1.0
    return (1.0 - 1.0 / delta) * (1.0 - 1.0 / (2.0 * alpha))


def extremizer_exponent(alpha: float) -> float:
    return (2.0 * alpha - 1.0) / (2.0 * (alpha - 1.0))


def gns_extremizer(domain: Domain, alpha: float, center: typing.Optional[typing.Sequence[float]] = None) -> Field:
    """(1 - ||x - center||^2)_+^p on the grid; `center` must lie on the boundary {x_d = 0}."""
    _require_alpha(alpha)
    c = np.zeros(domain.d) if center is None else np.asarray(center, dtype=float)
    if c[-1] != 0.0:
        msg = "Extremizers may only be translated along the boundary {x_d = 0}."
        raise ParameterOutOfRange(msg)
    r2 = np.sum((domain.points() - c) ** 2, axis=-1)
    return Field(domain, np.maximum(1.0 - r2, 0.0) ** extremizer_exponent(alpha))


def _lp_norm(f: Field, p: float) -> float:
    return integrate(f**p) ** (1.0 / p)


def gns_quotient(f: Field, alpha: float) -> float:
    """||f||_{2a/(2a-1)} / (||grad f||_2^theta ||f||_{2/(2a-1)}^{1-theta})."""
    _require_alpha(alpha)
    f.require_nonnegative("f")
    if not np.any(f.values > 0):
        msg = "The GNS quotient is undefined for the zero field."
        raise ZeroFieldError(msg)
    theta = gns_theta(alpha, f.domain.d)
    top = _lp_norm(f, 2.0 * alpha / (2.0 * alpha - 1.0))
    grad = math.sqrt(integrate(gradient(f).norm2()))
    low = _lp_norm(f, 2.0 / (2.0 * alpha - 1.0))
    return top / (grad**theta * low ** (1.0 - theta))


def _half_ball_moment(d: int, r_power: int, a: float) -> float:
    """int over the unit half ball of |x|^r_power (1 - |x|^2)^a."""
    sphere = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)
    return 0.5 * sphere * 0.5 * float(special.beta((d + r_power) / 2.0, a + 1.0))


def gns_constant_closed_form(alpha: float, d: int) -> float:
    """C_alpha from the three norms of the extremizer, integrated in polar coordinates."""
    _require_alpha(alpha)
    p = extremizer_exponent(alpha)
    q_top = 2.0 * alpha / (2.0 * alpha - 1.0)
    q_low = 2.0 / (2.0 * alpha - 1.0)
    top = _half_ball_moment(d, 0, p * q_top) ** (1.0 / q_top)
    low = _half_ball_moment(d, 0, p * q_low) ** (1.0 / q_low)
    grad = math.sqrt(4.0 * p**2 * _half_ball_moment(d, 2, 2.0 * p - 2.0))
    theta = gns_theta(alpha, d)
    return top / (grad**theta * low ** (1.0 - theta))


def gns_constant(alpha: float, d: int, domain: typing.Optional[Domain] = None) -> float:
    """
    C_alpha as the quotient of the extremizer. Without a domain the norms are
    integrated exactly; with one they are evaluated on its grid.
    """
    if domain is None:
        return gns_constant_closed_form(alpha, d)
    if domain.d != d:
        msg = f"Domain of dimension {domain.d} for d={d}."
        raise ParameterOutOfRange(msg)
    return gns_quotient(gns_extremizer(domain, alpha), alpha)


@dataclass(frozen=True)
class GnsReport:
    alpha: float
    d: int
    theta: float
    C: float
    lhs: float
    rhs: float
    deficit: float
    quotient: float

    def passed(self, rtol: float = 1e-8) -> bool:
        return self.deficit >= -rtol * (1.0 + abs(self.rhs))


def verify_gns(f: Field, alpha: float, C: typing.Optional[float] = None) -> GnsReport:
    d = f.domain.d
    C = gns_constant_closed_form(alpha, d) if C is None else C
    quotient = gns_quotient(f, alpha)
    theta = gns_theta(alpha, d)
    lhs = _lp_norm(f, 2.0 * alpha / (2.0 * alpha - 1.0))
    rhs = C * lhs / quotient
    return GnsReport(
        alpha=alpha,
        d=d,
        theta=theta,
        C=C,
        lhs=lhs,
        rhs=rhs,
        deficit=rhs - lhs,
        quotient=quotient,
    )
