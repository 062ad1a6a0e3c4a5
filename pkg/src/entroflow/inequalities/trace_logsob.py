"""
Logarithmic Sobolev inequality with a boundary trace on the half space
{x_d >= 0}, obtained from the entropy inequality for H(u) = u log u and
V(x) = ||x + h e_d||^2 / 2 (C = 1).

For unit-mass u > 0, with F = int |grad u|^2 / u and T = int_{x_d = 0} u,

    int u log u <= -d - log C_h + F / 2 - h T,        C_h = (2 pi)^{d/2} Phi(-h),

and the dilation u -> lambda^d u(lambda .) with lambda = (F / d)^{-1/2} turns
this into

    int u log u <= d/2 log(F / (2 pi d e)) - log Phi(-h) - h lambda T.

Equality holds in the first form for u = exp(-||x + h e_d||^2 / 2) / C_h.
"""

import math
import typing
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from ..errors import FaceClassificationError, PositivityError
from ..functionals import match_mass
from ..grid import Face, Field, gamma, gradient, integrate, trace_integrate


def log_gaussian_constant(h: float, d: int) -> float:
    """log C_h = d/2 log(2 pi) + log Phi(-h)."""
    return 0.5 * d * math.log(2.0 * math.pi) + float(special.log_ndtr(-h))


def fisher_information(u: Field) -> float:
    """int |grad u|^2 / u over {u > 0}; evaluated as int u |grad log u|^2 when u > 0."""
    if u.is_positive():
        log_u = u.map(np.log)
        return integrate(u * gamma(log_u, log_u))
    g = gradient(u).norm2().values
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.where(u.values > 0, g / u.values, 0.0)
    return integrate(Field(u.domain, integrand))


def trace_logsob_rhs(
    fisher: float, trace: float, h: float, d: int, lam: float = 1.0
) -> float:
    """Bound on int u log u from the dilation of u by `lam` (lam = 1 is the undilated form)."""
    return (
        -d
        - log_gaussian_constant(h, d)
        + 0.5 * lam**2 * fisher
        - h * lam * trace
        - d * math.log(lam)
    )


@dataclass(frozen=True)
class TraceLogSobReport:
    h: float
    d: int
    lhs: float
    fisher: float
    trace: float
    gaussian_mass: float
    lam: float
    rhs: float
    deficit: float
    rhs_pre: float
    deficit_pre: float
    # trace term weighted by F / d instead of lambda
    rhs_printed: float
    metadata: typing.Dict[str, typing.Any] = field(default_factory=dict)

    def passed(self, rtol: float = 1e-8) -> bool:
        return self.deficit >= -rtol * (1.0 + abs(self.rhs)) and self.deficit_pre >= -rtol * (
            1.0 + abs(self.rhs_pre)
        )


def trace_logsob_report(u: Field, h: float) -> TraceLogSobReport:
    domain = u.domain
    if not domain.is_half_space():
        msg = f"{domain} is not a truncated half space {{x_d >= 0}}."
        raise FaceClassificationError(msg)
    if not u.is_positive():
        msg = "The trace logarithmic Sobolev inequality needs u > 0 on the grid."
        raise PositivityError(msg)
    u = match_mass(u, 1.0)
    d = domain.d
    lhs = integrate(Field(domain, special.xlogy(u.values, u.values)))
    fisher = fisher_information(u)
    trace = trace_integrate(u, Face(d - 1, False))
    lam = math.sqrt(d / fisher)
    rhs_pre = trace_logsob_rhs(fisher, trace, h, d)
    rhs = (
        0.5 * d * math.log(fisher / (2.0 * math.pi * d * math.e))
        - float(special.log_ndtr(-h))
        - h * lam * trace
    )
    rhs_printed = rhs + h * lam * trace - h * (fisher / d) * trace
    return TraceLogSobReport(
        h=h,
        d=d,
        lhs=lhs,
        fisher=fisher,
        trace=trace,
        gaussian_mass=float(special.ndtr(-h)),
        lam=lam,
        rhs=rhs,
        deficit=rhs - lhs,
        rhs_pre=rhs_pre,
        deficit_pre=rhs_pre - lhs,
        rhs_printed=rhs_printed,
        metadata={"grid": domain.describe()},
    )
