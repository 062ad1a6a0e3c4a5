"""
Gagliardo-Nirenberg-Sobolev inequality with a boundary trace on the half
space, from the entropy inequality for H(u) = u^alpha / (alpha (alpha - 1))
and V(x) = ||x + h e_d||^2 (C = 2).

For unit-mass u, with G = int |grad u^{alpha - 1/2}|^2 and T = int_{x_d = 0} u^alpha,
every dilation factor lambda gives

    A int u^alpha <= B lambda^{1 - delta} - h lambda T + D lambda^{delta + 1} G

with A = 1/(alpha - 1) + d, B = int v (alpha beta_h - v^{alpha - 1}),
D = alpha / (2 alpha - 1)^2 and delta = d (alpha - 1) + 1, where v is the
extremal profile of mass one. Equality holds for u = v and lambda = 1.
"""

import logging
import typing
from dataclasses import dataclass, field

import numpy as np

from ..errors import FaceClassificationError, ParameterOutOfRange, ZeroFieldError
from ..functionals import DeficitReport, deficit, match_mass
from ..grid import Domain, Face, Field, gradient, integrate, trace_integrate
from ..nonlinearity import Family, make_nonlinearity
from ..potential import ExtremalProfile, extremal_profile, make_shifted_quadratic


@dataclass(frozen=True)
class GnsConstants:
    alpha: float
    d: int
    A: float
    B: float
    D: float
    delta: float
    beta: float

    @property
    def theta(self) -> float:
        return (1.0 - 1.0 / self.delta) * (1.0 - 1.0 / (2.0 * self.alpha))

    @property
    def kappa(self) -> float:
        """lambda * G^{1/(2 delta)} at the minimizing dilation."""
        return (self.B * (self.delta - 1.0) / (self.D * (self.delta + 1.0))) ** (
            1.0 / (2.0 * self.delta)
        )

    @property
    def a_h(self) -> float:
        k = self.kappa
        return (self.B * k ** (1.0 - self.delta) + self.D * k ** (1.0 + self.delta)) / self.A

    @property
    def b_h(self) -> float:
        return self.kappa / self.A

    def optimal_lambda(self, gradient_norm: float) -> float:
        return self.kappa * gradient_norm ** (-1.0 / (2.0 * self.delta))


def gns_profile(
    alpha: float, h: float, domain: Domain, logger: typing.Optional[logging.Logger] = None
) -> ExtremalProfile:
    """v = ((alpha - 1)(beta_h - ||x + h e||^2))_+^{1/(alpha - 1)} with unit mass on the grid."""
    nl = make_nonlinearity(Family.POWER_CONVEX, alpha, domain.d)
    pot = make_shifted_quadratic(0.0, h, 1.0, domain.d)
    return extremal_profile(nl, pot, domain, 1.0, logger=logger)


def gns_constants(profile: ExtremalProfile) -> GnsConstants:
    alpha = float(profile.nonlinearity.alpha)  # type: ignore[arg-type]
    d = profile.domain.d
    v = profile.field
    B = integrate(Field(profile.domain, v.values * (alpha * profile.beta - v.values ** (alpha - 1.0))))
    return GnsConstants(
        alpha=alpha,
        d=d,
        A=1.0 / (alpha - 1.0) + d,
        B=B,
        D=alpha / (2.0 * alpha - 1.0) ** 2,
        delta=d * (alpha - 1.0) + 1.0,
        beta=profile.beta,
    )


def gradient_norm(u: Field, alpha: float) -> float:
    """int |grad u^{alpha - 1/2}|^2 = (alpha - 1/2)^2 int u^{2 alpha - 3} |grad u|^2."""
    g = gradient(u).norm2().values
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.where(u.values > 0, u.values ** (2.0 * alpha - 3.0) * g, 0.0)
    return (alpha - 0.5) ** 2 * integrate(Field(u.domain, integrand))


@dataclass(frozen=True)
class TraceGnsReport:
    alpha: float
    h: float
    d: int
    constants: GnsConstants
    gradient_norm: float
    trace: float
    lam: float
    lhs: float
    rhs: float
    deficit: float
    # bound on int u^alpha after substituting the minimizing dilation
    rhs_rescaled: float
    entropy: DeficitReport
    metadata: typing.Dict[str, typing.Any] = field(default_factory=dict)

    def passed(self, rtol: float = 1e-8) -> bool:
        return self.deficit >= -rtol * (1.0 + abs(self.rhs))


def trace_gns_report(
    u: Field,
    alpha: float,
    h: float,
    lam: typing.Optional[float] = None,
    profile: typing.Optional[ExtremalProfile] = None,
) -> TraceGnsReport:
    """
    Both sides of the dilated inequality (divided by A) for `lam`, which
    defaults to the minimizer of the dilation bound without the trace term.
    """
    if not alpha > 1.0:
        msg = f"The trace GNS inequality needs alpha > 1, got {alpha}."
        raise ParameterOutOfRange(msg)
    domain = u.domain
    if not domain.is_half_space():
        msg = f"{domain} is not a truncated half space {{x_d >= 0}}."
        raise FaceClassificationError(msg)
    u.require_nonnegative("u")
    u = match_mass(u, 1.0)
    profile = profile if profile else gns_profile(alpha, h, domain)
    c = gns_constants(profile)
    G = gradient_norm(u, alpha)
    if not G > 0:
        msg = "int |grad u^(alpha - 1/2)|^2 vanishes; no dilation is defined."
        raise ZeroFieldError(msg)
    T = trace_integrate(u**alpha, Face(domain.d - 1, False))
    lam = c.optimal_lambda(G) if lam is None else float(lam)
    lhs = integrate(u**alpha)
    rhs = (c.B * lam ** (1.0 - c.delta) - h * lam * T + c.D * lam ** (c.delta + 1.0) * G) / c.A
    rhs_rescaled = (
        c.a_h * G ** ((c.delta - 1.0) / (2.0 * c.delta))
        - h * c.b_h * G ** (-1.0 / (2.0 * c.delta)) * T
    )
    entropy = deficit(profile.nonlinearity, profile.potential, profile, u)
    return TraceGnsReport(
        alpha=alpha,
        h=h,
        d=domain.d,
        constants=c,
        gradient_norm=G,
        trace=T,
        lam=lam,
        lhs=lhs,
        rhs=rhs,
        deficit=rhs - lhs,
        rhs_rescaled=rhs_rescaled,
        entropy=entropy,
        metadata={"grid": domain.describe()},
    )
