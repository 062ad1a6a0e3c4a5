"""
Both sides of the entropy / entropy-production inequality.

    entropy            F(u) = int H(u) + u V         (potential form)
                       F(u) = int H(u) - u psi(v)    (positive-v form)
    relative entropy   int H(u) - H(v) + (u - v) V
    production         I(u) = int u |grad psi(u) + grad V|^2

grad psi(u) is taken as psi'(u) grad u, which stays accurate next to the
support boundary of compactly supported profiles. Wherever u = 0 the
production integrand is zero. Power-concave fields, for which psi(0+) = -inf,
are first lifted to u >= FLOOR * max(u).
"""

import logging
import typing
from dataclasses import dataclass, field

import numpy as np

from .errors import MassMismatch, PositivityError
from .grid import Field, VectorField, gradient, integrate
from .nonlinearity import Family, Nonlinearity
from .potential import ExtremalProfile, Potential

_logger = logging.getLogger("entroflow.functionals")

MASS_RTOL = 1e-8
FLOOR = 1e-12


@dataclass(frozen=True)
class DeficitReport:
    """deficit = rhs / (2 C) - lhs; nonnegative whenever the theorem applies."""

    lhs: float
    rhs: float
    deficit: float
    C: float
    metadata: typing.Dict[str, typing.Any] = field(default_factory=dict)

    def passed(self, rtol: float = 1e-8) -> bool:
        return self.deficit >= -rtol * (1.0 + abs(self.rhs))


def _values(x: typing.Union[Field, ExtremalProfile]) -> Field:
    return x.field if isinstance(x, ExtremalProfile) else x


def floored(nl: Nonlinearity, u: Field) -> Field:
    if nl.family != Family.POWER_CONCAVE:
        return u
    floor = FLOOR * u.max()
    if u.min() >= floor:
        return u
    _logger.debug("Lifting %d cell(s) of a power-concave field to %.3e", int(np.sum(u.values < floor)), floor)
    return Field(u.domain, np.maximum(u.values, floor))


def _H(nl: Nonlinearity, u: np.ndarray) -> np.ndarray:
    """H extended by H(0) = 0."""
    return np.where(u > 0, nl.H(np.where(u > 0, u, 1.0)), 0.0)


def entropy(
    nl: Nonlinearity,
    v_or_V: typing.Union[Potential, Field, ExtremalProfile],
    u: Field,
) -> float:
    u.require_nonnegative("u")
    u = floored(nl, u)
    h = _H(nl, u.values)
    if isinstance(v_or_V, Potential):
        V = v_or_V(u.domain.points())
        return integrate(Field(u.domain, h + u.values * V))
    v = _values(v_or_V).values
    with np.errstate(divide="ignore", invalid="ignore"):
        coupling = np.where(u.values > 0, u.values * nl.psi(v), 0.0)
    return integrate(Field(u.domain, h - coupling))


def match_mass(u: Field, target: float, rtol: float = MASS_RTOL) -> Field:
    """Rescale u onto `target` if it is off by at most `rtol`, else raise."""
    mass = integrate(u)
    drift = abs(mass / target - 1.0)
    if drift > rtol:
        msg = f"Mass {mass!r} differs from {target!r} by {drift:.3e} (relative)."
        raise MassMismatch(msg)
    if drift > 0:
        _logger.debug("Renormalizing mass drift of %.2e", drift)
        return u * (target / mass)
    return u


def relative_entropy(
    nl: Nonlinearity, pot: Potential, v: typing.Union[Field, ExtremalProfile], u: Field
) -> float:
    vf = _values(v)
    u.require_nonnegative("u")
    u = floored(nl, u)
    u = match_mass(u, integrate(vf))
    V = pot(u.domain.points())
    integrand = _H(nl, u.values) - _H(nl, vf.values) + (u.values - vf.values) * V
    return integrate(Field(u.domain, integrand))


def psi_gradient(nl: Nonlinearity, u: Field, grad_u: typing.Optional[VectorField] = None) -> VectorField:
    """psi'(u) grad u, set to zero where u = 0."""
    grad_u = gradient(u) if grad_u is None else grad_u
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        factor = np.where(u.values > 0, nl.dpsi(np.where(u.values > 0, u.values, 1.0)), 0.0)
    return grad_u.scale(factor)


def entropy_production(
    nl: Nonlinearity,
    pot_or_v: typing.Union[Potential, Field, ExtremalProfile],
    u: Field,
) -> float:
    """
    int u |grad psi(u) + grad V|^2 for a potential, or
    int u |grad psi(u) - grad psi(v)|^2 = int u Gamma(psi(v) - psi(u)) for a
    strictly positive profile v.
    """
    u.require_nonnegative("u")
    u = floored(nl, u)
    drift = psi_gradient(nl, u)
    if isinstance(pot_or_v, Potential):
        total = drift + pot_or_v.gradient_on(u.domain)
    else:
        v = _values(pot_or_v)
        if not v.is_positive():
            msg = "The profile form of the production needs v > 0; pass the potential instead."
            raise PositivityError(msg)
        total = drift - psi_gradient(nl, v)
    integrand = np.where(u.values > 0, u.values * total.norm2().values, 0.0)
    return integrate(Field(u.domain, integrand))


def deficit(
    nl: Nonlinearity,
    pot: Potential,
    v: typing.Union[Field, ExtremalProfile],
    u: Field,
    C: typing.Optional[float] = None,
) -> DeficitReport:
    C = pot.convexity_constant if C is None else C
    vf = _values(v)
    u.require_nonnegative("u")
    u = match_mass(floored(nl, u), integrate(vf))
    lhs = relative_entropy(nl, pot, vf, u)
    rhs = entropy_production(nl, pot, u)
    return DeficitReport(
        lhs=lhs,
        rhs=rhs,
        deficit=rhs / (2.0 * C) - lhs,
        C=C,
        metadata={
            "nonlinearity": nl.describe(),
            "potential": pot.describe(),
            "grid": u.domain.describe(),
        },
    )
