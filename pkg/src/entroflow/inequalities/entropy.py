"""
The entropy / entropy-production inequality with a theorem verdict.

When the profile is strictly positive on the grid the positive-profile form
applies; otherwise the profile comes from the generalized inverse and the
generalized form applies. Both need U2 + U/d >= 0 and the convexity of V.
"""

import logging
import typing

from ..errors import HypothesisViolation
from ..functionals import DeficitReport, deficit
from ..grid import Field, integrate
from ..nonlinearity import Family, Nonlinearity, check_hypothesis_U, make_nonlinearity
from ..potential import (
    ExtremalProfile,
    Potential,
    check_hypothesis_V,
    extremal_profile,
    make_shifted_quadratic,
)

_logger = logging.getLogger("entroflow.EntropyInequality")


def verify_entropy_inequality(
    nl: Nonlinearity,
    pot_or_v: typing.Union[Potential, ExtremalProfile],
    u: Field,
    logger: typing.Optional[logging.Logger] = None,
) -> DeficitReport:
    """
    Deficit of  int H(u) - H(v) + (u - v) V <= 1/(2C) int u |grad psi(u) + grad V|^2.

    Raises HypothesisViolation when a hypothesis fails; the exception's
    `report` still holds the numbers, flagged advisory.
    """
    logger = logger if logger else _logger
    if isinstance(pot_or_v, ExtremalProfile):
        profile = pot_or_v
    else:
        profile = extremal_profile(nl, pot_or_v, u.domain, integrate(u), logger=logger)
    pot = profile.potential
    variant = "positive-v" if profile.field.is_positive() else "generalized-inverse"
    hyp_u = check_hypothesis_U(nl)
    hyp_v = check_hypothesis_V(nl, pot, u.domain, profile.beta)
    report = deficit(nl, pot, profile, u)
    report.metadata.update(
        {
            "variant": variant,
            "beta": profile.beta,
            "advisory": not (hyp_u.satisfied and hyp_v.satisfied),
        }
    )
    if not hyp_u.satisfied:
        msg = (
            f"{nl} violates U2 + U/d >= 0 (worst {hyp_u.worst_value:.3g} at x={hyp_u.worst_point}); "
            "no theorem verdict is given."
        )
        raise HypothesisViolation(msg, report)
    if not hyp_v.satisfied:
        msg = (
            f"{pot} violates the potential hypothesis (worst {hyp_v.worst_value:.3g} at "
            f"{hyp_v.worst_point}); no theorem verdict is given."
        )
        raise HypothesisViolation(msg, report)
    logger.debug("%s deficit %.6g (%s)", nl, report.deficit, variant)
    return report


def sobolev_model_report(u: Field) -> DeficitReport:
    """H(x) = -x^{1 - 1/d} with V(x) = 1 + ||x||^2 (C = 2) in the dimension of u's grid."""
    d = u.domain.d
    nl = make_nonlinearity(Family.SOBOLEV, d=d)
    pot = make_shifted_quadratic(1.0, 0.0, 1.0, d)
    return verify_entropy_inequality(nl, pot, u)
