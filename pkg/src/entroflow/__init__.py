"""
This package certifies the entropy method for nonlinear Fokker-Planck
equations on convex domains, numerically and at desk scale.

A nonlinearity bundle (H, psi, U, U_2) and a uniformly convex potential V
determine the extremal profile v = psi^{-1}(beta - V), built through the
generalized inverse with the normalizer beta found by bracketing. On a
uniform cell-centred grid the package provides the Gamma-calculus
operators, the entropy and entropy-production functionals, and the
entropy inequality with its deficit.

A conservative finite-volume scheme simulates the desingularized gradient
flow behind the entropy method, with zero flux through every face. Its traces
certify mass conservation, entropy monotonicity, the comparison principle,
the second-derivative identity of the entropy along the flow and the decay
rate 2C of the entropy production.

On top of that sit verifiers for the inequalities that follow: the entropy
inequality itself, the trace logarithmic Sobolev and trace
Gagliardo-Nirenberg-Sobolev inequalities on half spaces, and the sharp GNS
inequality on the half space with its explicit extremizer. Every verifier
returns a report with the two sides, the deficit and the constants, and the
command line `entroflow` wraps them into JSON reports and CSV traces.
"""

from .errors import EntroflowError
from .functionals import deficit, entropy, entropy_production, relative_entropy
from .grid import Domain, Field
from .nonlinearity import Family, Nonlinearity, make_nonlinearity
from .potential import Potential, extremal_profile, make_shifted_quadratic

__all__ = [
    "Domain",
    "EntroflowError",
    "Family",
    "Field",
    "Nonlinearity",
    "Potential",
    "deficit",
    "entropy",
    "entropy_production",
    "extremal_profile",
    "make_nonlinearity",
    "make_shifted_quadratic",
    "relative_entropy",
]
