"""
The desingularized gradient flow d_t u = Delta U_eps(u) - div(u grad psi_eps(v))
with no-flux boundary, its explicit finite-volume discretization and the
dynamic certificates built on it.
"""

from .checks import (
    ComparisonReport,
    SecondDerivativeReport,
    check_comparison,
    check_second_derivative_identity,
    entropy_derivative,
    entropy_second_derivative,
    fit_decay_rate,
    positive_profile,
    scheme_tolerance,
    stationarity_residual,
    stationary_envelope,
    stationary_family,
)
from .desingularize import (
    DesingularizationReport,
    DesingularizedNonlinearity,
    desingularize,
    validate_desingularization,
)
from .params import FlowConfig, MobilityRule
from .scheme import (
    FlowObserver,
    FlowStepper,
    FlowTrace,
    choose_epsilon,
    read_trace_csv,
    run_flow,
    write_trace_csv,
)

__all__ = [
    "ComparisonReport",
    "DesingularizationReport",
    "DesingularizedNonlinearity",
    "FlowConfig",
    "FlowObserver",
    "FlowStepper",
    "FlowTrace",
    "MobilityRule",
    "SecondDerivativeReport",
    "check_comparison",
    "check_second_derivative_identity",
    "choose_epsilon",
    "desingularize",
    "entropy_derivative",
    "entropy_second_derivative",
    "fit_decay_rate",
    "positive_profile",
    "read_trace_csv",
    "run_flow",
    "scheme_tolerance",
    "stationarity_residual",
    "stationary_envelope",
    "stationary_family",
    "validate_desingularization",
    "write_trace_csv",
]
