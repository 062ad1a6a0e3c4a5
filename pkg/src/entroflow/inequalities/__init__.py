"""
Verifiers for the sharp inequalities that follow from the entropy method:
the entropy inequality itself, the trace logarithmic Sobolev inequality, the
trace Gagliardo-Nirenberg-Sobolev inequality and the half-space GNS
inequality, together with test-function generators and JSON reports.
"""

from .entropy import sobolev_model_report, verify_entropy_inequality
from .gns import (
    GnsReport,
    gns_constant,
    gns_constant_closed_form,
    gns_extremizer,
    gns_quotient,
    gns_theta,
    verify_gns,
)
from .report import (
    InequalityReport,
    from_entropy,
    from_gns,
    from_trace_gns,
    from_trace_logsob,
    write_report_json,
)
from .rescale import rescale
from .samples import (
    halfspace_gaussian,
    perturbation,
    random_bumps,
    random_smooth_field,
    sample_rng,
)
from .trace_gns import (
    GnsConstants,
    TraceGnsReport,
    gns_constants,
    gns_profile,
    gradient_norm,
    trace_gns_report,
)
from .trace_logsob import (
    TraceLogSobReport,
    fisher_information,
    log_gaussian_constant,
    trace_logsob_report,
    trace_logsob_rhs,
)

__all__ = [
    "GnsConstants",
    "GnsReport",
    "InequalityReport",
    "TraceGnsReport",
    "TraceLogSobReport",
    "fisher_information",
    "from_entropy",
    "from_gns",
    "from_trace_gns",
    "from_trace_logsob",
    "gns_constant",
    "gns_constant_closed_form",
    "gns_constants",
    "gns_extremizer",
    "gns_profile",
    "gns_quotient",
    "gns_theta",
    "gradient_norm",
    "halfspace_gaussian",
    "log_gaussian_constant",
    "perturbation",
    "random_bumps",
    "random_smooth_field",
    "rescale",
    "sample_rng",
    "sobolev_model_report",
    "trace_gns_report",
    "trace_logsob_report",
    "trace_logsob_rhs",
    "verify_entropy_inequality",
    "write_report_json",
]
