import math
import typing
from enum import Enum

from ..errors import ParameterOutOfRange


class MobilityRule(Enum):
    """
    How the cell mobility u is carried to a face.

    ARITHMETIC uses (u_L + u_R) / 2. ENTROPIC uses
    (U_eps(u_R) - U_eps(u_L)) / (psi_eps(u_R) - psi_eps(u_L)), for which the
    diffusive part of the flux is exactly the difference of U_eps(u); it is
    the logarithmic mean for Boltzmann. Any nonnegative mobility keeps v_alpha
    stationary and the production nonnegative; the two rules differ only in
    the O(step^2) error of the diffusion term.
    """

    ENTROPIC = "entropic"
    ARITHMETIC = "arithmetic"


class FlowConfig:
    def __init__(
        self,
        end_time: float = 1.0,
        safety: float = 0.4,
        snapshot_every: typing.Optional[float] = None,
        snapshot_times: typing.Sequence[float] = (),
        eps: typing.Optional[float] = None,
        mobility: MobilityRule = MobilityRule.ARITHMETIC,
        dt_floor: float = 1e-12,
        time_limit: float = math.inf,
        keep_fields: bool = False,
        entropy_slack: float = 1e-12,
    ) -> None:
        if not 0.0 < safety <= 1.0:
            msg = f"CFL safety factor must lie in (0, 1], got {safety}."
            raise ParameterOutOfRange(msg)
        if not end_time > 0:
            msg = f"End time must be positive, got {end_time}."
            raise ParameterOutOfRange(msg)
        self.end_time = float(end_time)
        self.safety = float(safety)
        self.snapshot_every = snapshot_every
        self.snapshot_times = tuple(sorted(float(t) for t in snapshot_times))
        self.eps = eps
        self.mobility = MobilityRule(mobility)
        self.dt_floor = dt_floor
        self.time_limit = time_limit
        self.keep_fields = keep_fields
        self.entropy_slack = entropy_slack

    def record_times(self) -> typing.List[float]:
        """Times at which the trace records a row (0 and end_time included)."""
        times = {0.0, self.end_time}
        times.update(t for t in self.snapshot_times if 0.0 < t < self.end_time)
        if self.snapshot_every:
            n = int(math.floor(self.end_time / self.snapshot_every + 1e-9))
            times.update(k * self.snapshot_every for k in range(1, n + 1))
        return sorted({round(t, 12) for t in times if t <= self.end_time})
