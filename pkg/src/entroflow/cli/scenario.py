import math
import typing
from enum import Enum
from pathlib import Path

from ..errors import ParameterOutOfRange
from ..grid import Domain
from ..nonlinearity import Family, Nonlinearity, make_nonlinearity
from ..potential import Potential, gaussian_box_length, make_shifted_quadratic


class Inequality(Enum):
    ENTROPY = "entropy"
    TRACE_LOGSOB = "trace-logsob"
    TRACE_GNS = "trace-gns"
    GNS = "gns"


class IdentityCheck(Enum):
    SECOND_DERIVATIVE = "second-derivative"
    CD = "cd"
    HESSIAN_GAMMA = "hessian-gamma"
    BOCHNER = "bochner"
    INTEGRATION_BY_PARTS = "integration-by-parts"


DEFAULT_CELLS = {1: 4096, 2: 128, 3: 32}
# explicit steps cost O(cells^2) per unit time, so flows get coarser grids
FLOW_CELLS = {1: 256, 2: 64, 3: 16}


class Scenario:
    """
    Everything one CLI invocation needs. Parameters are validated here, so a
    scenario that loads is a scenario the library accepts.
    """

    def __init__(
        self,
        inequality: typing.Optional[Inequality] = None,
        family: typing.Union[Family, str] = Family.BOLTZMANN,
        alpha: typing.Optional[float] = None,
        dim: int = 1,
        h: float = 0.0,
        grid: typing.Optional[int] = None,
        length: typing.Optional[float] = None,
        samples: int = 10,
        seed: int = 0,
        eps: typing.Optional[float] = None,
        output: typing.Optional[Path] = None,
        end_time: float = 1.0,
        safety: float = 0.4,
        tol_deficit: float = 1e-8,
        tol_equality: float = 1e-5,
        stationary: bool = False,
        time_limit: float = math.inf,
        default_cells: typing.Mapping[int, int] = DEFAULT_CELLS,
    ) -> None:
        if dim not in (1, 2, 3):
            msg = f"--dim must be 1, 2 or 3, got {dim}."
            raise ParameterOutOfRange(msg)
        if samples < 0:
            msg = f"--samples must be nonnegative, got {samples}."
            raise ParameterOutOfRange(msg)
        if grid is not None and grid < 8:
            msg = f"--grid needs at least 8 cells per axis, got {grid}."
            raise ParameterOutOfRange(msg)
        if length is not None and not length > 0:
            msg = f"--length must be positive, got {length}."
            raise ParameterOutOfRange(msg)
        if eps is not None and not 0.0 < eps < 1.0:
            msg = f"--eps must lie in (0, 1), got {eps}."
            raise ParameterOutOfRange(msg)
        self.inequality = Inequality(inequality) if inequality else None
        self.family = Family(family)
        self.alpha = alpha
        self.dim = dim
        self.h = h
        self.cells = default_cells[dim] if grid is None else grid
        self.length = length
        self.samples = samples
        self.seed = seed
        self.eps = eps
        self.output = output
        self.end_time = end_time
        self.safety = safety
        self.tol_deficit = tol_deficit
        self.tol_equality = tol_equality
        self.stationary = stationary
        self.time_limit = time_limit
        if self.inequality in (Inequality.GNS, Inequality.TRACE_GNS):
            if self.family == Family.BOLTZMANN:
                self.family = Family.POWER_CONVEX
            if self.family != Family.POWER_CONVEX:
                msg = f"{self.inequality.value} is stated for the power-convex family."
                raise ParameterOutOfRange(msg)
        if self.inequality == Inequality.TRACE_LOGSOB and self.family != Family.BOLTZMANN:
            msg = "trace-logsob is stated for the boltzmann family."
            raise ParameterOutOfRange(msg)
        # builds (and so validates) the family parameters
        self.nonlinearity()

    def nonlinearity(self) -> Nonlinearity:
        return make_nonlinearity(self.family, self.alpha, self.dim)

    def potential(self) -> Potential:
        """||x + h e||^2 / 2 (C = 1), or ||x + h e||^2 (C = 2) for the GNS inequalities."""
        scale = 1.0 if self.inequality in (Inequality.GNS, Inequality.TRACE_GNS) else 0.5
        return make_shifted_quadratic(0.0, self.h, scale, self.dim)

    def box_length(self) -> float:
        if self.length is not None:
            return self.length
        if self.inequality == Inequality.GNS:
            return 1.5
        if self.inequality == Inequality.TRACE_GNS:
            return 3.0 + max(-self.h, 0.0)
        if self.family == Family.BOLTZMANN:
            return math.ceil(gaussian_box_length(self.h, 1e-14))
        return 8.0

    def domain(self, cells: typing.Optional[int] = None) -> Domain:
        return Domain.half_space(self.dim, self.box_length(), cells or self.cells)

    def describe(self) -> typing.Dict[str, typing.Any]:
        return {
            "inequality": self.inequality.value if self.inequality else None,
            "family": self.family.value,
            "alpha": self.alpha,
            "dim": self.dim,
            "h": self.h,
            "grid": self.cells,
            "length": self.box_length(),
            "samples": self.samples,
            "seed": self.seed,
        }
