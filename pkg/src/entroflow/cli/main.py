import argparse
import logging
import math
import sys
import typing
from pathlib import Path

from ..errors import EntroflowError
from ..nonlinearity import Family
from .commands import cmd_flow, cmd_identity_check, cmd_verify
from .scenario import DEFAULT_CELLS, FLOW_CELLS, IdentityCheck, Inequality, Scenario

_logger = logging.getLogger("entroflow.cli")


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--family",
        choices=[f.value for f in Family],
        default=Family.BOLTZMANN.value,
        help="Nonlinearity family.",
    )
    parser.add_argument("--alpha", type=float, default=None, help="Family exponent.")
    parser.add_argument("--dim", type=int, default=1, help="Space dimension (1, 2 or 3).")
    parser.add_argument("--h", type=float, default=0.0, help="Shift of the potential along e_d.")
    parser.add_argument("--grid", type=int, default=None, help="Cells per axis.")
    parser.add_argument("--length", type=float, default=None, help="Box length per axis.")
    parser.add_argument("--samples", type=int, default=10, help="Number of random test functions.")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--eps", type=float, default=None, help="Desingularization parameter.")
    parser.add_argument("--output", type=Path, default=None, help="Report (JSON) or trace (CSV) path.")
    parser.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entroflow",
        description="Certify entropy-method identities and sharp inequalities on a grid.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="Verify an inequality on its equality case and random samples.")
    verify.add_argument("--ineq", required=True, choices=[i.value for i in Inequality])
    verify.add_argument("--tol-deficit", type=float, default=1e-8, help="Relative deficit tolerance.")
    verify.add_argument("--tol-equality", type=float, default=1e-5, help="Equality-case tolerance.")
    _common_flags(verify)

    flow = sub.add_parser("flow", help="Run the desingularized flow and write its entropy trace.")
    flow.add_argument("--end-time", type=float, default=1.0)
    flow.add_argument("--safety", type=float, default=0.4, help="CFL safety factor.")
    flow.add_argument("--stationary", action="store_true", help="Start from the extremal profile.")
    flow.add_argument(
        "--time-limit", type=float, default=math.inf, help="Wall-clock budget in seconds (exit 1 when exceeded)."
    )
    _common_flags(flow)

    identity = sub.add_parser("identity-check", help="Check a calculus identity numerically.")
    identity.add_argument("--which", required=True, choices=[c.value for c in IdentityCheck])
    _common_flags(identity)
    return parser


def _scenario(args: argparse.Namespace) -> Scenario:
    kwargs: typing.Dict[str, typing.Any] = {
        "family": args.family,
        "alpha": args.alpha,
        "dim": args.dim,
        "h": args.h,
        "grid": args.grid,
        "length": args.length,
        "samples": args.samples,
        "seed": args.seed,
        "eps": args.eps,
        "output": args.output,
    }
    if args.command == "verify":
        kwargs.update(
            inequality=Inequality(args.ineq),
            tol_deficit=args.tol_deficit,
            tol_equality=args.tol_equality,
        )
    elif args.command == "flow":
        kwargs.update(
            end_time=args.end_time,
            safety=args.safety,
            stationary=args.stationary,
            time_limit=args.time_limit,
            default_cells=FLOW_CELLS,
        )
    else:
        kwargs.update(default_cells=DEFAULT_CELLS)
    return Scenario(**kwargs)


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    """
    Exit codes: 0 pass, 1 a mathematical check failed or the time budget ran
    out, 2 bad configuration or hypothesis.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)
    _configure_logging(args.verbose)
    try:
        scenario = _scenario(args)
        if args.command == "verify":
            return cmd_verify(scenario)
        if args.command == "flow":
            return cmd_flow(scenario)
        return cmd_identity_check(IdentityCheck(args.which), scenario)
    except ValueError as err:
        sys.stderr.write(f"entroflow: error: {err}\n")
        return 2
    except (EntroflowError, RuntimeError, TimeoutError) as err:
        _logger.debug("Run aborted", exc_info=True)
        sys.stderr.write(f"entroflow: {type(err).__name__}: {err}\n")
        return 1
