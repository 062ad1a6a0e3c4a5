"""Command-line front end: `entroflow verify | flow | identity-check`."""

from .commands import cmd_flow, cmd_identity_check, cmd_verify
from .main import build_parser, main
from .scenario import IdentityCheck, Inequality, Scenario

__all__ = [
    "IdentityCheck",
    "Inequality",
    "Scenario",
    "build_parser",
    "cmd_flow",
    "cmd_identity_check",
    "cmd_verify",
    "main",
]
