"""Shared failure types, mapped to distinct exit codes by the CLI."""
from __future__ import annotations


class FileFormatError(ValueError):
    """Malformed input file (bad key, bad expression, wrong shape)."""


class PreconditionFailure(ValueError):
    """Input violates a documented precondition (e.g. the particular
    solution does not satisfy the field equations, or block metadata is
    missing/inconsistent)."""


class UnsupportedRegime(ValueError):
    """Structurally valid input outside the implemented regime (diagonal
    algebra not monogenous, eigenvalues outside Q, non-nilpotent tower
    shape)."""


class ReductionTimeout(RuntimeError):
    """The cooperative --max-minutes guard fired."""
