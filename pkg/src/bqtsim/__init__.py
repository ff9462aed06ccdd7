"""State-vector simulation of bidirectional quantum teleportation over a cluster channel."""

from __future__ import annotations

__version__ = "0.1.0"

from . import bqt, noise, qec, qsim  # noqa: E402
from .errors import (  # noqa: E402
    ArgumentError,
    CapacityError,
    ContractError,
    InvalidBranchError,
    PreconditionError,
    QSimError,
)

__all__ = [
    "__version__",
    "bqt",
    "noise",
    "qec",
    "qsim",
    "ArgumentError",
    "CapacityError",
    "ContractError",
    "InvalidBranchError",
    "PreconditionError",
    "QSimError",
]
