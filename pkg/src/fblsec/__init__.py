"""Finite-blocklength physical-layer security: leakage, throughput, optimization.

Submodules
----------
specfun    special functions, quadrature, root finding
channel    scenario parameters, SINR algebra, fading distributions, samplers
leakage    information-leakage probability and rate-redundancy inversion
single_opt single-antenna adaptive / non-adaptive designs
multi_opt  multi-antenna artificial-noise designs
oracle     Monte-Carlo, grid-search and finite-difference checks
cli        ``fblsec`` command line
"""

from .channel import AnAllocation, ChannelSnapshot, SystemParams, db_to_linear
from .errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    FblsecError,
    InfeasibleError,
    ModelError,
    PreconditionError,
)
from .leakage import LeakageModel, invert_redundancy, leakage
from .oracle import McEstimate
from .single_opt import DesignPoint
from .multi_opt import AoState
from .specfun import Tolerance

__version__ = "0.1.0"

__all__ = [
    "AnAllocation", "AoState", "BracketError", "ChannelSnapshot", "ConvergenceError", "DesignPoint",
    "DomainError", "FblsecError", "InfeasibleError", "LeakageModel", "McEstimate", "ModelError",
    "PreconditionError", "SystemParams", "Tolerance", "db_to_linear", "invert_redundancy", "leakage",
]
