"""Verification lab for the field-theoretical space-time position operator of the (1+1)D Dirac field."""

from .fock import ModeTable, ResourceError, build_space, build_state
from .gamma import ConfigurationError, build_gammas
from .spinors import DomainError, make_spinors

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DomainError",
    "ModeTable",
    "ResourceError",
    "build_gammas",
    "build_space",
    "build_state",
    "make_spinors",
]
