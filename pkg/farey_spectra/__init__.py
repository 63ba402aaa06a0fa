"""
Farey map transfer-operator toolkit: exact Farey combinatorics, the
Laguerre-basis truncations of the transfer operators, Hankel
self-reciprocity and the polynomial eigenproblem at q = -k/2.
"""

from .config import ToolkitConfig, get_config, load_config, set_config
from .exact_farey import farey_sequence, knauf_partition, stern_brocot_level
from .exceptions import (AccuracyWarning, ConfigurationError, DomainError, EnumerationLimitError,
                         FareyToolkitError, PoleError, SpectralError, VerificationError)
from .laguerre_space import SpaceParams
from .polynomial_eigen import build_mk, leading_bounds, mk_spectrum
from .transfer_operators import assemble_M, assemble_N, spectrum
from .verification import verify_all

__version__ = "1.0.0"

__all__ = [
    "AccuracyWarning",
    "ConfigurationError",
    "DomainError",
    "EnumerationLimitError",
    "FareyToolkitError",
    "PoleError",
    "SpaceParams",
    "SpectralError",
    "ToolkitConfig",
    "VerificationError",
    "assemble_M",
    "assemble_N",
    "build_mk",
    "farey_sequence",
    "get_config",
    "knauf_partition",
    "leading_bounds",
    "load_config",
    "mk_spectrum",
    "set_config",
    "spectrum",
    "stern_brocot_level",
    "verify_all",
]
