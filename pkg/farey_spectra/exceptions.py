"""
Exception hierarchy for the Farey spectral toolkit
"""


class FareyToolkitError(Exception):
    """Base class for every toolkit error"""


class DomainError(FareyToolkitError, ValueError):
    """Argument outside the domain an operation is defined on"""


class PoleError(DomainError):
    """Gamma / Pochhammer pole or forbidden hypergeometric parameter"""


class ConfigurationError(FareyToolkitError, ValueError):
    """Malformed environment variable or command-line setting"""


class EnumerationLimitError(FareyToolkitError):
    """Farey level larger than the configured enumeration cap"""

    def __init__(self, level: int, cap: int):
        super().__init__(f"level {level} exceeds the enumeration cap {cap} (set FAREY_MAX_LEVEL to raise it)")
        self.level = level
        self.cap = cap


class SpectralError(FareyToolkitError):
    """Eigen-solver failure or a violated spectral bound"""


class VerificationError(FareyToolkitError):
    """Raised by strict verification runs when a check fails"""

    def __init__(self, failed_ids):
        self.failed_ids = list(failed_ids)
        super().__init__(f"{len(self.failed_ids)} check(s) failed: {', '.join(self.failed_ids)}")


class AccuracyWarning(UserWarning):
    """Evaluation requested outside the validated accuracy region"""
