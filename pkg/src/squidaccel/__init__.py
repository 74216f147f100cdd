"""Simulation and readout inversion for SQUID-based interferometric accelerometers."""
from .core import (CONSTANTS, ConfigurationError, DcSquidConfig, DomainError,
                   Material, NumericalError, Rectangle, RfCircuitConfig, Ring,
                   SquidError, ValidityVerdict, constants, dominance)

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS", "ConfigurationError", "DcSquidConfig", "DomainError", "Material",
    "NumericalError", "Rectangle", "RfCircuitConfig", "Ring", "SquidError",
    "ValidityVerdict", "constants", "dominance",
]
