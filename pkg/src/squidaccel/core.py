"""Physical constants, device records and the "much smaller than" comparator.

All quantities are SI. Nothing here converts units.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

__all__ = [
    "Constants", "CONSTANTS", "constants",
    "Material", "Ring", "Rectangle", "WireGeometry",
    "DcSquidConfig", "RfCircuitConfig", "ValidityVerdict", "dominance",
    "DEFAULT_STRICTNESS",
    "SquidError", "DomainError", "NumericalError", "ConfigurationError",
]


class SquidError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SquidError, ValueError):
    """An argument lies outside the domain where the model is defined."""


class NumericalError(SquidError, ArithmeticError):
    """A numerical procedure failed to converge or produced non-finite values."""


class ConfigurationError(SquidError, ValueError):
    """A run configuration is inconsistent (step size, window length, ...)."""


@dataclass(frozen=True)
class Constants:
    hbar: float
    elementary_charge: float
    electron_mass: float
    cooper_mass: float
    cooper_charge: float
    flux_quantum: float
    boltzmann: float

    @property
    def m(self) -> float:
        return self.cooper_mass

    @property
    def q(self) -> float:
        return self.cooper_charge

    @property
    def e(self) -> float:
        return self.elementary_charge

    @property
    def Phi0(self) -> float:
        return self.flux_quantum


# CODATA 2018 (h, e, k_B exact since the 2019 SI redefinition).
_PLANCK = 6.62607015e-34
_E = 1.602176634e-19
_ME = 9.1093837015e-31

CONSTANTS = Constants(
    hbar=_PLANCK / (2.0 * math.pi),
    elementary_charge=_E,
    electron_mass=_ME,
    cooper_mass=2.0 * _ME,
    cooper_charge=2.0 * _E,
    flux_quantum=_PLANCK / (2.0 * _E),
    boltzmann=1.380649e-23,
)


def constants() -> Constants:
    """Return the fixed constant set (the same object on every call)."""
    return CONSTANTS


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (value > 0.0 and math.isfinite(value)):
            raise DomainError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class Material:
    """Superconductor parameters.

    Attributes
    ----------
    n : float
        Cooper pair density [m^-3].
    lam : float
        London penetration depth [m].
    xi0 : float
        Coherence length [m].
    T, Tc : float
        Operating and critical temperatures [K]; ``T = 0`` is allowed.
    vF : float
        Fermi velocity [m/s].
    """

    n: float
    lam: float
    xi0: float
    T: float
    Tc: float
    vF: float

    def __post_init__(self):
        _require_positive(n=self.n, lam=self.lam, xi0=self.xi0, Tc=self.Tc, vF=self.vF)
        if not (0.0 <= self.T < self.Tc):
            raise DomainError(f"need 0 <= T < Tc, got T={self.T}, Tc={self.Tc}")


@dataclass(frozen=True)
class Ring:
    """Circular loop of radius ``Rs``; ``dRs`` is the arm radius mismatch."""

    Rs: float
    d: float
    dRs: float = 0.0

    def __post_init__(self):
        _require_positive(Rs=self.Rs, d=self.d)
        if self.dRs < 0.0:
            raise DomainError(f"dRs must be >= 0, got {self.dRs}")
        if self.d >= self.Rs:
            warnings.warn(f"wire diameter d={self.d} is not small against Rs={self.Rs}",
                          stacklevel=3)

    tag = "ring"


@dataclass(frozen=True)
class Rectangle:
    """Rectangular loop with half-length ``b`` and arm height ``c``."""

    b: float
    c: float
    d: float

    def __post_init__(self):
        _require_positive(b=self.b, c=self.c, d=self.d)
        if self.d >= min(self.b, self.c):
            warnings.warn(f"wire diameter d={self.d} is not small against b, c",
                          stacklevel=3)

    tag = "rectangle"


WireGeometry = Union[Ring, Rectangle]


@dataclass(frozen=True)
class DcSquidConfig:
    geometry: WireGeometry
    material: Material
    Ic: float

    def __post_init__(self):
        _require_positive(Ic=self.Ic)


@dataclass(frozen=True)
class RfCircuitConfig:
    """Lumped rf SQUID: loop inductance ``L``, junction shunted by ``R`` and ``C``.

    ``form_factor`` [A s^2/m] converts acceleration into effective flux and
    ``ring_Rs`` is the loop radius used by the bandwidth bounds.
    """

    L: float
    R: float
    C: float
    Ic: float
    Idc: float
    form_factor: float
    ring_Rs: float

    def __post_init__(self):
        _require_positive(L=self.L, R=self.R, C=self.C, Ic=self.Ic,
                          form_factor=self.form_factor, ring_Rs=self.ring_Rs)
        if not (self.Idc >= 0.0 and math.isfinite(self.Idc)):
            raise DomainError(f"Idc must be >= 0, got {self.Idc}")


DEFAULT_STRICTNESS = 0.1


@dataclass(frozen=True)
class ValidityVerdict:
    ratio: float
    status: str
    label: str

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def as_dict(self) -> dict:
        return {"label": self.label, "ratio": self.ratio, "status": self.status}


def dominance(numerator: float, denominator: float, label: str = "",
              strictness: float = DEFAULT_STRICTNESS) -> ValidityVerdict:
    """Grade ``numerator << denominator``.

    ``pass`` when the ratio is below ``strictness`` (0.1 by default), ``warn``
    below 1 and ``fail`` otherwise. Magnitudes are compared, so the sign of the
    numerator does not matter.
    """
    if not denominator > 0.0:
        raise DomainError(f"denominator must be positive, got {denominator!r}")
    if not 0.0 < strictness <= 1.0:
        raise DomainError(f"strictness must lie in (0, 1], got {strictness!r}")
    ratio = abs(numerator) / denominator
    if ratio < strictness:
        status = "pass"
    elif ratio < 1.0:
        status = "warn"
    else:
        status = "fail"
    return ValidityVerdict(ratio=ratio, status=status, label=label)
