"""dc SQUID readout under a constant transverse acceleration.

The interference current ``I = 2 Ic cos(dphi/2)`` and the acceleration phase
``dphi = f a / I`` must hold together. Eliminating ``I`` leaves

    h(dphi) = 2 Ic dphi cos(dphi/2) = f a,

which is solved by bisection on the branch that starts at ``dphi = 0``. ``h``
peaks at ``dphi*`` (``tan(dphi*/2) = 2/dphi*``), which caps the measurable
acceleration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (CONSTANTS, DEFAULT_STRICTNESS, DcSquidConfig, DomainError,
                   Ring, ValidityVerdict, dominance)
from .numerics import bisect
from .phase_engine import drift_velocity, form_factor, kinematics, winding_number
from .tables import SweepTable

__all__ = [
    "OperatingPoint", "ExceedsCriticalError", "ImpossibleReadingError",
    "AmbiguousReadingError", "interference_current", "critical_phase",
    "max_acceleration", "operating_point", "weak_shift_current",
    "acceleration_from_current", "dc_sweep", "validity_report",
]


class ExceedsCriticalError(DomainError):
    """The requested acceleration lies beyond the critical operating point."""

    def __init__(self, a: float, a_max: float):
        super().__init__(f"acceleration {a:g} m/s^2 exceeds the critical operating "
                         f"point; maximal admissible acceleration is {a_max:g} m/s^2")
        self.a = a
        self.a_max = a_max


class ImpossibleReadingError(DomainError):
    """Measured current above ``2 Ic``."""


class AmbiguousReadingError(DomainError):
    """Measured current below the principal-branch window."""


@dataclass(frozen=True)
class OperatingPoint:
    a: float
    delta_phi: float
    I: float
    ratio: float


def interference_current(delta_phi: float, Ic: float) -> float:
    return 2.0 * Ic * math.cos(0.5 * delta_phi)


@lru_cache(maxsize=None)
def critical_phase() -> float:
    """Maximiser of ``x cos(x/2)`` on ``[0, pi]``."""
    return bisect(lambda x: math.cos(0.5 * x) - 0.5 * x * math.sin(0.5 * x), 0.0, math.pi)


def _peak() -> float:
    x = critical_phase()
    return x * math.cos(0.5 * x)


def _f(config: DcSquidConfig) -> float:
    return form_factor(config.geometry, config.material).f


def max_acceleration(config: DcSquidConfig) -> float:
    return 2.0 * config.Ic * _peak() / _f(config)


def operating_point(a: float, config: DcSquidConfig) -> OperatingPoint:
    """Self-consistent ``(dphi, I)`` for a constant acceleration ``a >= 0``.

    Raises
    ------
    ExceedsCriticalError
        When ``f a`` exceeds the peak of ``h``; carries ``a_max``.
    """
    if not a >= 0.0:
        raise DomainError(f"acceleration must be >= 0, got {a}")
    Ic = config.Ic
    if a == 0.0:
        return OperatingPoint(0.0, 0.0, 2.0 * Ic, 1.0)
    f = _f(config)
    target = f * a / (2.0 * Ic)
    if target > _peak():
        raise ExceedsCriticalError(a, max_acceleration(config))
    x = bisect(lambda x: x * math.cos(0.5 * x) - target, 0.0, critical_phase())
    ratio = math.cos(0.5 * x)
    return OperatingPoint(a, x, 2.0 * Ic * ratio, ratio)


def weak_shift_current(a: float, config: DcSquidConfig) -> float:
    """Small-acceleration current with ``I -> 2 Ic`` inside the correction:
    ``2 Ic (1 - f^2 a^2 / (32 Ic^2))``."""
    f = _f(config)
    Ic = config.Ic
    return 2.0 * Ic * (1.0 - (f * a) ** 2 / (32.0 * Ic ** 2))


def acceleration_from_current(I_meas: float, config: DcSquidConfig) -> float:
    """Invert the readout: ``a = (2 I / f) arccos(I / 2Ic)`` on the principal branch."""
    r = I_meas / (2.0 * config.Ic)
    if r > 1.0:
        raise ImpossibleReadingError(
            f"measured current {I_meas:g} A exceeds 2 Ic = {2.0 * config.Ic:g} A")
    r_min = math.cos(0.5 * critical_phase())
    if r < r_min * (1.0 - 1e-12):
        raise AmbiguousReadingError(
            f"measured current {I_meas:g} A is below the principal-branch window "
            f"(I/2Ic >= {r_min:.6f})")
    # arccos(r) = 2 arcsin(sqrt((1 - r)/2)) keeps precision for r near 1
    half = 2.0 * math.asin(math.sqrt(max(0.0, 1.0 - r) / 2.0))
    return 2.0 * I_meas * half / _f(config)


def _arm_winding(config: DcSquidConfig, I: float) -> float:
    geo = config.geometry
    if isinstance(geo, Ring):
        return winding_number(geo.Rs, I, _f(config))
    v = drift_velocity(I, config.material, geo)
    if v == 0.0:
        return 0.0
    kin = kinematics(geo, v)
    return CONSTANTS.m * v * v * kin.transit_time / (2.0 * CONSTANTS.hbar * math.pi)


def validity_report(config: DcSquidConfig, a: float,
                    strictness: float = DEFAULT_STRICTNESS) -> list[ValidityVerdict]:
    """Grade the weak-shift, winding-number and arm-asymmetry conditions.

    The weak-shift ratio is ``f a / I`` with the self-consistent current; past
    the critical point the critical current ``2 Ic cos(dphi*/2)`` is used, which
    always fails.
    """
    f = _f(config)
    a = abs(a)
    try:
        I = operating_point(a, config).I
    except ExceedsCriticalError:
        I = interference_current(critical_phase(), config.Ic)
    out = [dominance(f * a, I, "weak_regime", strictness),
           dominance(_arm_winding(config, I), 1.0, "winding", strictness)]
    geo = config.geometry
    if isinstance(geo, Ring):
        scale = (CONSTANTS.m * geo.Rs ** 2 * config.Ic / (CONSTANTS.hbar * f)) ** 2
        out.append(dominance(a * geo.dRs, scale, "asymmetry", strictness))
    else:
        out.append(ValidityVerdict(0.0, "pass", "asymmetry"))
    return out


def dc_sweep(config: DcSquidConfig, a_grid, strictness: float = DEFAULT_STRICTNESS) -> SweepTable:
    """Operating points and validity flags over an increasing acceleration grid."""
    a_grid = np.asarray(a_grid, dtype=float)
    n = a_grid.size
    I = np.full(n, np.nan)
    ratio = np.full(n, np.nan)
    dphi = np.full(n, np.nan)
    flags = {"weak_regime": [], "winding_ok": [], "asymmetry_ok": []}
    failures = []
    for i, a in enumerate(a_grid):
        try:
            op = operating_point(a, config)
        except DomainError as exc:
            failures.append((i, str(exc)))
        else:
            I[i], ratio[i], dphi[i] = op.I, op.ratio, op.delta_phi
        weak, wind, asym = validity_report(config, a, strictness)
        flags["weak_regime"].append(weak.status)
        flags["winding_ok"].append(wind.status)
        flags["asymmetry_ok"].append(asym.status)
    columns = {"a": a_grid, "I": I, "ratio": ratio, "delta_phi": dphi, **flags}
    units = {"a": "m/s^2", "I": "A", "delta_phi": "rad"}
    return SweepTable(columns, units, failures)
