"""Thomas-Fermi estimate of how far an acceleration pushes the condensate's
centre of mass off the wire axis.

In the Thomas-Fermi limit the density inside a hard-walled wire of diameter
``d`` is ``n ∝ 1 + m a z / mu``, linear across the cross-section. The
centre-of-mass shift is the density-weighted mean of ``z``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (CONSTANTS, DEFAULT_STRICTNESS, DomainError, Material,
                   NumericalError, ValidityVerdict, dominance)
from .tables import SweepTable

__all__ = [
    "CondensateParams", "DeviationResult", "RegimeError", "chemical_potential",
    "coupling_constant", "condensate_params", "deviation_closed",
    "deviation_numeric", "deviation_moments", "deviation_bound",
    "deviation_vs_temperature",
]


class RegimeError(DomainError):
    """The Thomas-Fermi density would turn negative inside the wire."""


@dataclass(frozen=True)
class CondensateParams:
    """``gc`` is the BCS-style estimate evaluated literally; its units are not
    those of a contact coupling (J m^3), so treat it as a bookkeeping number."""

    mu: float
    gc: float
    N0: float


@dataclass(frozen=True)
class DeviationResult:
    dr_z: float
    bound: ValidityVerdict


def chemical_potential(material: Material, T: float | None = None) -> float:
    """``mu = hbar^2 (Tc - T) / (2 m xi0^2 Tc)``; ``T`` defaults to ``material.T``."""
    T = material.T if T is None else T
    if T > material.Tc:
        raise DomainError(f"T={T} exceeds Tc={material.Tc}")
    if T < 0.0:
        raise DomainError(f"T must be >= 0, got {T}")
    c = CONSTANTS
    return c.hbar ** 2 * (material.Tc - T) / (2.0 * c.m * material.xi0 ** 2 * material.Tc)


def density_of_states(material: Material) -> float:
    """``N(0) = m^2 vF / (2 pi^2 hbar^3)`` at the Fermi surface."""
    c = CONSTANTS
    return c.m ** 2 * material.vF / (2.0 * math.pi ** 2 * c.hbar ** 3)


def coupling_constant(material: Material) -> float:
    c = CONSTANTS
    e_xi = c.hbar ** 2 / (2.0 * c.m * material.xi0 ** 2)
    return 0.107 * e_xi ** 2 * density_of_states(material) / (c.boltzmann * material.Tc)


def condensate_params(material: Material) -> CondensateParams:
    return CondensateParams(chemical_potential(material), coupling_constant(material),
                            density_of_states(material))


def deviation_closed(a: float, d: float, mu: float) -> float:
    """``dr_z = m a d^2 / (24 mu)``."""
    if not mu > 0.0:
        raise DomainError(f"chemical potential must be positive, got {mu}")
    return CONSTANTS.m * a * d * d / (24.0 * mu)


def _polar_moments(a, d, mu, n_r, n_theta, radial_weight):
    """z and y density-weighted means over the disk of radius d/2.

    The density is carried as background (1 inside the wall) plus the
    acceleration term ``m a z / mu``, which is ~1e-12 for realistic wires and
    would be lost to rounding if the two were added first. Angular nodes come
    in (theta, theta + pi) pairs whose coordinates are exact negatives, so the
    odd moments of the background cancel exactly.
    """
    x, w = np.polynomial.legendre.leggauss(n_r)
    R = 0.5 * d
    r = 0.5 * R * (x + 1.0)
    wr = 0.5 * R * w * (r if radial_weight else 1.0)
    theta = 2.0 * math.pi * np.arange(n_theta // 2) / n_theta
    wt = 2.0 * math.pi / n_theta
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    W = np.broadcast_to(wr[:, None] * wt, rr.shape)
    z, y = rr * np.sin(tt), rr * np.cos(tt)
    k = CONSTANTS.m * a / mu
    pert_p, pert_m = k * z, k * (-z)
    background = np.sum(W * 2.0)
    mass = background + np.sum(W * (pert_p + pert_m))
    mz = np.sum(W * (z + (-z))) + np.sum(W * (z * pert_p + (-z) * pert_m))
    my = np.sum(W * (y + (-y))) + np.sum(W * (y * pert_p + (-y) * pert_m))
    return mz / mass, my / mass


def deviation_moments(a: float, d: float, mu: float, area_measure: bool = False,
                      rtol: float = 1e-10, n_r: int = 64, n_theta: int = 256,
                      max_doublings: int = 8) -> tuple[float, float]:
    """Numerical ``(z, y)`` centre-of-mass shift over the wire cross-section.

    The default weights the polar grid with ``dr dtheta``; ``area_measure=True``
    uses ``r dr dtheta`` instead. The grid is doubled in both directions until
    the z-shift changes by less than ``rtol``.
    """
    if not mu > 0.0:
        raise DomainError(f"chemical potential must be positive, got {mu}")
    if CONSTANTS.m * abs(a) * 0.5 * d / mu >= 1.0:
        raise RegimeError("Thomas-Fermi density turns negative inside the wire "
                          "(m |a| d / (2 mu) >= 1)")
    z_old, y_old = _polar_moments(a, d, mu, n_r, n_theta, area_measure)
    for _ in range(max_doublings):
        n_r, n_theta = 2 * n_r, 2 * n_theta
        z, y = _polar_moments(a, d, mu, n_r, n_theta, area_measure)
        if abs(z - z_old) <= rtol * abs(z):
            return float(z), float(y)
        z_old = z
    raise NumericalError("cross-section quadrature did not converge")


def deviation_numeric(a: float, d: float, mu: float) -> float:
    return deviation_moments(a, d, mu)[0]


def deviation_bound(dr_z: float, v: float, strictness: float = DEFAULT_STRICTNESS) -> ValidityVerdict:
    """Compare the shift with the condensate wavelength ``hbar / (m v)``."""
    if not v > 0.0:
        raise DomainError(f"drift speed must be positive, got {v}")
    return dominance(dr_z, CONSTANTS.hbar / (CONSTANTS.m * v), "deviation", strictness)


def deviation_vs_temperature(material: Material, a: float, d: float,
                             temperatures=None) -> SweepTable:
    """``dr_z`` on a temperature grid below ``Tc`` (default: ten points on
    ``[0, 0.9 Tc]``)."""
    if temperatures is None:
        temperatures = np.linspace(0.0, 0.9 * material.Tc, 10)
    T = np.asarray(temperatures, dtype=float)
    if np.any(T >= material.Tc):
        raise DomainError("temperature grid must lie strictly below Tc")
    mu = np.array([chemical_potential(material, t) for t in T])
    dr = np.array([deviation_closed(a, d, m) for m in mu])
    return SweepTable({"T": T, "mu": mu, "dr_z": dr}, {"T": "K", "mu": "J", "dr_z": "m"})
