"""rf SQUID response to an oscillating acceleration.

Phasors follow ``x(t) = X exp(i w t) + c.c.``, so a real tone ``A cos(w t)``
has ``X = A/2``. Phasors are plain Python ``complex`` numbers; the unit of
each one is given by the function that produces it. Angular frequencies are
in rad/s everywhere.

The flux equation driven by the acceleration-induced flux ``Phi_ac`` is

    L C dphi'' + (L/R) dphi' + dphi + (L/LJ) sin(dphi) = 2 pi Phi_ac / Phi0,

with ``V = -(Phi0 / 2 pi) dphi'``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (CONSTANTS, DEFAULT_STRICTNESS, ConfigurationError,
                   DomainError, NumericalError, Rectangle, RfCircuitConfig,
                   Ring, ValidityVerdict, dominance)
from .phase_engine import drift_velocity
from .tables import SweepTable

__all__ = [
    "DerivedCircuit", "TimeSeries", "SingularInversionError", "InstabilityError",
    "UnsupportedGeometryError", "josephson_inductance",
    "critical_current_from_inductance", "derived_circuit", "effective_flux",
    "voltage_response", "impedance", "acceleration_from_current",
    "acceleration_from_voltage", "current_from_acceleration",
    "voltage_from_acceleration", "linearized_ode_response", "transient_decay_rate",
    "max_step", "sinusoidal_drive", "simulate", "extract_fundamental",
    "steady_state_response", "passage_rate", "passage_rate_equivalent",
    "bandwidth_limit", "frequency_sweep", "invert_spectrum",
]

TWO_PI = 2.0 * math.pi
STEPS_PER_PERIOD = 200


class SingularInversionError(DomainError):
    """The inversion has a pole at the requested frequency (w = 0)."""


class InstabilityError(NumericalError):
    """The time integration produced a non-finite state."""


class UnsupportedGeometryError(DomainError):
    """The bound is only available for ring loops."""


@dataclass(frozen=True)
class DerivedCircuit:
    LJ: float
    omega0: float
    zeta: float
    betaL: float


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled channels sharing the time axis ``t``."""

    t: np.ndarray
    channels: dict

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ConfigurationError("time axis needs at least two samples")
        steps = np.diff(t)
        if not (np.all(steps > 0) and np.allclose(steps, steps[0], rtol=1e-6, atol=0.0)):
            raise ConfigurationError("time axis is not uniformly sampled")
        for name, values in self.channels.items():
            if len(values) != t.size:
                raise ConfigurationError(f"channel {name!r} length differs from t")

    @property
    def dt(self) -> float:
        return float((self.t[-1] - self.t[0]) / (len(self.t) - 1))

    def __getitem__(self, name) -> np.ndarray:
        return self.channels[name]


def josephson_inductance(Ic: float) -> float:
    return CONSTANTS.Phi0 / (TWO_PI * Ic)


def critical_current_from_inductance(LJ: float) -> float:
    return CONSTANTS.Phi0 / (TWO_PI * LJ)


def derived_circuit(config: RfCircuitConfig) -> DerivedCircuit:
    LJ = josephson_inductance(config.Ic)
    omega0 = 1.0 / math.sqrt(LJ * config.C)
    zeta = 1.0 / (2.0 * config.R * config.C * omega0)
    return DerivedCircuit(LJ, omega0, zeta, config.L / LJ)


def effective_flux(a_omega: complex, f: float, Idc: float) -> complex:
    """Flux phasor [Wb] induced by the acceleration phasor ``a_omega`` [m/s^2]."""
    if not Idc > 0.0:
        raise DomainError(f"Idc must be positive, got {Idc}")
    return CONSTANTS.Phi0 * f * a_omega / (TWO_PI * Idc)


def _resonant_denominator(omega, config: RfCircuitConfig):
    dc = derived_circuit(config)
    return config.C * (dc.omega0 ** 2 + 2j * dc.zeta * omega * dc.omega0 - omega ** 2)


def impedance(omega, config: RfCircuitConfig):
    """``Z = i w / (C (w0^2 + 2 i zeta w w0 - w^2))`` [Ohm]; vectorised over ``omega``."""
    return 1j * omega / _resonant_denominator(omega, config)


def voltage_response(I_omega, omega, config: RfCircuitConfig):
    """Voltage phasor [V] for a junction current phasor ``I_omega`` [A]."""
    return 1j * I_omega * omega / _resonant_denominator(omega, config)


def _form_factor(config, f):
    f = config.form_factor if f is None else f
    if not f > 0.0:
        raise DomainError(f"form factor must be positive, got {f}")
    return f


def acceleration_from_current(I_omega, omega, config: RfCircuitConfig, f: float | None = None):
    """Acceleration phasor [m/s^2] from the current phasor:
    ``(2 pi Idc / (f Phi0)) (L + 1/(C (w0^2 + 2 i zeta w w0 - w^2))) I``."""
    f = _form_factor(config, f)
    gain = TWO_PI * config.Idc / (f * CONSTANTS.Phi0)
    return gain * (config.L + 1.0 / _resonant_denominator(omega, config)) * I_omega


def acceleration_from_voltage(V_omega, omega, config: RfCircuitConfig, f: float | None = None):
    """Acceleration phasor [m/s^2] from the voltage phasor:
    ``(2 pi Idc / (f Phi0)) (L / Z + 1/(i w)) V``. Singular at ``w = 0``."""
    f = _form_factor(config, f)
    if np.any(np.asarray(omega) == 0.0):
        raise SingularInversionError("voltage inversion has a pole at omega = 0")
    gain = TWO_PI * config.Idc / (f * CONSTANTS.Phi0)
    return gain * (config.L / impedance(omega, config) + 1.0 / (1j * omega)) * V_omega


def current_from_acceleration(a_omega, omega, config: RfCircuitConfig, f: float | None = None):
    """Current phasor [A] that the acceleration phasor produces (inverse of
    :func:`acceleration_from_current`)."""
    f = _form_factor(config, f)
    if not config.Idc > 0.0:
        raise DomainError("Idc must be positive to invert the acceleration relation")
    gain = TWO_PI * config.Idc / (f * CONSTANTS.Phi0)
    return a_omega / (gain * (config.L + 1.0 / _resonant_denominator(omega, config)))


def voltage_from_acceleration(a_omega, omega, config: RfCircuitConfig, f: float | None = None):
    """Forward model: acceleration phasor -> current -> voltage phasor [V]."""
    I = current_from_acceleration(a_omega, omega, config, f)
    return impedance(omega, config) * I


def linearized_ode_response(omega, config: RfCircuitConfig):
    """Small-signal voltage per unit acceleration phasor [V s^2/m] of the flux
    equation, with ``sin(dphi) ~ dphi``.

    ``dphi_w = (f / Idc) / (1 + L/LJ - L C w^2 + i w L / R)`` and
    ``V_w = -i w (Phi0 / 2 pi) dphi_w``.
    """
    if not config.Idc > 0.0:
        raise DomainError(f"Idc must be positive, got {config.Idc}")
    dc = derived_circuit(config)
    L, C, R = config.L, config.C, config.R
    den = 1.0 + dc.betaL - L * C * omega ** 2 + 1j * omega * L / R
    dphi = (config.form_factor / config.Idc) / den
    return -1j * omega * CONSTANTS.Phi0 / TWO_PI * dphi


def _linear_rates(config: RfCircuitConfig):
    dc = derived_circuit(config)
    natural = math.sqrt((1.0 + dc.betaL) / (config.L * config.C))
    damping = 1.0 / (config.R * config.C)
    return natural, damping


def transient_decay_rate(config: RfCircuitConfig) -> float:
    """Decay rate [1/s] of the slowest free mode of the linearised flux equation."""
    natural, damping = _linear_rates(config)
    disc = damping ** 2 - 4.0 * natural ** 2
    if disc <= 0.0:
        return 0.5 * damping
    # smaller root of s^2 + damping s + natural^2, written to avoid cancellation
    return 2.0 * natural ** 2 / (damping + math.sqrt(disc))


def max_step(config: RfCircuitConfig, omega_drive: float = 0.0) -> float:
    """Largest admissible time step: 200 steps per period of the fastest of the
    drive, ``w0``, the linear natural frequency and the damping rate."""
    natural, damping = _linear_rates(config)
    fastest = max(omega_drive, derived_circuit(config).omega0, natural, damping)
    return TWO_PI / (STEPS_PER_PERIOD * fastest)


def sinusoidal_drive(a_omega: complex, omega: float) -> Callable:
    """Real acceleration ``a(t) = a_w exp(i w t) + c.c.``."""
    return lambda t: 2.0 * np.real(a_omega * np.exp(1j * omega * np.asarray(t, dtype=float)))


def simulate(config: RfCircuitConfig, drive: Callable | None, t_end: float, dt: float,
             omega_drive: float = 0.0) -> TimeSeries:
    """Integrate the nonlinear flux equation from rest with classical RK4.

    Parameters
    ----------
    drive : callable or None
        Acceleration ``a(t)`` [m/s^2]; must accept an array of times. ``None``
        means no drive.
    t_end, dt : float
        Record length and fixed step [s].
    omega_drive : float
        Highest angular frequency present in the drive, for the step rule.

    Returns
    -------
    TimeSeries
        Channels ``delta_phi``, ``V``, ``I_minus``, ``I_plus`` and ``phi_ac``.
    """
    if not (dt > 0.0 and t_end > 0.0):
        raise ConfigurationError("dt and t_end must be positive")
    limit = max_step(config, omega_drive)
    if dt > limit * (1.0 + 1e-12):
        raise ConfigurationError(f"time step {dt:g} s exceeds the step rule limit {limit:g} s")
    if drive is not None and not config.Idc > 0.0:
        raise DomainError("Idc must be positive to convert acceleration into flux")
    n = int(math.ceil(t_end / dt - 1e-9))
    t = dt * np.arange(n + 1)
    # drive sampled on the half-step grid used by the RK4 stages
    if drive is None:
        s = np.zeros(2 * n + 1)
    else:
        s = config.form_factor / config.Idc * np.asarray(drive(0.5 * dt * np.arange(2 * n + 1)), dtype=float)
        if s.shape != (2 * n + 1,):
            raise ConfigurationError("drive must return one value per time sample")
    dc = derived_circuit(config)
    inv_lc = 1.0 / (config.L * config.C)
    gamma = 1.0 / (config.R * config.C)
    beta = dc.betaL
    sin = math.sin

    def acc(x, u, sk):
        return inv_lc * (sk - x - beta * sin(x)) - gamma * u

    x = u = 0.0
    xs = np.empty(n + 1)
    us = np.empty(n + 1)
    xs[0] = us[0] = 0.0
    h2, h6 = 0.5 * dt, dt / 6.0
    s_list = s.tolist()
    for k in range(n):
        s0, s1, s2 = s_list[2 * k], s_list[2 * k + 1], s_list[2 * k + 2]
        k1x, k1u = u, acc(x, u, s0)
        k2x, k2u = u + h2 * k1u, acc(x + h2 * k1x, u + h2 * k1u, s1)
        k3x, k3u = u + h2 * k2u, acc(x + h2 * k2x, u + h2 * k2u, s1)
        k4x, k4u = u + dt * k3u, acc(x + dt * k3x, u + dt * k3u, s2)
        x += h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        u += h6 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        xs[k + 1] = x
        us[k + 1] = u
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(us))):
        raise InstabilityError("flux integration produced non-finite values")
    flux_unit = CONSTANTS.Phi0 / TWO_PI
    phi_ac = flux_unit * s[::2]
    I_minus = (phi_ac - flux_unit * xs) / config.L
    series = TimeSeries(t, {
        "delta_phi": xs,
        "V": -flux_unit * us,
        "I_minus": I_minus,
        "I_plus": config.Idc - I_minus,
        "phi_ac": phi_ac,
    })
    residual = flux_unit * xs + config.L * I_minus - phi_ac
    scale = max(np.max(np.abs(phi_ac)), np.max(np.abs(flux_unit * xs)))
    if np.max(np.abs(residual)) > 1e-9 * scale:
        raise NumericalError("flux relation violated in reconstructed channels")
    return series


def _project(t, x, omega, start, stop):
    """(1/T) * integral of x(t) exp(-i w t) over [start, stop], trapezoid rule
    with linearly interpolated end points."""
    inside = (t > start) & (t < stop)
    tt = np.concatenate(([start], t[inside], [stop]))
    xx = np.concatenate(([np.interp(start, t, x)], x[inside], [np.interp(stop, t, x)]))
    y = xx * np.exp(-1j * omega * tt)
    return complex(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(tt)) / (stop - start))


def extract_fundamental(series: TimeSeries, omega: float, settle_periods: int = 0,
                        analysis_periods: int = 10, channel: str = "V",
                        decay_rate: float | None = None) -> complex:
    """Steady-state phasor of ``channel`` at ``omega``.

    The first ``max(settle_periods, ceil(10 / decay_rate periods))`` drive
    periods are discarded, then ``X = (1/T) int x(t) exp(-i w t) dt`` over
    ``analysis_periods`` whole periods. With the ``X exp(i w t) + c.c.``
    convention a tone ``A cos(w t + p)`` gives ``X = (A/2) exp(i p)``.
    """
    if not omega > 0.0:
        raise ConfigurationError("omega must be positive")
    if analysis_periods < 1:
        raise ConfigurationError("need at least one analysis period")
    period = TWO_PI / omega
    settle = int(settle_periods)
    if decay_rate is not None and decay_rate > 0.0:
        settle = max(settle, int(math.ceil(10.0 / decay_rate / period)))
    t = np.asarray(series.t, dtype=float)
    start = t[0] + settle * period
    stop = start + analysis_periods * period
    if stop > t[-1] + 1e-9 * period:
        raise ConfigurationError(
            f"record of {t[-1] - t[0]:g} s is shorter than {settle} settle + "
            f"{analysis_periods} analysis periods ({stop - t[0]:g} s)")
    stop = min(stop, t[-1])
    return _project(t, np.asarray(series[channel], dtype=float), omega, start, stop)


def steady_state_response(config: RfCircuitConfig, omega: float, a_omega: complex,
                          dt: float | None = None, settle_periods: int = 2,
                          analysis_periods: int = 10) -> tuple[complex, TimeSeries]:
    """Drive the flux equation with a single tone and return the voltage phasor.

    The record covers the transient horizon plus ``analysis_periods`` whole
    periods. ``dt`` defaults to the step-rule limit rounded down so a period
    holds a whole number of steps.
    """
    period = TWO_PI / omega
    if dt is None:
        dt = period / math.ceil(period / max_step(config, omega))
    decay = transient_decay_rate(config)
    settle = max(int(settle_periods), int(math.ceil(10.0 / decay / period)))
    t_end = (settle + analysis_periods) * period
    series = simulate(config, sinusoidal_drive(a_omega, omega), t_end, dt, omega)
    V = extract_fundamental(series, omega, settle, analysis_periods, "V", decay)
    return V, series


def passage_rate(config: RfCircuitConfig) -> float:
    """Inverse passage time ``4 m Rs Idc / (hbar f)`` [rad/s]."""
    c = CONSTANTS
    return 4.0 * c.m * config.ring_Rs * config.Idc / (c.hbar * config.form_factor)


def passage_rate_equivalent(config: RfCircuitConfig) -> float:
    """Alternative form of the bound, ``hbar Idc / (m Rs^2 Ic)`` [rad/s].

    It coincides with :func:`passage_rate` only when ``f = 4 m^2 Rs^3 Ic / hbar^2``.
    """
    c = CONSTANTS
    return c.hbar * config.Idc / (c.m * config.ring_Rs ** 2 * config.Ic)


def _rate_verdict(omega, rate, label, strictness):
    if rate > 0.0:
        return dominance(omega, rate, label, strictness)
    return ValidityVerdict(0.0 if omega == 0 else math.inf,
                           "pass" if omega == 0 else "fail", label)


def bandwidth_limit(config: RfCircuitConfig, omega: float, geometry=None, material=None,
                    strictness: float = DEFAULT_STRICTNESS) -> list[ValidityVerdict]:
    """Grade the frequency-range conditions of a ring rf SQUID at ``omega``.

    ``passage_time``: ``w << 4 m Rs Idc / (hbar f)``.
    ``quasi_static``: ``Rs / v << 2 pi / w`` (needs ``geometry`` and ``material``
    for the drift speed).
    ``dc_contribution``: ``m^2 Rs^3 Ic << hbar^2 f``.
    """
    if isinstance(geometry, Rectangle):
        raise UnsupportedGeometryError("bandwidth bounds are only available for rings")
    Rs = geometry.Rs if isinstance(geometry, Ring) else config.ring_Rs
    c = CONSTANTS
    omega = abs(omega)
    out = [_rate_verdict(omega, passage_rate(config), "passage_time", strictness)]
    if geometry is not None and material is not None:
        v = drift_velocity(config.Idc, material, geometry)
        out.append(_rate_verdict(omega, TWO_PI * v / Rs, "quasi_static", strictness))
    out.append(dominance(c.m ** 2 * Rs ** 3 * config.Ic, c.hbar ** 2 * config.form_factor,
                         "dc_contribution", strictness))
    return out


_RANK = {"pass": 0, "warn": 1, "fail": 2}


def _worst(verdicts) -> str:
    return max((v.status for v in verdicts), key=_RANK.__getitem__)


def frequency_sweep(config: RfCircuitConfig, a_omega: complex, omega_grid,
                    geometry=None, material=None,
                    strictness: float = DEFAULT_STRICTNESS) -> SweepTable:
    """Voltage phasor against frequency for a fixed acceleration phasor.

    Per frequency the current follows from inverting the current-acceleration
    relation and ``V = Z I``. ``amplitude_ok`` fails where ``|I| > Ic``.
    """
    w = np.asarray(omega_grid, dtype=float)
    if np.any(w <= 0.0):
        raise DomainError("frequency grid must be positive")
    I = current_from_acceleration(a_omega, w, config)
    V = impedance(w, config) * I
    bw = [_worst(bandwidth_limit(config, wi, geometry, material, strictness)) for wi in w]
    amp = ["pass" if abs(i) <= config.Ic else "fail" for i in I]
    return SweepTable(
        {"omega": w, "ReV": V.real, "ImV": V.imag, "absI": np.abs(I),
         "bandwidth_ok": bw, "amplitude_ok": amp},
        {"omega": "rad/s", "ReV": "V", "ImV": "V", "absI": "A"})


def invert_spectrum(series: TimeSeries, config: RfCircuitConfig, omegas=None,
                    window: str = "integer_periods", geometry=None, material=None,
                    strictness: float = DEFAULT_STRICTNESS) -> SweepTable:
    """Recover acceleration phasors from a voltage record, bin by bin.

    Each requested ``omega`` is projected out of ``V(t)`` over the longest
    whole number of its periods that fits the record (``window="integer_periods"``)
    or over the full record (``window="full_record"``), then converted with
    the voltage-acceleration relation. With ``omegas=None`` the DFT bins of the
    full record are used. Bins that fail the passage-time bound keep their row
    and carry its status.
    """
    t = np.asarray(series.t, dtype=float)
    V = np.asarray(series["V"], dtype=float)
    span = t[-1] - t[0]
    if omegas is None:
        N = t.size
        spectrum = np.fft.rfft(V) / N
        k = np.arange(1, (N - 1) // 2 + 1)
        w = TWO_PI * k / (N * series.dt)
        Vw = spectrum[k] * np.exp(-1j * w * t[0])
    else:
        w = np.asarray(omegas, dtype=float)
        if np.any(w == 0.0):
            raise SingularInversionError("the omega = 0 bin cannot be inverted")
        if np.any(w < 0.0):
            raise DomainError("requested bins must be positive")
        if span < 2.0 * TWO_PI / w.min():
            raise ConfigurationError("record shorter than two periods of the lowest bin")
        if window not in ("integer_periods", "full_record"):
            raise ConfigurationError(f"unknown window policy {window!r}")
        Vw = np.empty(w.size, dtype=complex)
        for i, wi in enumerate(w):
            period = TWO_PI / wi
            if window == "integer_periods":
                stop = t[0] + math.floor(span / period * (1.0 + 1e-12)) * period
            else:
                stop = t[-1]
            Vw[i] = _project(t, V, wi, t[0], min(stop, t[-1]))
    a = acceleration_from_voltage(Vw, w, config)
    flags = [bandwidth_limit(config, wi, geometry, material, strictness)[0].status for wi in w]
    return SweepTable({"omega": w, "Re_a": a.real, "Im_a": a.imag, "bandwidth": flags},
                      {"omega": "rad/s", "Re_a": "m/s^2", "Im_a": "m/s^2"})
