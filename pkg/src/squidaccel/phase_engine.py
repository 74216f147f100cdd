"""Cooper-pair arm trajectories and the phases they accumulate.

Two independent routes to the interference phase live here: numerical
quadrature of the free-particle action along explicit arm trajectories, and
the closed forms obtained by doing those integrals by hand. Tests pit one
against the other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import (CONSTANTS, DomainError, Material, Rectangle, Ring,
                   WireGeometry)
from .numerics import simpson

__all__ = [
    "Segment", "Trajectory", "KinematicState", "FormFactor", "PhaseDifference",
    "form_factor", "drift_velocity", "kinematics", "arm_trajectory",
    "action_phase", "gravity_phase", "quadrature_phase_difference",
    "gravity_phase_difference", "phase_difference_closed", "asymmetry_phase",
    "winding_number",
]

_QUAD_RTOL = 1e-10

VectorFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Segment:
    """One analytic piece of a path; ``position``/``velocity`` map an array of
    times to a ``(3, len(t))`` array."""

    position: VectorFn
    velocity: VectorFn
    t_start: float
    t_end: float


@dataclass(frozen=True)
class Trajectory:
    segments: tuple
    arm: str

    @property
    def t_start(self) -> float:
        return self.segments[0].t_start

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end

    def position(self, t) -> np.ndarray:
        return self._dispatch(t, "position")

    def velocity(self, t) -> np.ndarray:
        return self._dispatch(t, "velocity")

    def _dispatch(self, t, attr):
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.full((3, t.size), np.nan)
        for k, seg in enumerate(self.segments):
            last = k == len(self.segments) - 1
            mask = (t >= seg.t_start) & ((t <= seg.t_end) if last else (t < seg.t_end))
            if mask.any():
                out[:, mask] = getattr(seg, attr)(t[mask])
        return out[:, 0] if scalar else out

    def validate(self, rtol: float = 1e-6) -> None:
        """Check segment contiguity in time and that velocity = d(position)/dt.

        The derivative is probed with central differences (step 1e-6 of the
        segment duration) at a few interior points of every segment.
        """
        if self.arm not in ("plus", "minus"):
            raise DomainError(f"arm must be 'plus' or 'minus', got {self.arm!r}")
        for prev, nxt in zip(self.segments, self.segments[1:]):
            if prev.t_end != nxt.t_start:
                raise DomainError("trajectory segments are not contiguous in time")
        for seg in self.segments:
            span = seg.t_end - seg.t_start
            if not span > 0.0:
                raise DomainError("empty trajectory segment")
            h = 1e-6 * span
            t = seg.t_start + span * np.array([0.1, 0.37, 0.5, 0.81, 0.9])
            fd = (seg.position(t + h) - seg.position(t - h)) / (2.0 * h)
            vel = seg.velocity(t)
            scale = np.maximum(np.linalg.norm(vel, axis=0), np.finfo(float).tiny)
            err = np.linalg.norm(fd - vel, axis=0) / scale
            if np.any(err > rtol):
                raise DomainError(f"velocity is not the derivative of position "
                                  f"(max relative mismatch {err.max():.3g})")


@dataclass(frozen=True)
class KinematicState:
    v: float
    Omega: float          # nan for rectangles
    transit_time: float


@dataclass(frozen=True)
class FormFactor:
    f: float
    geometry_tag: str

    def __float__(self) -> float:
        return self.f


@dataclass(frozen=True)
class PhaseDifference:
    """``value`` is the reported magnitude; ``signed`` is ``phi_plus - phi_minus``
    exactly as the arm parametrisation produces it."""

    value: float
    signed: float


def form_factor(geometry: WireGeometry, material: Material) -> FormFactor:
    """Geometry factor ``f`` [A s^2/m] with ``delta_phi = f a / I``.

    Ring: ``8 m Rs^2 q n d lam / hbar``;
    rectangle: ``4 m c (2b + c) q n d lam / hbar``.
    """
    c = CONSTANTS
    carriers = c.q * material.n * geometry.d * material.lam
    if isinstance(geometry, Ring):
        return FormFactor(8.0 * c.m * geometry.Rs ** 2 * carriers / c.hbar, "ring")
    if isinstance(geometry, Rectangle):
        g = geometry
        return FormFactor(4.0 * c.m * g.c * (2.0 * g.b + g.c) * carriers / c.hbar, "rectangle")
    raise TypeError(f"unsupported geometry {geometry!r}")


def drift_velocity(I: float, material: Material, geometry: WireGeometry) -> float:
    """Drift speed when the total current ``I`` splits evenly: ``I/2 = q n v d lam``."""
    if I < 0.0:
        raise DomainError(f"current must be >= 0, got {I}")
    return I / (2.0 * CONSTANTS.q * material.n * geometry.d * material.lam)


def kinematics(geometry: WireGeometry, v: float) -> KinematicState:
    if not v > 0.0:
        raise DomainError(f"drift speed must be positive, got {v}")
    if isinstance(geometry, Ring):
        omega = v / geometry.Rs
        return KinematicState(v, omega, math.pi / omega)
    return KinematicState(v, math.nan, (2.0 * geometry.c + 2.0 * geometry.b) / v)


def _ring_segment(Rs: float, sign: float, v: float, a: float) -> Segment:
    Om = v / Rs
    zeros = np.zeros_like

    def pos(t):
        return np.array([Rs * np.cos(Om * t), sign * Rs * np.sin(Om * t) + 0.5 * a * t * t, zeros(t)])

    def vel(t):
        return np.array([-v * np.sin(Om * t), sign * v * np.cos(Om * t) + a * t, zeros(t)])

    return Segment(pos, vel, 0.0, math.pi / Om)


def _vertical(sign: float, v: float, a: float, t0, t1) -> Segment:
    # y = sign*v*t + a t^2/2, x = z = 0
    def pos(t):
        z = np.zeros_like(t)
        return np.array([z, sign * v * t + 0.5 * a * t * t, z])

    def vel(t):
        z = np.zeros_like(t)
        return np.array([z, sign * v + a * t, z])

    return Segment(pos, vel, t0, t1)


def _horizontal(v: float, a: float, t0, t1) -> Segment:
    def pos(t):
        return np.array([v * t, 0.5 * a * t * t, np.zeros_like(t)])

    def vel(t):
        return np.array([np.full_like(t, v), a * t, np.zeros_like(t)])

    return Segment(pos, vel, t0, t1)


def arm_trajectory(geometry: WireGeometry, arm: str, v: float, a: float) -> Trajectory:
    """Centre-of-mass path of the Cooper pairs in one arm.

    Ring arms are half circles, ``(Rs cos Wt, +-Rs sin Wt + a t^2/2, 0)`` with
    ``W = v/Rs`` for ``t`` in ``[0, pi/W]``. Rectangle arms are three straight
    pieces: a vertical leg up to ``t1 = c/v``, the horizontal leg up to
    ``t2 = t1 + 2b/v`` and a second vertical leg up to ``t3 = t1 + t2``. The
    plus arm runs its first vertical leg at ``-v`` and its last at ``+v``;
    the minus arm the other way round. Each piece is parametrised from its own
    absolute time, so positions jump between pieces while times stay
    contiguous.
    """
    if not v > 0.0:
        raise DomainError(f"drift speed must be positive, got {v}")
    if arm not in ("plus", "minus"):
        raise DomainError(f"arm must be 'plus' or 'minus', got {arm!r}")
    sign = 1.0 if arm == "plus" else -1.0
    if isinstance(geometry, Ring):
        segs = (_ring_segment(geometry.Rs, sign, v, a),)
    elif isinstance(geometry, Rectangle):
        t1 = geometry.c / v
        t2 = 2.0 * geometry.b / v + t1
        t3 = t1 + t2
        segs = (_vertical(-sign, v, a, 0.0, t1),
                _horizontal(v, a, t1, t2),
                _vertical(sign, v, a, t2, t3))
    else:
        raise TypeError(f"unsupported geometry {geometry!r}")
    traj = Trajectory(segs, arm)
    traj.validate()
    return traj


def _kinetic_density(seg: Segment) -> VectorFn:
    k = CONSTANTS.m / (2.0 * CONSTANTS.hbar)
    return lambda t: k * np.sum(seg.velocity(t) ** 2, axis=0)


def action_phase(trajectory: Trajectory) -> float:
    """Phase ``int m |r'(t)|^2 / (2 hbar) dt`` accumulated along one arm."""
    return sum(simpson(_kinetic_density(s), s.t_start, s.t_end, rtol=_QUAD_RTOL)
               for s in trajectory.segments)


def gravity_phase(trajectory: Trajectory, g) -> float:
    """Potential-energy phase ``int m g.r(t) / hbar dt``.

    ``g`` is either a 3-vector or a scalar taken along ``+y``.
    """
    gvec = np.asarray(g, dtype=float)
    if gvec.ndim == 0:
        gvec = np.array([0.0, float(gvec), 0.0])
    if not np.any(gvec):
        return 0.0
    k = CONSTANTS.m / CONSTANTS.hbar
    total = 0.0
    for seg in trajectory.segments:
        total += simpson(lambda t, seg=seg: k * (gvec @ seg.position(t)),
                         seg.t_start, seg.t_end, rtol=_QUAD_RTOL)
    return total


def _paired_segments(plus: Trajectory, minus: Trajectory) -> Sequence[tuple]:
    if len(plus.segments) != len(minus.segments):
        raise DomainError("arms have different segment structure")
    pairs = list(zip(plus.segments, minus.segments))
    for p, m in pairs:
        if (p.t_start, p.t_end) != (m.t_start, m.t_end):
            raise DomainError("arms are not parametrised over the same time windows")
    return pairs


def quadrature_phase_difference(geometry: WireGeometry, v: float, a: float) -> PhaseDifference:
    """``phi_plus - phi_minus`` by quadrature of the difference of the two
    kinetic integrands, segment by segment.

    Integrating the difference directly avoids cancelling two large
    accumulated phases against each other when the drift speed is high.
    A uniform acceleration adds the same ``a t`` to both arms over the same
    time windows, so ``v+ - v-`` is taken from the unaccelerated paths; forming
    it from the accelerated ones would cancel ``a t`` against itself and lose
    digits once ``a t >> v``.
    """
    plus = arm_trajectory(geometry, "plus", v, a)
    minus = arm_trajectory(geometry, "minus", v, a)
    plus0 = arm_trajectory(geometry, "plus", v, 0.0)
    minus0 = arm_trajectory(geometry, "minus", v, 0.0)
    k = CONSTANTS.m / (2.0 * CONSTANTS.hbar)
    total = 0.0
    for (p, m), (p0, m0) in zip(_paired_segments(plus, minus), _paired_segments(plus0, minus0)):
        def integrand(t, p=p, m=m, p0=p0, m0=m0):
            diff = p0.velocity(t) - m0.velocity(t)
            return k * np.sum(diff * (p.velocity(t) + m.velocity(t)), axis=0)
        total += simpson(integrand, p.t_start, p.t_end, rtol=_QUAD_RTOL)
    return PhaseDifference(abs(total), total)


def gravity_phase_difference(geometry: Ring, v: float, g: float) -> PhaseDifference:
    """Potential-energy phase difference between the two unaccelerated ring arms."""
    if not isinstance(geometry, Ring):
        raise DomainError("the gravitational phase is only defined here for rings")
    plus = arm_trajectory(geometry, "plus", v, 0.0)
    minus = arm_trajectory(geometry, "minus", v, 0.0)
    diff = gravity_phase(plus, g) - gravity_phase(minus, g)
    return PhaseDifference(abs(diff), diff)


def phase_difference_closed(geometry: WireGeometry, a: float, I: float,
                            f: float | FormFactor | None = None,
                            material: Material | None = None,
                            v: float | None = None) -> float:
    """Closed-form interference phase.

    Ring: ``f a / I``, with ``f`` given directly or computed from ``material``.
    Rectangle: ``2 c (2b + c) m a / (hbar v)``, with ``v`` given directly or
    obtained from ``I`` through the drift-velocity relation (needs ``material``).
    Passing ``f`` for a rectangle also works and returns ``f a / I``.
    """
    if not I > 0.0:
        raise DomainError(f"current must be positive, got {I}")
    if isinstance(geometry, Rectangle) and f is None:
        if v is None:
            if material is None:
                raise DomainError("rectangle needs v or material")
            v = drift_velocity(I, material, geometry)
        c = CONSTANTS
        return 2.0 * geometry.c * (2.0 * geometry.b + geometry.c) * c.m * a / (c.hbar * v)
    if f is None:
        if material is None:
            raise DomainError("need a form factor or a material")
        f = form_factor(geometry, material)
    return float(f) * a / I


def asymmetry_phase(Rs: float, dRs: float, a: float, v: float) -> float:
    """Quadratic-in-``a`` correction ``m pi Rs dRs a^2 / (2 hbar v^3)`` for
    mismatched ring arms, evaluated in this closed form (see the tests for how it
    compares with direct quadrature)."""
    if not v > 0.0:
        raise DomainError(f"drift speed must be positive, got {v}")
    c = CONSTANTS
    return c.m * math.pi * Rs * dRs * a * a / (2.0 * c.hbar * v ** 3)


def winding_number(Rs: float, I: float, f: float) -> float:
    """Per-arm accumulated phase in units of pi, ``2 m^2 Rs^3 I / (hbar^2 f)``."""
    if not f > 0.0:
        raise DomainError(f"form factor must be positive, got {f}")
    c = CONSTANTS
    return 2.0 * c.m ** 2 * Rs ** 3 * I / (c.hbar ** 2 * float(f))
