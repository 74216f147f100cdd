import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from squidaccel.core import DomainError, Rectangle, Ring
from squidaccel.phase_engine import (action_phase, arm_trajectory, asymmetry_phase,
                                     drift_velocity, form_factor, gravity_phase,
                                     gravity_phase_difference, kinematics,
                                     phase_difference_closed,
                                     quadrature_phase_difference, winding_number)

from conftest import HBAR, IC, LAM, M, N, Q, RS

M_OVER_HBAR = M / HBAR


def test_ring_form_factor_value(ring, material):
    expected = 8 * M * RS ** 2 * Q * N * 10e-6 * LAM / HBAR
    assert form_factor(ring, material).f == pytest.approx(expected, rel=1e-12)
    assert form_factor(ring, material).f == pytest.approx(1.9929e-4, rel=1e-4)


def test_square_to_ring_ratio(ring, rectangle, material):
    ratio = form_factor(rectangle, material).f / form_factor(ring, material).f
    assert ratio == pytest.approx(1.5, rel=1e-14)


def test_drift_velocity(ring, material):
    v = drift_velocity(2 * IC, material, ring)
    assert v == pytest.approx(2 * IC / (2 * Q * N * 10e-6 * LAM), rel=1e-14)
    assert v == pytest.approx(3.12e-5, rel=1e-3)
    with pytest.raises(DomainError):
        drift_velocity(-1.0, material, ring)


def test_ring_trajectory_endpoints(ring):
    v, a = 3e-5, 0.2
    T = kinematics(ring, v).transit_time
    assert T == pytest.approx(math.pi * RS / v)
    for arm, sign in (("plus", 1.0), ("minus", -1.0)):
        traj = arm_trajectory(ring, arm, v, a)
        np.testing.assert_allclose(traj.position(0.0), [RS, 0.0, 0.0], atol=1e-18)
        np.testing.assert_allclose(traj.position(T), [-RS, 0.5 * a * T * T, 0.0],
                                   rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(traj.velocity(0.0), [0.0, sign * v, 0.0], atol=1e-20)


def test_rectangle_trajectory_pieces(rectangle):
    b, c = rectangle.b, rectangle.c
    v, a = 2e-5, 0.1
    t1 = c / v
    t2 = t1 + 2 * b / v
    plus = arm_trajectory(rectangle, "plus", v, a)
    minus = arm_trajectory(rectangle, "minus", v, a)
    assert plus.t_end == pytest.approx(t1 + t2)
    assert [s.t_start for s in plus.segments] == pytest.approx([0.0, t1, t2])
    # just inside the first leg the plus arm moves at -v, the minus arm at +v
    eps = 1e-9 * t1
    assert plus.velocity(eps)[1] == pytest.approx(-v + a * eps)
    assert minus.velocity(eps)[1] == pytest.approx(v + a * eps)
    mid = 0.5 * (t1 + t2)
    np.testing.assert_allclose(plus.velocity(mid), [v, a * mid, 0.0])


def test_arm_argument_validated(ring):
    with pytest.raises(DomainError):
        arm_trajectory(ring, "left", 1e-5, 0.0)
    with pytest.raises(DomainError):
        arm_trajectory(ring, "plus", 0.0, 0.0)


@pytest.mark.parametrize("geo", [Ring(Rs=RS, d=1e-5), Rectangle(b=RS, c=2e-4, d=1e-5)])
def test_no_acceleration_no_phase(geo):
    assert quadrature_phase_difference(geo, 3e-5, 0.0).value == pytest.approx(0.0, abs=1e-14)


def _closed(geo, v, a):
    if isinstance(geo, Ring):
        return 4 * M * geo.Rs ** 2 * a / (HBAR * v)
    return 2 * geo.c * (2 * geo.b + geo.c) * M * a / (HBAR * v)


geometries = st.one_of(
    st.builds(lambda r: Ring(Rs=r, d=1e-7), st.floats(1e-5, 1e-3)),
    st.builds(lambda b, c: Rectangle(b=b, c=c, d=1e-7), st.floats(1e-5, 1e-3), st.floats(1e-5, 1e-3)),
)


@settings(max_examples=60, deadline=None)
@given(geometries, st.floats(1e-6, 1e-3), st.floats(1e-3, 1.0))
def test_quadrature_matches_closed_form(geo, v, frac):
    # pick a so that the closed-form phase lies in (0, pi]
    a = frac * math.pi / _closed(geo, v, 1.0)
    numeric = quadrature_phase_difference(geo, v, a).value
    assert numeric == pytest.approx(_closed(geo, v, a), rel=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-5, 1e-3), st.floats(1e-6, 1e-3), st.floats(0.01, 20.0))
def test_gravity_equals_acceleration(Rs, v, g):
    ring = Ring(Rs=Rs, d=1e-7)
    grav = gravity_phase_difference(ring, v, g).value
    kin = quadrature_phase_difference(ring, v, g).value
    assert grav == pytest.approx(kin, rel=1e-9)
    assert grav == pytest.approx(4 * M * Rs ** 2 * g / (HBAR * v), rel=1e-9)


def test_gravity_vector_form(ring):
    traj = arm_trajectory(ring, "plus", 3e-5, 0.0)
    assert gravity_phase(traj, [0.0, 9.8, 0.0]) == gravity_phase(traj, 9.8)
    assert gravity_phase(traj, 0.0) == 0.0


@pytest.mark.parametrize("geo", [Ring(Rs=RS, d=1e-5), Rectangle(b=RS, c=1e-4, d=1e-5)])
def test_phase_odd_and_linear_in_a(geo):
    v = 3e-5
    p1 = quadrature_phase_difference(geo, v, 1e-3).signed
    assert quadrature_phase_difference(geo, v, -1e-3).signed == pytest.approx(-p1, rel=1e-9)
    assert quadrature_phase_difference(geo, v, 3e-3).signed == pytest.approx(3 * p1, rel=1e-9)


def test_ring_sign_convention(ring):
    # the plus arm dips into the acceleration first, so the ring phase is negative
    assert quadrature_phase_difference(ring, 3e-5, 1e-3).signed < 0.0


def test_closed_form_routes(ring, rectangle, material):
    f = form_factor(ring, material)
    I = 1e-6
    v = drift_velocity(I, material, ring)
    assert phase_difference_closed(ring, 0.1, I, material=material) == pytest.approx(f.f * 0.1 / I)
    assert phase_difference_closed(ring, 0.1, I, material=material) == pytest.approx(_closed(ring, v, 0.1))
    fr = form_factor(rectangle, material).f
    assert phase_difference_closed(rectangle, 0.1, I, material=material) == pytest.approx(fr * 0.1 / I)
    with pytest.raises(DomainError):
        phase_difference_closed(ring, 0.1, 0.0, f=f)


def test_asymmetry_formula_versus_quadrature():
    # Quadratic-in-a part of the phase when the plus arm has radius Rs + dRs.
    # Quadrature gives pi^3 m Rs^2 dRs a^2 / (2 hbar v^3), i.e. pi^2 Rs times
    # asymmetry_phase; that closed form is missing a length factor.
    Rs, dRs, v, a = 1e-4, 1e-8, 2e-5, 1e-3
    big, small = Ring(Rs=Rs + dRs, d=1e-7), Ring(Rs=Rs, d=1e-7)

    def diff(acc):
        return (action_phase(arm_trajectory(big, "plus", v, acc))
                - action_phase(arm_trajectory(small, "minus", v, acc)))

    quadratic = 0.5 * (diff(a) + diff(-a) - 2 * diff(0.0))
    expected = math.pi ** 3 * M * Rs ** 2 * dRs * a * a / (2 * HBAR * v ** 3)
    assert quadratic == pytest.approx(expected, rel=1e-3)
    assert quadratic == pytest.approx(math.pi ** 2 * Rs * asymmetry_phase(Rs, dRs, a, v), rel=1e-3)


def test_winding_number_matches_action(ring, material):
    f = form_factor(ring, material).f
    I = 2 * IC
    v = drift_velocity(I, material, ring)
    per_arm = action_phase(arm_trajectory(ring, "plus", v, 0.0))
    assert winding_number(RS, I, f) == pytest.approx(per_arm / math.pi, rel=1e-10)
    assert winding_number(RS, I, f) == pytest.approx(M * v * RS / (2 * HBAR), rel=1e-12)
