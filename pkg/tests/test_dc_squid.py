import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st
from scipy.optimize import minimize_scalar

from squidaccel.core import DcSquidConfig, DomainError, Ring
from squidaccel.dc_squid import (AmbiguousReadingError, ExceedsCriticalError,
                                 ImpossibleReadingError, acceleration_from_current,
                                 critical_phase, dc_sweep, interference_current,
                                 max_acceleration, operating_point, validity_report,
                                 weak_shift_current)
from squidaccel.phase_engine import form_factor

from conftest import IC


def _f(config):
    return form_factor(config.geometry, config.material).f


def test_critical_phase_is_stationary():
    x = critical_phase()
    derivative = math.cos(x / 2) - (x / 2) * math.sin(x / 2)
    assert abs(derivative) < 1e-10
    assert math.tan(x / 2) == pytest.approx(2 / x, rel=1e-12)


def test_critical_phase_against_independent_maximiser():
    res = minimize_scalar(lambda x: -x * math.cos(x / 2), bounds=(0, math.pi),
                          method="bounded", options={"xatol": 1e-12})
    assert critical_phase() == pytest.approx(res.x, abs=1e-6)
    assert math.cos(critical_phase() / 2) == pytest.approx(0.652, abs=5e-4)


def test_max_acceleration(ring_config):
    x = critical_phase()
    expected = 2 * IC * x * math.cos(x / 2) / _f(ring_config)
    assert max_acceleration(ring_config) == pytest.approx(expected, rel=1e-14)


@settings(max_examples=50, deadline=None,
          suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.floats(1e-6, 1.0))
def test_operating_point_residuals(ring_config, frac):
    a = frac * max_acceleration(ring_config)
    op = operating_point(a, ring_config)
    f = _f(ring_config)
    # I = 2 Ic cos(dphi/2) and dphi = f a / I
    assert abs(op.I - interference_current(op.delta_phi, IC)) <= 1e-9 * op.I
    assert abs(op.delta_phi - f * a / op.I) <= 1e-9 * op.delta_phi
    assert op.ratio == pytest.approx(op.I / (2 * IC), rel=1e-15)


def test_zero_acceleration(ring_config):
    op = operating_point(0.0, ring_config)
    assert (op.delta_phi, op.I, op.ratio) == (0.0, 2 * IC, 1.0)


def test_current_decreases_with_acceleration(ring_config):
    grid = np.linspace(0, max_acceleration(ring_config), 200)
    I = [operating_point(a, ring_config).I for a in grid]
    assert np.all(np.diff(I) < 0)


def test_weak_shift_slope(ring_config):
    f = _f(ring_config)
    eps = np.logspace(-3, -1, 9)
    a = 2 * IC * eps / f
    err = [abs(weak_shift_current(ai, ring_config) - operating_point(ai, ring_config).I) for ai in a]
    slope = np.polyfit(np.log(eps), np.log(err), 1)[0]
    assert slope == pytest.approx(4.0, abs=0.2)


@settings(max_examples=50, deadline=None,
          suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.floats(1e-2, 1.0))
def test_readout_roundtrip(ring_config, frac):
    a = frac * max_acceleration(ring_config)
    I = operating_point(a, ring_config).I
    assert acceleration_from_current(I, ring_config) == pytest.approx(a, rel=1e-9)


def test_readout_errors(ring_config):
    with pytest.raises(ImpossibleReadingError):
        acceleration_from_current(2.1 * IC, ring_config)
    with pytest.raises(AmbiguousReadingError):
        acceleration_from_current(1.0 * IC, ring_config)
    assert acceleration_from_current(2 * IC, ring_config) == 0.0


def test_exceeds_critical(ring_config):
    a_max = max_acceleration(ring_config)
    with pytest.raises(ExceedsCriticalError) as info:
        operating_point(1.01 * a_max, ring_config)
    assert info.value.a_max == pytest.approx(a_max)
    with pytest.raises(DomainError):
        operating_point(-1.0, ring_config)


def test_sweep_columns_and_failures(ring_config):
    a_max = max_acceleration(ring_config)
    table = dc_sweep(ring_config, np.linspace(0, 1.2 * a_max, 13))
    assert table.header[:4] == ["a[m/s^2]", "I[A]", "ratio", "delta_phi[rad]"]
    assert table["ratio"][0] == 1.0
    ratio = np.asarray(table["ratio"])
    finite = ratio[np.isfinite(ratio)]
    assert np.all(np.diff(finite) < 0)
    assert len(table.failures) == 2
    assert table["weak_regime"][-1] == "fail"


def test_rectangle_lies_below_ring(ring_config, rect_config):
    a = np.linspace(0, max_acceleration(rect_config), 20)
    ring = np.asarray(dc_sweep(ring_config, a)["ratio"])
    rect = np.asarray(dc_sweep(rect_config, a)["ratio"])
    assert np.all(rect[1:] < ring[1:])


def test_validity_report(ring_config, material):
    weak, wind, asym = validity_report(ring_config, 0.0)
    assert weak.status == "pass" and asym.status == "pass"
    # the 300 um ring accumulates ~m v Rs / hbar ~ 1e-9 of a winding
    assert wind.status == "pass"
    weak, _, _ = validity_report(ring_config, max_acceleration(ring_config))
    assert weak.status == "fail"
    skewed = DcSquidConfig(Ring(Rs=3e-4, d=1e-5, dRs=1.0), material, IC)
    assert validity_report(skewed, 1e3)[2].status == "fail"


def test_validity_weak_ratio_is_fa_over_I(ring_config):
    a = 0.05 * max_acceleration(ring_config)
    op = operating_point(a, ring_config)
    weak = validity_report(ring_config, a)[0]
    assert weak.ratio == pytest.approx(_f(ring_config) * a / op.I)
    assert weak.ratio == pytest.approx(op.delta_phi)
