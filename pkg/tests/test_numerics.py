import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from squidaccel.core import DomainError, NumericalError
from squidaccel.numerics import bisect, simpson
from squidaccel.tables import SweepTable, format_value


@given(st.integers(0, 3), st.floats(-3, 3), st.floats(0.1, 4))
def test_simpson_exact_on_cubics(power, a, width):
    b = a + width
    exact = (b ** (power + 1) - a ** (power + 1)) / (power + 1)
    assert simpson(lambda x: x ** power, a, b) == pytest.approx(exact, rel=1e-12, abs=1e-12)


def test_simpson_smooth_integrand():
    assert simpson(np.sin, 0.0, math.pi, rtol=1e-13) == pytest.approx(2.0, rel=1e-12)
    assert simpson(np.exp, 0.0, 1.0) == pytest.approx(math.e - 1.0, rel=1e-10)


def test_simpson_reports_nonconvergence():
    with pytest.raises(NumericalError):
        simpson(lambda x: np.sin(1e6 * x ** 2), 0.0, 10.0, max_doublings=2)


def test_bisect_finds_root_to_machine_precision():
    root = bisect(lambda x: x * x - 2.0, 0.0, 2.0)
    assert abs(root - math.sqrt(2.0)) < 1e-12


def test_bisect_requires_bracket():
    with pytest.raises(DomainError):
        bisect(lambda x: x * x + 1.0, -1.0, 1.0)


def test_format_value():
    assert format_value(1.0, 4) == "1.000e+00"
    assert format_value(-0.0, 3) == "0.00e+00"
    assert format_value(float("nan")) == ""
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value("warn") == "warn"


def test_sweep_table_csv():
    table = SweepTable({"x": np.array([1.0, 2.0]), "flag": ["pass", "fail"]}, {"x": "m"})
    buf = io.StringIO()
    table.to_csv(buf, precision=3)
    assert buf.getvalue().splitlines() == ["x[m],flag", "1.00e+00,pass", "2.00e+00,fail"]


def test_sweep_table_rejects_unsorted_or_ragged():
    with pytest.raises(ValueError):
        SweepTable({"x": np.array([2.0, 1.0])}, {})
    with pytest.raises(ValueError):
        SweepTable({"x": np.array([1.0, 2.0]), "y": np.array([1.0])}, {})
