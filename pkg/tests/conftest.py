import math

import pytest

from squidaccel.core import DcSquidConfig, Material, Rectangle, RfCircuitConfig, Ring
from squidaccel.phase_engine import form_factor
from squidaccel.rf_squid import critical_current_from_inductance

# CODATA 2018 literals, kept separate from the package's own table
HBAR = 6.62607015e-34 / (2 * math.pi)
E = 1.602176634e-19
M = 2 * 9.1093837015e-31
Q = 2 * E
PHI0 = 6.62607015e-34 / (2 * E)

# Reference dc device: 300 um loops, 10 um wire, n = 1e23 cm^-3, lambda = 50 nm, Ic = 0.5 uA
RS = 300e-6
D = 10e-6
N = 1.0e29
LAM = 5e-8
IC = 0.5e-6

# Reference rf circuit: LJ = 0.66 nH, C = 48 uF, L = 1 nH, R = 1 mOhm
LJ = 0.66e-9
C_SHUNT = 4.8e-5
L_LOOP = 1e-9
R_SHUNT = 1e-3


@pytest.fixture
def material():
    return Material(n=N, lam=LAM, xi0=100e-9, T=0.0, Tc=10.0, vF=1e6)


@pytest.fixture
def ring():
    return Ring(Rs=RS, d=D)


@pytest.fixture
def rectangle():
    return Rectangle(b=RS, c=RS, d=D)


@pytest.fixture
def ring_config(ring, material):
    return DcSquidConfig(ring, material, IC)


@pytest.fixture
def rect_config(rectangle, material):
    return DcSquidConfig(rectangle, material, IC)


@pytest.fixture
def rf_config(ring, material):
    Ic = critical_current_from_inductance(LJ)
    return RfCircuitConfig(L=L_LOOP, R=R_SHUNT, C=C_SHUNT, Ic=Ic, Idc=Ic,
                           form_factor=form_factor(ring, material).f, ring_Rs=RS)


# -- acceptance bookkeeping ------------------------------------------------

_CRITERIA = {}


class _Criterion:
    def __init__(self, key, title):
        self.key, self.title = key, title
        self.details = []

    def note(self, text):
        self.details.append(text)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        prev = _CRITERIA.get(self.key)
        details = "; ".join(self.details)
        if prev is not None:
            ok_all = prev[1] and ok
            details = "; ".join(d for d in (prev[2], details) if d)
        else:
            ok_all = ok
        _CRITERIA[self.key] = (self.title, ok_all, details)
        print(f"AC{self.key} {'PASS' if ok else 'FAIL'}: {self.title}")
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: int(k.split("-")[0])):
        title, ok, details = _CRITERIA[key]
        line = f"AC{key:<5} {'PASS' if ok else 'FAIL'}  {title}"
        if details:
            line += f"  [{details}]"
        terminalreporter.write_line(line)
