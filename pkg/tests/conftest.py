"""Shared packet scenarios and the acceptance verdict collector."""
import numpy as np
import pytest
from scipy import constants

from tunneltime import BarrierSystem
from tunneltime.wavepacket import PacketModel, cm_track, default_window, spectrum_for_window

HBAR_SI = constants.hbar / constants.e * 1e12                  # eV ps
ELECTRON_MASS_SI = constants.m_e / constants.e * 1e24 / 1e18   # eV ps^2 / nm^2

VERDICTS = {}


def record_verdict(number, title, checks):
    """Store one PASS/FAIL line for an acceptance criterion and return it.

    ``checks`` is a list of (label, ok, detail) triples.
    """
    ok = all(c[1] for c in checks)
    parts = "; ".join(f"{label} {'ok' if good else 'FAILED'} ({detail})" for label, good, detail in checks)
    line = f"criterion {number} [{title}]: {'PASS' if ok else 'FAIL'} :: {parts}"
    VERDICTS[number] = line
    print(line)
    return ok, line


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(VERDICTS):
        terminalreporter.write_line(VERDICTS[number])


class Scenario:
    """A packet model together with its CM trajectory."""

    def __init__(self, sys, l0, kbar, t_range, n=400, min_lk=5.0):
        self.sys, self.l0, self.kbar, self.t_range = sys, l0, kbar, t_range
        self.window = default_window(sys, l0, kbar, *t_range)
        self.spectrum = spectrum_for_window(l0, kbar, self.window.length, min_lk=min_lk)
        self.model = PacketModel(self.spectrum, sys, self.window)
        self.traj = cm_track(self.model, t_range, n=n)


def worked_example_system():
    """l0 = 10 nm, mean energy 0.05 eV, a1 = 200 nm, b2 = 215 nm, V0 = 0.2 eV.

    The mass is calibrated so that m D/(hbar kbar) = 0.025 ps.
    """
    ebar, tau_free, D = 0.05, 0.025, 15.0
    mass = 2 * ebar * (tau_free / D) ** 2
    sys = BarrierSystem(V0=0.2, d=7.5, L=0.0, a1=200.0, mass=mass, hbar=HBAR_SI)
    kbar = np.sqrt(2 * mass * ebar) / HBAR_SI
    return sys, 10.0, kbar


@pytest.fixture(scope="session")
def worked_example():
    sys, l0, kbar = worked_example_system()
    # l0*kbar is about 2.5 here, so the spectrum is clipped at k > 0 and renormalised
    return Scenario(sys, l0, kbar, (-0.05, 0.8), n=400, min_lk=2.0)


@pytest.fixture(scope="session")
def narrow_packet():
    """Quasi-monochromatic packet on a thin single barrier (reduced units)."""
    sys = BarrierSystem(V0=1.0, d=1.0, L=0.0, a1=300.0)
    return Scenario(sys, 30.0, 0.6, (-50.0, 450.0), n=500)


@pytest.fixture(scope="session")
def free_packet():
    sys = BarrierSystem(V0=1e-10, d=1.0, L=0.0, a1=100.0)
    return Scenario(sys, 10.0, 1.0, (0.0, 100.0), n=400)


@pytest.fixture(scope="session")
def double_barrier_packet():
    """Two barriers with a gap; the spectrum sits on the flank of the lowest resonance (k = 0.749)."""
    sys = BarrierSystem(V0=1.0, d=1.0, L=2.0, a1=250.0)
    return Scenario(sys, 25.0, 0.7, (-20.0, 400.0), n=400)
