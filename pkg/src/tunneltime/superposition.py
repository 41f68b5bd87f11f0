"""The naive split of a scattering state into "transmission" and "reflection" parts.

For a barrier with transfer matrix ``[[q, p], [p*, q*]]`` and a particle
incident from the left, the standard state is

    x <= a     exp(ikx) + (p*/q) exp(-ikx)
    x >= b     (1/q) exp(ikx)

It can be written as the sum of two stationary solutions, one with only the
transmitted wave outgoing and one with only the reflected wave outgoing:

    psi1:  x <= a  (1/|q|^2) exp(ikx);         x >= b  (1/q) exp(ikx) - (p*/|q|^2) exp(-ikx)
    psi2:  x <= a  |p/q|^2 exp(ikx) + (p*/q) exp(-ikx);   x >= b  (p*/|q|^2) exp(-ikx)

Each piece conserves flux, yet the incident current of each piece differs from
the outgoing current it is supposed to feed.  ``current_audit`` quantifies
the mismatch, which is exactly T(1-T) hbar k/m in both channels.
"""
from dataclasses import dataclass

import numpy as np

from .scatter import two_barrier_matrix

ONE_CHANNEL_MESSAGE = "one-channel; superposition principle unaffected"


@dataclass(frozen=True)
class PlaneWaves:
    """Amplitudes of ``A exp(ikx) + B exp(-ikx)`` on the left and right of the barrier."""

    A_left: complex
    B_left: complex
    A_right: complex
    B_right: complex

    def __add__(self, other):
        return PlaneWaves(self.A_left + other.A_left, self.B_left + other.B_left,
                          self.A_right + other.A_right, self.B_right + other.B_right)

    def currents(self, flux):
        """(left, right) probability currents; ``flux`` is hbar k/m."""
        left = flux * (abs(self.A_left) ** 2 - abs(self.B_left) ** 2)
        right = flux * (abs(self.A_right) ** 2 - abs(self.B_right) ** 2)
        return left, right


@dataclass(frozen=True)
class NaiveSplit:
    q: complex
    p: complex
    k: float
    flux: float
    psi: PlaneWaves
    psi1: PlaneWaves
    psi2: PlaneWaves

    @property
    def T(self):
        return 1.0 / abs(self.q) ** 2

    @property
    def R(self):
        return abs(self.p) ** 2 / abs(self.q) ** 2


def naive_split(q, p, k=1.0, hbar=1.0, mass=0.5, tol=1e-10):
    """Split the standard left-incident state for the transfer pair (q, p).

    Raises ``ValueError`` unless ``|q|^2 - |p|^2 = 1`` within ``tol`` (relative).
    """
    q, p = complex(q), complex(p)
    aq2, ap2 = abs(q) ** 2, abs(p) ** 2
    if abs(aq2 - ap2 - 1.0) > tol * aq2:
        raise ValueError(f"|q|^2 - |p|^2 = {aq2 - ap2:.15g}, expected 1")
    pc = np.conj(p)
    psi = PlaneWaves(1.0 + 0j, pc / q, 1 / q, 0j)
    psi1 = PlaneWaves(1 / aq2 + 0j, 0j, 1 / q, -pc / aq2)
    psi2 = PlaneWaves(ap2 / aq2 + 0j, pc / q, 0j, pc / aq2)
    return NaiveSplit(q=q, p=p, k=float(k), flux=hbar * k / mass, psi=psi, psi1=psi1, psi2=psi2)


def split_for_system(sys, k):
    """Naive split for the two-barrier transfer matrix at wavenumber ``k``."""
    Y = two_barrier_matrix(sys, float(k))
    return naive_split(complex(Y.q), complex(Y.p), k, sys.hbar, sys.mass)


@dataclass(frozen=True)
class CurrentAudit:
    """Channel currents of the two pieces against those of the full state.

    ``mismatch_tr`` compares the incident current of psi1 with the transmitted
    current of psi; ``mismatch_ref`` the incident current of psi2 with the
    reflected current of psi (magnitudes).
    """

    T: float
    flux: float
    psi1_left: float
    psi1_right: float
    psi2_left: float
    psi2_right: float
    incident_1: float
    incident_2: float
    transmitted: float
    reflected: float
    mismatch_tr: float
    mismatch_ref: float
    expected_mismatch: float
    one_channel: bool

    @property
    def summary(self):
        if self.one_channel:
            return ONE_CHANNEL_MESSAGE
        return (f"two-channel: incident current of psi1 {self.incident_1:.6g} vs transmitted "
                f"{self.transmitted:.6g}; incident current of psi2 {self.incident_2:.6g} vs "
                f"reflected {self.reflected:.6g}; mismatch {self.mismatch_tr:.6g}")

    def as_dict(self):
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["summary"] = self.summary
        return out


def current_audit(split, tol=1e-12):
    """Compare the incoming and outgoing currents channel by channel."""
    f = split.flux
    l1, r1 = split.psi1.currents(f)
    l2, r2 = split.psi2.currents(f)
    inc1 = f * abs(split.psi1.A_left) ** 2
    inc2 = f * abs(split.psi2.A_left) ** 2
    transmitted = f * abs(split.psi.A_right) ** 2
    reflected = f * abs(split.psi.B_left) ** 2
    mis_tr = abs(transmitted - inc1)
    mis_ref = abs(reflected - inc2)
    T = split.T
    return CurrentAudit(
        T=T, flux=f, psi1_left=l1, psi1_right=r1, psi2_left=l2, psi2_right=r2,
        incident_1=inc1, incident_2=inc2, transmitted=transmitted, reflected=reflected,
        mismatch_tr=mis_tr, mismatch_ref=mis_ref, expected_mismatch=T * (1 - T) * f,
        one_channel=bool(max(mis_tr, mis_ref) <= tol * f),
    )


def pair_for_transmission(T, phase_q=0.0, phase_p=0.0):
    """A unimodular (q, p) with transmission ``T``: |q| = 1/sqrt(T), |p| = sqrt(R/T)."""
    if not 0 < T <= 1:
        raise ValueError("T must lie in (0, 1]")
    return (np.exp(1j * phase_q) / np.sqrt(T), np.sqrt((1 - T) / T) * np.exp(1j * phase_p))
