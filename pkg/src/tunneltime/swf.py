"""Subprocess wave functions for transmission and reflection.

For a symmetric two-barrier system the total state splits as
``Psi_tot = psi_tr + psi_ref`` where ``psi_ref`` vanishes identically for
``x >= xc`` and, for ``x < xc``, reads

    x <= a1        A_in_ref exp(ikx) + b_out exp(ik(2 a1 - x))
    [a1, b1]       alpha_ref1 sinh(kappa(x-b1))/kappa + b_ref1 cosh(kappa(x-b1))
    [b1, xc]       a_ref_gap sin(k(x-xc))

The two pieces are sewn at the midpoint by continuity of the function and of
its probability current only; their x-derivatives jump there.
"""
from dataclasses import dataclass

import numpy as np

from . import _entire as ent
from .scatter import _bcast, compose_two_barrier, eval_total, total_field

# R_two below this is treated as an exact resonance
RESONANCE_R = 1e-14


@dataclass(frozen=True)
class SwfField:
    k: np.ndarray
    g: np.ndarray
    A_in_ref: np.ndarray
    A_in_tr: np.ndarray
    lam: np.ndarray
    a_ref_gap: np.ndarray
    alpha_ref1: np.ndarray
    b_ref1: np.ndarray
    b_out: np.ndarray
    # psi_tr for x < xc in the bases of the total state
    alpha_tr1: np.ndarray
    B_tr1: np.ndarray
    Agap_tr_left: np.ndarray

    @property
    def a_ref1(self):
        return self.alpha_ref1 / np.sqrt(np.asarray(self.g) + 0j)


def ref_field(sys, k, total=None, two=None):
    """Build the reflection SWF (and the left-half transmission coefficients)."""
    if two is None:
        two = compose_two_barrier(sys, k)
    if total is None:
        total = total_field(sys, k, two)
    k, g = two.k, two.one.g
    ea = np.exp(1j * k * sys.a1)
    b_out = total.B_out
    resonant = two.R_two < RESONANCE_R

    A_in_ref = -b_out * np.conj(total.Q) / total.Q
    a_gap = -2 * total.P * b_out * np.conj(total.A_out) * ea
    alpha_ref1 = k * a_gap * np.cos(0.5 * k * sys.L)
    b_ref1 = -a_gap * np.sin(0.5 * k * sys.L)
    lam = two.eta_two * np.arctan2(np.sqrt(two.T_two), np.sqrt(two.R_two))

    zero = np.zeros_like(A_in_ref)
    A_in_ref = np.where(resonant, zero, A_in_ref)
    a_gap = np.where(resonant, zero, a_gap)
    alpha_ref1 = np.where(resonant, zero, alpha_ref1)
    b_ref1 = np.where(resonant, zero, b_ref1)
    b_ref_out = np.where(resonant, zero, b_out)

    # shift the barrier-1 basis of psi_ref from b1 to a1
    shd, chd = ent.sh(g, sys.d), ent.ch(g, sys.d)
    alpha_ref_a1 = alpha_ref1 * chd - b_ref1 * g * shd
    B_ref_a1 = -alpha_ref1 * shd + b_ref1 * chd

    return SwfField(
        k=k, g=g, A_in_ref=A_in_ref, A_in_tr=1 - A_in_ref, lam=lam,
        a_ref_gap=a_gap, alpha_ref1=alpha_ref1, b_ref1=b_ref1, b_out=b_ref_out,
        alpha_tr1=total.alpha1 - alpha_ref_a1, B_tr1=total.B1 - B_ref_a1,
        Agap_tr_left=total.Agap - a_gap,
    )


def incident_ref_alt(two):
    """A_in_ref written through the two-barrier parameters: sqrt(R_two) exp(i lambda)."""
    lam = two.eta_two * np.arctan2(np.sqrt(two.T_two), np.sqrt(two.R_two))
    return np.sqrt(two.R_two) * np.exp(1j * lam)


def _eval_ref(swf, sys, x, deriv):
    x = np.asarray(x, dtype=float)
    c = lambda v: _bcast(v, x)
    k, g = c(swf.k), c(swf.g)
    left = x <= sys.a1
    bar1 = (x > sys.a1) & (x <= sys.b1) & (x < sys.xc)
    gap = (x > sys.b1) & (x < sys.xc)

    e_in = c(swf.A_in_ref) * np.exp(1j * k * x)
    e_ref = c(swf.b_out) * np.exp(1j * k * (2 * sys.a1 - x))
    y = np.clip(x - sys.b1, -sys.d, 0.0)
    shy, chy = ent.sh(g, y), ent.ch(g, y)
    sn, cs = np.sin(k * (x - sys.xc)), np.cos(k * (x - sys.xc))
    zero = np.zeros(np.broadcast(k, x).shape, complex)

    psi = np.select([left, bar1, gap],
                    [e_in + e_ref, c(swf.alpha_ref1) * shy + c(swf.b_ref1) * chy,
                     c(swf.a_ref_gap) * sn], default=zero)
    if not deriv:
        return psi
    dpsi = np.select([left, bar1, gap],
                     [1j * k * (e_in - e_ref), c(swf.alpha_ref1) * chy + c(swf.b_ref1) * g * shy,
                      k * c(swf.a_ref_gap) * cs], default=zero)
    return psi, dpsi


def _eval_tr(swf, total, sys, x, deriv, side):
    x = np.asarray(x, dtype=float)
    c = lambda v: _bcast(v, x)
    k, g = c(swf.k), c(swf.g)
    if side == "right":
        lefthalf = np.zeros(x.shape, bool)
    elif side == "left":
        lefthalf = np.ones(x.shape, bool)
    else:
        lefthalf = x < sys.xc
    left = lefthalf & (x <= sys.a1)
    bar1 = lefthalf & (x > sys.a1) & (x <= sys.b1)
    gap = lefthalf & (x > sys.b1)

    e_in = c(swf.A_in_tr) * np.exp(1j * k * x)
    y = np.clip(x - sys.a1, 0.0, sys.d)
    shy, chy = ent.sh(g, y), ent.ch(g, y)
    sn, cs = np.sin(k * (x - sys.xc)), np.cos(k * (x - sys.xc))
    whole = eval_total(total, sys, x, deriv=True)

    psi = np.select([left, bar1, gap],
                    [e_in, c(swf.alpha_tr1) * shy + c(swf.B_tr1) * chy,
                     c(swf.Agap_tr_left) * sn + c(total.Bgap) * cs],
                    default=whole[0])
    if not deriv:
        return psi
    dpsi = np.select([left, bar1, gap],
                     [1j * k * e_in, c(swf.alpha_tr1) * chy + c(swf.B_tr1) * g * shy,
                      k * (c(swf.Agap_tr_left) * cs - c(total.Bgap) * sn)],
                     default=whole[1])
    return psi, dpsi


def eval_swf(which, sys, swf, total, x, deriv=False, side=None):
    """Evaluate psi_tr or psi_ref at ``x`` (shape ``k.shape + x.shape``).

    ``side`` ("left" or "right") selects the one-sided branch for psi_tr, which
    is how the derivative on either side of ``xc`` is obtained.  For x >= xc,
    psi_tr equals the total state.
    """
    if which == "ref":
        return _eval_ref(swf, sys, x, deriv)
    if which == "tr":
        return _eval_tr(swf, total, sys, x, deriv, side)
    raise ValueError(f"which must be 'tr' or 'ref', got {which!r}")


def current(psi, dpsi, sys):
    """Probability current (hbar/m) Im(conj(psi) dpsi/dx)."""
    return sys.hbar / sys.mass * np.imag(np.conj(psi) * dpsi)


def evaluator(which, sys, k):
    """Convenience: ``f(x, deriv=False)`` for 'tot', 'tr' or 'ref' at fixed k."""
    two = compose_two_barrier(sys, k)
    total = total_field(sys, k, two)
    if which == "tot":
        return lambda x, deriv=False, side=None: eval_total(total, sys, x, deriv)
    swf = ref_field(sys, k, total, two)
    return lambda x, deriv=False, side=None: eval_swf(which, sys, swf, total, x, deriv, side)
