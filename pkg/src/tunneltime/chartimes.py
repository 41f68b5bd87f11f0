"""Stationary characteristic times of the two-barrier system.

Phase and group times come from the k-derivatives of the scattering phases;
dwell times are closed forms of the flux-normalised densities of the total
state and of the two subprocess wave functions.  Everything is expressed
through the entire functions in ``_entire`` so the results are real and
smooth through E = V0.
"""
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import _entire as ent
from .scatter import compose_two_barrier, eval_total, one_barrier_params, total_field
from .swf import eval_swf, ref_field

# |cos chi| below this counts as "near a resonance" for flagging
NEAR_RESONANCE_COS = 0.05


@dataclass(frozen=True)
class DerivBundle:
    k: np.ndarray
    Jp: np.ndarray
    Tp: np.ndarray
    J_two_p: np.ndarray
    lambda_p: np.ndarray
    sp: np.ndarray
    near_resonance: np.ndarray


@dataclass(frozen=True)
class TransmissionDwell:
    tau1: np.ndarray
    tau_gap: np.ndarray
    tau2: np.ndarray

    @property
    def total(self):
        return self.tau1 + self.tau_gap + self.tau2

    @property
    def left(self):
        return self.tau1 + 0.5 * self.tau_gap

    @property
    def right(self):
        return self.tau2 + 0.5 * self.tau_gap


@dataclass(frozen=True)
class ReflectionDwell:
    """Reflection dwell time; ``empty`` marks k where the reflected subensemble is empty."""

    tau1: np.ndarray
    tau_gap: np.ndarray
    empty: np.ndarray

    @property
    def total(self):
        return self.tau1 + self.tau_gap


@dataclass(frozen=True)
class TotalDwell:
    tau1: np.ndarray
    tau_gap: np.ndarray
    tau2: np.ndarray

    @property
    def total(self):
        return self.tau1 + self.tau_gap + self.tau2


@dataclass(frozen=True)
class TimeReport:
    k: np.ndarray
    tau_ph: np.ndarray
    tau_as: np.ndarray
    t_dep: np.ndarray
    x_start: np.ndarray
    dwell_tr: TransmissionDwell
    dwell_ref: ReflectionDwell
    dwell_tot: TotalDwell
    tau_free: np.ndarray
    tau0: float
    T_two: np.ndarray
    near_resonance: np.ndarray

    def scaled(self, name):
        """A time divided by tau0 = m D / (hbar kappa0)."""
        v = getattr(self, name)
        if hasattr(v, "total"):
            v = v.total
        return v / self.tau0


def derivatives(sys, k, two=None):
    """Analytic dJ/dk, dT/dk, dJ_two/dk and dlambda/dk.

    lambda' is evaluated as 2 T_two T^-1/2 [-s'(1+R) cos chi + s (J'+L) sin chi]
    with s = eta sqrt(R/T); this is the same quantity as the usual form with a
    1/sqrt(R) prefactor but has no removable singularity where R = 0.
    """
    if two is None:
        two = compose_two_barrier(sys, k)
    one = two.one
    k, g, d = one.k, one.g, sys.d
    z = g * d * d
    S, Sp = ent.S(z), ent.Sp(z)
    sh = d * S
    dsh = -2 * k * d**3 * Sp
    dc = -k * d * sh
    s_p = 0.5 * (dsh * (k + g / k) - sh * (1 + g / k**2))
    u_p = 0.5 * (dsh * (k - g / k) + sh * (3 + g / k**2))
    T, R, s, u, c = one.T, one.R, one.s, one.u, one.c
    Tp = -2 * s * s_p * T * T
    Jp = T * (u_p * c - u * dc)

    chi = two.chi
    cos_chi, sin_chi = np.cos(chi), np.sin(chi)
    ratio = 1.0 / (T * T + 4 * R * cos_chi**2)  # T_two / T^2
    J_two_p = Jp + ratio * (T * (1 + R) * (Jp + sys.L) + Tp * np.sin(2 * chi))
    lambda_p = 2 * two.T_two / np.sqrt(T) * (-s_p * (1 + R) * cos_chi + s * (Jp + sys.L) * sin_chi)
    near = (np.abs(cos_chi) < NEAR_RESONANCE_COS) | (two.R_two < 1e-6)
    return DerivBundle(k=k, Jp=Jp, Tp=Tp, J_two_p=J_two_p, lambda_p=lambda_p, sp=s_p,
                       near_resonance=near)


def rect_derivatives_kappa(sys, k):
    """J' and T' in the hyperbolic form with (possibly imaginary) kappa.

    J' = (T/kappa)[theta+^2 sinh(2 kappa d) - theta- k d]
    T' = (theta+^2 T^2/kappa)[k d sinh(2 kappa d) - 4 theta- sinh^2(kappa d)]
    Singular at E = V0; kept as an independent cross-check of ``derivatives``.
    """
    one = one_barrier_params(sys, k)
    kap = np.sqrt(one.g + 0j)
    d, k = sys.d, one.k
    tp, tm = one.theta_plus, one.theta_minus
    Jp = one.T / kap * (tp**2 * np.sinh(2 * kap * d) - tm * k * d)
    Tp = tp**2 * one.T**2 / kap * (k * d * np.sinh(2 * kap * d) - 4 * tm * np.sinh(kap * d) ** 2)
    return Jp.real, Tp.real


def phase_and_group_times(sys, k, deriv=None):
    """(tau_ph, tau_as, t_dep, x_start) in the narrow-packet limit."""
    if deriv is None:
        deriv = derivatives(sys, k)
    pref = sys.mass / (sys.hbar * deriv.k)
    tau_ph = pref * deriv.J_two_p
    t_dep = pref * deriv.lambda_p
    tau_as = pref * (deriv.J_two_p - deriv.lambda_p)
    return tau_ph, tau_as, t_dep, -deriv.lambda_p


def x_start_closed(sys, k):
    """Start position for a single barrier of width D (requires L = 0)."""
    if sys.L != 0:
        raise ValueError("closed-form start position needs L = 0")
    k = np.asarray(k, dtype=float)
    D, k0sq = sys.D, sys.kappa0_sq
    g = sys.kappa_sq(k)
    zD = g * D * D
    shD = D * ent.S(zD)
    num = shD + 2 * k * k * D**3 * ent.Sp(zD)
    return -2 * k0sq * num / (4 * k * k + k0sq**2 * shD**2)


def tau_as_closed(sys, k):
    """Asymptotic group time for a single barrier of width D (requires L = 0)."""
    if sys.L != 0:
        raise ValueError("closed-form asymptotic time needs L = 0")
    k = np.asarray(k, dtype=float)
    D, k0sq = sys.D, sys.kappa0_sq
    g = sys.kappa_sq(k)
    zD = g * D * D
    shD = D * ent.S(zD)
    sh_half = 0.5 * D * ent.S(0.25 * zD)
    a = k * k + k0sq * g * sh_half**2
    b = shD + k * k * D**3 * ent.S1(zD)
    return 4 * sys.mass / (sys.hbar * k) * a * b / (4 * k * k + k0sq**2 * shD**2)


def _barrier_integrals(g, d):
    """sinh(kd)/k, sinh(2kd)/k and (sinh(2kd)/k - 2d)/k^2 with k = kappa."""
    sh1 = d * ent.S(g * d * d)
    z2 = 4 * g * d * d
    sh2 = 2 * d * ent.S(z2)
    X = (2 * d) ** 3 * ent.S1(z2)
    return sh1, sh2, X


def dwell_times(sys, k, two=None):
    """Transmission and reflection dwell times with their per-region parts."""
    if two is None:
        two = compose_two_barrier(sys, k)
    one = two.one
    k, g, d, L = one.k, one.g, sys.d, sys.L
    T, R, J, rho = one.T, one.R, one.J, one.rho
    m_h = sys.mass / sys.hbar
    sh1, sh2, X = _barrier_integrals(g, d)

    tau_bar = m_h / (4 * k) * (2 * d + sh2 + k * k * X)
    tau_gap = m_h / (k * k * T) * (k * L * (1 + R)
                                  + 4 * rho * np.sin(0.5 * k * L) * np.sin(J + 0.5 * k * L))
    tr = TransmissionDwell(tau1=tau_bar, tau_gap=tau_gap, tau2=tau_bar)

    chi = two.chi
    P2 = (1 + R - 2 * rho * np.sin(chi)) / T
    w = two.T_two * P2
    cL, sL = np.cos(k * L), np.sin(k * L)
    tau1_ref = m_h * w / (2 * k) * ((1 - cL) * (2 * d + sh2) + k * k * (1 + cL) * X
                                   + 4 * k * sL * sh1**2)
    tau_gap_ref = m_h * w / (k * k) * (k * L - sL)
    empty = two.R_two < 1e-14
    nan = np.full(np.shape(k), np.nan)
    ref = ReflectionDwell(tau1=np.where(empty, nan, tau1_ref),
                          tau_gap=np.where(empty, nan, tau_gap_ref), empty=empty)
    return tr, ref


def _opaque(g, d):
    return (g > 0) & (np.sqrt(np.maximum(g, 0.0)) * d >= 1.0)


def _edge_dwell(sys, two):
    """Integral of |Psi_tot|^2 over barrier 1 from its edge values.

    Inside a barrier with real kappa, psi = [psi_a sinh(kappa(b1-x)) + psi_b
    sinh(kappa(x-a1))] / sinh(kappa d); both terms are bounded, so this stays
    accurate where the sinh/cosh form anchored at a1 cancels like exp(2 kappa d).
    Only meaningful where ``_opaque`` holds; elsewhere a dummy kappa*d = 1 is used.
    """
    k, d = two.k, sys.d
    total = total_field(sys, k, two)
    psi_a = (1 + total.B_out) * np.exp(1j * k * sys.a1)
    half = 0.5 * k * sys.L
    psi_b = -total.Agap * np.sin(half) + total.Bgap * np.cos(half)
    g = two.one.g
    kd = np.where(_opaque(g, d), np.sqrt(np.maximum(g, 0.0)) * d, 1.0)
    e2 = np.exp(-2 * kd)
    coth = (1 + e2) / (1 - e2)
    inv_sh = 2 * np.exp(-kd) / (1 - e2)
    same = 0.5 * d * (coth / kd - inv_sh**2)
    cross = 0.5 * d * (coth - 1 / kd) * inv_sh
    return (np.abs(psi_a) ** 2 + np.abs(psi_b) ** 2) * same + 2 * np.real(psi_a * np.conj(psi_b)) * cross


def buttiker_dwell(sys, k, two=None):
    """Dwell time of the total state over [a1, b2] with its per-region parts."""
    if two is None:
        two = compose_two_barrier(sys, k)
    one = two.one
    k, g, d, L = one.k, one.g, sys.d, sys.L
    T, R, rho = one.T, one.R, one.rho
    m_h = sys.mass / sys.hbar
    sh1, sh2, X = _barrier_integrals(g, d)
    chi, J = two.chi, one.J
    Tt, Rt = two.T_two, two.R_two
    cos_chi, sin_chi = np.cos(chi), np.sin(chi)

    # reflected amplitude B_out = -(2 rho T_two cos chi / T^2) e^{iJ} [i(1+R) cos chi - T sin chi]
    pref = 2 * rho * Tt * cos_chi / T**2
    re_b = pref * (T * sin_chi * np.cos(J) + (1 + R) * cos_chi * np.sin(J))
    im_b = -pref * ((1 + R) * cos_chi * np.cos(J) - T * sin_chi * np.sin(J))
    tau1 = m_h / (4 * k) * ((1 + Rt) * (2 * d + sh2 + k * k * X)
                            + 2 * re_b * (2 * d + sh2 - k * k * X)
                            + 8 * k * im_b * sh1**2)
    tau1 = np.where(_opaque(g, d), _edge_dwell(sys, two) * m_h / k, tau1)
    tau_gap = m_h * Tt / (k * k * T) * (k * L * (1 + R) + 2 * rho * np.sin(chi) * np.sin(k * L))
    tau_bar_tr = m_h / (4 * k) * (2 * d + sh2 + k * k * X)
    return TotalDwell(tau1=tau1, tau_gap=tau_gap, tau2=tau_bar_tr * Tt)


def times(sys, k):
    """Every stationary time at ``k`` in one report."""
    two = compose_two_barrier(sys, k)
    deriv = derivatives(sys, k, two)
    tau_ph, tau_as, t_dep, x_start = phase_and_group_times(sys, k, deriv)
    tr, ref = dwell_times(sys, k, two)
    tot = buttiker_dwell(sys, k, two)
    k = two.k
    kappa0 = np.sqrt(abs(sys.kappa0_sq))
    return TimeReport(
        k=k, tau_ph=tau_ph, tau_as=tau_as, t_dep=t_dep, x_start=x_start,
        dwell_tr=tr, dwell_ref=ref, dwell_tot=tot,
        tau_free=sys.mass * sys.D / (sys.hbar * k),
        tau0=sys.mass * sys.D / (sys.hbar * kappa0),
        T_two=two.T_two, near_resonance=deriv.near_resonance,
    )


def _quad_density(f, a, b, rtol):
    if b <= a:
        return 0.0
    re = integrate.quad(lambda x: float(np.abs(f(x)) ** 2), a, b, epsabs=0.0, epsrel=rtol, limit=400)
    return re[0]


def dwell_quadrature(sys, k, rtol=1e-11):
    """Dwell-time components by adaptive quadrature of the densities, region by region.

    Returns a dict with keys matching the closed-form fields:
    ``tr1, tr_gap, tr2, tr_left, tr_right, ref1, ref_gap, tot1, tot_gap, tot2``.
    """
    k = float(k)
    two = compose_two_barrier(sys, k)
    total = total_field(sys, k, two)
    swf = ref_field(sys, k, total, two)
    m_h = sys.mass / sys.hbar
    tot = lambda x: eval_total(total, sys, x)
    tr = lambda x: eval_swf("tr", sys, swf, total, x, side="left" if x < sys.xc else "right")
    ref = lambda x: eval_swf("ref", sys, swf, total, x)
    a1, b1, a2, b2, xc = sys.a1, sys.b1, sys.a2, sys.b2, sys.xc
    Tt, Rt = float(two.T_two), float(two.R_two)

    q = lambda f, a, b: _quad_density(f, a, b, rtol)
    out = {
        "tr1": q(tr, a1, b1), "tr2": q(tr, a2, b2),
        "tr_gap": q(tr, b1, xc) + q(tr, xc, a2),
        "tr_left": q(tr, a1, min(b1, xc)) + q(tr, b1, xc),
        "tr_right": q(tr, xc, a2) + q(tr, max(a2, xc), b2),
        "tot1": q(tot, a1, b1), "tot_gap": q(tot, b1, a2), "tot2": q(tot, a2, b2),
        "ref1": q(ref, a1, b1), "ref_gap": q(ref, b1, xc),
    }
    for key in ("tr1", "tr2", "tr_gap", "tr_left", "tr_right"):
        out[key] *= m_h / (k * Tt)
    for key in ("tot1", "tot_gap", "tot2"):
        out[key] *= m_h / k
    for key in ("ref1", "ref_gap"):
        out[key] = out[key] * m_h / (k * Rt) if Rt > 1e-14 else np.nan
    return out


@dataclass(frozen=True)
class OpaqueReport:
    tau_bar_tr: float
    tau_bar_tr_asym: float
    tau_gap_tr: float
    tau_gap_tr_asym: float
    tau_ref: float
    tau_ref_asym: float

    @property
    def ratios(self):
        return {
            "tau_bar_tr": self.tau_bar_tr / self.tau_bar_tr_asym,
            "tau_gap_tr": self.tau_gap_tr / self.tau_gap_tr_asym if self.tau_gap_tr_asym else np.nan,
            "tau_ref": self.tau_ref / self.tau_ref_asym,
        }


def opaque_asymptotes(sys, k):
    """Leading large-kappa*d behaviour of the barrier, gap and reflection dwell times."""
    k = np.asarray(k, dtype=float)
    g = sys.kappa_sq(k)
    if np.any(g <= 0):
        raise ValueError("opaque-barrier asymptotics need E < V0")
    kap = np.sqrt(g)
    d, L, m_h = sys.d, sys.L, sys.mass / sys.hbar
    tp = 0.5 * (k / kap + kap / k)
    tm = 0.5 * (k / kap - kap / k)
    J_inf = np.arctan(tm)
    e2 = np.exp(2 * kap * d)
    bar = m_h * sys.kappa0_sq / (8 * k * kap**3) * e2
    gap = m_h * tp**2 / (2 * k * k) * (k * L + 2 * np.sin(0.5 * k * L) * np.sin(J_inf + 0.5 * k * L)) * e2
    chi = J_inf + k * L
    ref = m_h / (2 * k * kap**3 * tp**2 * (1 + np.sin(chi))) * (
        sys.kappa0_sq - (g - k * k) * np.cos(k * L) + 2 * k * kap * np.sin(k * L))
    return bar, gap, ref


def opaque_limit_report(sys, k):
    """Exact dwell times beside their opaque-barrier asymptotes."""
    bar, gap, ref = opaque_asymptotes(sys, k)
    tr, rf = dwell_times(sys, k)
    return OpaqueReport(
        tau_bar_tr=float(tr.tau1), tau_bar_tr_asym=float(bar),
        tau_gap_tr=float(tr.tau_gap), tau_gap_tr_asym=float(gap),
        tau_ref=float(rf.total), tau_ref_asym=float(ref),
    )


def tau_as_extrema(sys, k_lo, k_hi, n=4000):
    """Local maxima of tau_as(k) and of the Buttiker dwell time near each resonance.

    Returns a list of dicts, one per resonance, with its index (1 = lowest),
    and whether tau_as and tau_dwell have a local maximum within half the
    distance to the neighbouring resonances.
    """
    from .scatter import find_resonances

    res = find_resonances(sys, k_lo, k_hi)
    ks = np.linspace(k_lo, k_hi, n)
    rep = times(sys, ks)
    tas, tdw = rep.tau_as, rep.dwell_tot.total
    is_max = lambda v: np.r_[False, (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:]), False]
    max_as, max_dw = ks[is_max(tas)], ks[is_max(tdw)]
    all_res = find_resonances(sys, 1e-9 * k_hi, k_hi)
    out = []
    for kr in res:
        i = int(np.argmin(np.abs(np.asarray(all_res) - kr)))
        lo = 0.5 * (all_res[i - 1] + kr) if i > 0 else k_lo
        hi = 0.5 * (all_res[i + 1] + kr) if i + 1 < len(all_res) else k_hi
        near = lambda arr: bool(np.any((arr > lo) & (arr < hi)))
        out.append({"k": kr, "index": i + 1, "tau_as_max": near(max_as), "tau_dwell_max": near(max_dw)})
    return out
