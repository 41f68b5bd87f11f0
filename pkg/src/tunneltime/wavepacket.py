"""Gaussian wave packets built from the exact stationary states.

A packet is synthesised as ``(1/sqrt(2 pi)) sum_k w_k A(k) psi(x,k) exp(-i E(k) t/hbar)``
on a uniform k grid (trapezoid weights).  Spatial integrals use composite
Gauss-Legendre panels whose breakpoints include every region boundary and the
midpoint ``xc``, where the subprocess wave functions have a derivative kink.

For each k grid the kernel matrix ``K[k, x]`` is computed once; evolving to a
batch of times is then a single matrix product with the phase matrix
``exp(-i E(k) t / hbar)``.
"""
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import bisect
from scipy.special import erfc

from .chartimes import derivatives
from .scatter import NumericalFailure, compose_two_barrier, eval_total, total_field
from .swf import current, eval_swf, ref_field

# relative norm drift that marks an under-resolved synthesis
NORM_DRIFT_LIMIT = 1e-6
# below this a packet is considered empty and its CM undefined
EMPTY_NORM = 1e-12


def gaussian_amplitude(k, l0, kbar):
    """(2 l0^2/pi)^(1/4) exp(-l0^2 (k - kbar)^2)."""
    k = np.asarray(k, dtype=float)
    return (2 * l0 * l0 / np.pi) ** 0.25 * np.exp(-(l0 * (k - kbar)) ** 2)


@dataclass(frozen=True)
class GaussianSpectrum:
    """Gaussian momentum amplitude sampled on a uniform k grid.

    ``weights`` are trapezoid weights (including dk).  If the grid had to be
    clipped at small positive k, the amplitude is renormalised on the grid and
    the removed probability is kept in ``clipped_mass``.
    """

    l0: float
    kbar: float
    k: np.ndarray
    weights: np.ndarray
    amp: np.ndarray
    clipped_mass: float

    @property
    def dk(self):
        return self.k[1] - self.k[0]

    def norm(self):
        return float(np.sum(self.weights * self.amp**2))

    def mean_k(self):
        return float(np.sum(self.weights * self.k * self.amp**2) / self.norm())

    def average(self, f, weight=None):
        """Spectral average of ``f(k)`` with optional extra weight (T_two, R_two, ...)."""
        w = self.weights * self.amp**2
        if weight is not None:
            w = w * weight
        return float(np.sum(w * f) / np.sum(w))


def build_spectrum(l0, kbar, sys=None, n=1024, span=8.0, min_lk=5.0, k_floor=None):
    """Sample the Gaussian amplitude on ``[max(eps, kbar - span/l0), kbar + span/l0]``.

    ``min_lk`` is the smallest accepted ``l0*kbar``; the default keeps the
    negative-k tail below 1e-20 so clipping at k = eps is harmless.  Lowering it
    is allowed (the discarded mass is reported) for spectra that reach k = 0.
    """
    if not (l0 > 0 and kbar > 0):
        raise ValueError("l0 and kbar must be positive")
    if l0 * kbar < min_lk:
        raise ValueError(f"l0*kbar = {l0 * kbar:.4g} is below {min_lk}; "
                         "the spectrum would leak into k <= 0")
    if n < 16:
        raise ValueError("need at least 16 k points")
    if k_floor is None:
        k_floor = 1e-6 * kbar
    lo = kbar - span / l0
    hi = kbar + span / l0
    clipped = lo < k_floor
    lo = max(lo, k_floor)
    k = np.linspace(lo, hi, n)
    w = np.full(n, k[1] - k[0])
    w[0] = w[-1] = 0.5 * w[0]
    amp = gaussian_amplitude(k, l0, kbar)
    # probability below the lower grid edge, from the analytic Gaussian
    mass_below = 0.5 * erfc(np.sqrt(2) * l0 * (kbar - lo))
    if clipped:
        amp = amp / np.sqrt(np.sum(w * amp**2))
    return GaussianSpectrum(l0=l0, kbar=kbar, k=k, weights=w, amp=amp,
                            clipped_mass=float(mass_below) if clipped else 0.0)


def spectrum_for_window(l0, kbar, window, min_lk=5.0, n_min=1024, n_max=8192, span=8.0):
    """Pick a k grid whose aliasing period 2 pi/dk exceeds twice ``window``."""
    width = kbar + span / l0 - max(kbar - span / l0, 0.0)
    need = int(np.ceil(width * window / np.pi)) + 1
    n = n_min
    while n < need and n < n_max:
        n *= 2
    return build_spectrum(l0, kbar, n=n, span=span, min_lk=min_lk)


def gauss_legendre_grid(breaks, max_panel, order=24):
    """Nodes and weights of composite Gauss-Legendre panels over sorted ``breaks``."""
    t, w = leggauss(order)
    xs, ws = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a:
            continue
        m = max(1, int(np.ceil((b - a) / max_panel)))
        edges = np.linspace(a, b, m + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        xs.append((mid[:, None] + half[:, None] * t).ravel())
        ws.append((half[:, None] * w).ravel())
    return np.concatenate(xs), np.concatenate(ws)


@dataclass(frozen=True)
class Window:
    lo: float
    hi: float

    @property
    def length(self):
        return self.hi - self.lo


def default_window(sys, l0, kbar, t_lo, t_hi, span=5.0):
    """Spatial window holding the packets for every t in [t_lo, t_hi].

    Every significant spectral component (k <= kbar + span/l0) starts near
    x = 0 and travels at most ``v_max*|t|``, reflected components folding back
    at a1, so the window is padded by that distance plus ten widths.
    """
    v_max = sys.hbar * (kbar + span / l0) / sys.mass
    pad = 10 * l0
    lo = min(0.0, sys.a1 - v_max * max(t_hi, 0.0), v_max * min(t_lo, 0.0)) - pad
    hi = max(sys.b2, v_max * max(t_hi, 0.0)) + pad
    return Window(lo=lo, hi=hi)


class PacketModel:
    """Cached synthesis of the total, transmission and reflection packets.

    Parameters
    ----------
    spectrum : GaussianSpectrum
    sys : BarrierSystem
    window : Window
        Spatial integration window; should contain the packets at all times used.
    order : int
        Gauss-Legendre nodes per panel.
    k_cut : float, optional
        Highest significant wavenumber, used to size the panels.
    """

    def __init__(self, spectrum, sys, window, order=24, k_cut=None, chunk=2048):
        self.spectrum = spectrum
        self.sys = sys
        self.window = window
        k = spectrum.k
        if k_cut is None:
            k_cut = spectrum.kbar + 5.0 / spectrum.l0
        # one panel spans two shortest wavelengths of |psi|^2
        max_panel = 2 * np.pi / k_cut
        breaks = sorted({window.lo, window.hi, sys.a1, sys.b1, sys.a2, sys.b2, sys.xc})
        breaks = [b for b in breaks if window.lo <= b <= window.hi]
        self.x, self.wx = gauss_legendre_grid(np.array(breaks), max_panel, order)
        self.energy = sys.energy(k)

        self.two = compose_two_barrier(sys, k)
        self.total = total_field(sys, k, self.two)
        self.swf = ref_field(sys, k, self.total, self.two)
        self._kw = (spectrum.weights * spectrum.amp / np.sqrt(2 * np.pi))[:, None]
        self._chunk = chunk
        self._kernels = {}

    # -- stationary pieces -------------------------------------------------
    def stationary(self, which, x, deriv=False, side=None):
        if which == "tot":
            return eval_total(self.total, self.sys, x, deriv)
        return eval_swf(which, self.sys, self.swf, self.total, x, deriv, side)

    def kernel(self, which):
        """K[k, x] = w_k A(k) psi(x, k)/sqrt(2 pi) on the model's x nodes."""
        if which not in self._kernels:
            out = np.empty((self.spectrum.k.size, self.x.size), complex)
            for s in range(0, self.x.size, self._chunk):
                xs = self.x[s:s + self._chunk]
                out[:, s:s + self._chunk] = self._kw * self.stationary(which, xs)
            self._kernels[which] = out
        return self._kernels[which]

    def phases(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.exp(-1j * np.outer(t, self.energy) / self.sys.hbar)

    def synthesize(self, which, t, x=None, deriv=False, side=None):
        """Packet values at times ``t`` (rows) and positions ``x`` (columns)."""
        ph = self.phases(t)
        if x is None:
            return ph @ self.kernel(which)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        st = self.stationary(which, x, deriv=deriv, side=side)
        if deriv:
            return ph @ (self._kw * st[0]), ph @ (self._kw * st[1])
        return ph @ (self._kw * st)

    # -- moments -------------------------------------------------------------
    def moments(self, t, t_chunk=64):
        """Norms, first and second moments of tot/tr/ref and the tr-ref overlap.

        Returns a dict of arrays over ``t``: ``norm_<w>``, ``x1_<w>``, ``x2_<w>``
        for w in tot, tr, ref, plus ``overlap`` = <psi_tr|psi_ref>.
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        Ktr, Kref = self.kernel("tr"), self.kernel("ref")
        wx, xw, x2w = self.wx, self.wx * self.x, self.wx * self.x**2
        keys = [f"{q}_{w}" for q in ("norm", "x1", "x2") for w in ("tot", "tr", "ref")]
        out = {key: np.empty(t.size) for key in keys}
        out["overlap"] = np.empty(t.size, complex)
        for s in range(0, t.size, t_chunk):
            ph = self.phases(t[s:s + t_chunk])
            ptr = ph @ Ktr
            pref = ph @ Kref
            for name, p in (("tr", ptr), ("ref", pref), ("tot", ptr + pref)):
                rho = np.abs(p) ** 2
                out[f"norm_{name}"][s:s + t_chunk] = rho @ wx
                out[f"x1_{name}"][s:s + t_chunk] = rho @ xw
                out[f"x2_{name}"][s:s + t_chunk] = rho @ x2w
            out["overlap"][s:s + t_chunk] = (np.conj(ptr) * pref) @ wx
        return out

    def cm(self, which, t):
        """Centre of mass of one packet at the times ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if which == "tot":
            p = self.phases(t) @ (self.kernel("tr") + self.kernel("ref"))
        else:
            p = self.phases(t) @ self.kernel(which)
        rho = np.abs(p) ** 2
        norm = rho @ self.wx
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(norm > EMPTY_NORM, (rho @ (self.wx * self.x)) / norm, np.nan)

    def midpoint_currents(self, t):
        """Currents of psi_tr just left and right of xc at the times ``t``."""
        xc = np.array([self.sys.xc])
        out = []
        for side in ("left", "right"):
            psi, dpsi = self.synthesize("tr", t, xc, deriv=True, side=side)
            out.append(current(psi[:, 0], dpsi[:, 0], self.sys))
        return out[0], out[1]


def make_model(spectrum, sys, t_lo, t_hi, window=None, **kw):
    if window is None:
        window = default_window(sys, spectrum.l0, spectrum.kbar, t_lo, t_hi)
    return PacketModel(spectrum, sys, window, **kw)


@dataclass
class PacketState:
    t: float
    x_grid: np.ndarray
    x_weights: np.ndarray
    psi_tot: np.ndarray
    psi_tr: np.ndarray
    psi_ref: np.ndarray
    norm_T: float
    norm_R: float

    @property
    def norm_total(self):
        return float(np.sum(self.x_weights * np.abs(self.psi_tot) ** 2))


def evolve(model, t, check_norm=True):
    """Snapshot of all three packets at time ``t``.

    ``psi_tot`` is synthesised from the total stationary state independently of
    the two subprocess packets.  A total norm further than ``NORM_DRIFT_LIMIT``
    from the grid norm of the spectrum raises ``NumericalFailure``.
    """
    t = float(t)
    tot = model.synthesize("tot", t)[0]
    tr = model.synthesize("tr", t)[0]
    ref = model.synthesize("ref", t)[0]
    wx = model.wx
    state = PacketState(t=t, x_grid=model.x, x_weights=wx, psi_tot=tot, psi_tr=tr, psi_ref=ref,
                        norm_T=float(np.sum(wx * np.abs(tr) ** 2)),
                        norm_R=float(np.sum(wx * np.abs(ref) ** 2)))
    if check_norm:
        drift = abs(state.norm_total - model.spectrum.norm())
        if drift > NORM_DRIFT_LIMIT:
            raise NumericalFailure(
                f"total norm drifted by {drift:.3g} at t={t:.6g}; enlarge the window or the k grid")
    return state


@dataclass
class CmTrajectory:
    """Centre-of-mass tracks and norms on a time grid.

    ``entry``/``exit`` hold the transmission crossing times of a1 and b2 (NaN if
    absent); ``ref_roots`` the crossings of a1 by the reflection packet.
    """

    times: np.ndarray
    xbar_tot: np.ndarray
    xbar_tr: np.ndarray
    xbar_ref: np.ndarray
    norm_tot: np.ndarray
    norm_T: np.ndarray
    norm_R: np.ndarray
    width_tot: np.ndarray
    entry: float = np.nan
    exit: float = np.nan
    ref_roots: list = field(default_factory=list)


def _crossings(model, which, times, xbar, target, tol):
    """All bisection-refined roots of xbar(t) = target, bracketed on the grid."""
    f = xbar - target
    ok = np.isfinite(f)
    roots = []
    for i in np.nonzero(ok[:-1] & ok[1:] & (np.sign(f[:-1]) * np.sign(f[1:]) < 0))[0]:
        g = lambda tt: float(model.cm(which, tt)[0] - target)
        roots.append(bisect(g, times[i], times[i + 1], xtol=tol))
    roots.extend(times[ok & (f == 0)].tolist())
    return sorted(roots)


def cm_track(model, t_range, n=400, tol=None):
    """CM trajectories of the three packets over ``t_range = (lo, hi)``.

    The time grid has at least ``n`` points; crossings of a1 and b2 are
    bracketed on it and refined by bisection to ``tol`` (default 1e-6 of the smaller of tau0
    and the free transit time).
    """
    sys = model.sys
    lo, hi = t_range
    times = np.linspace(lo, hi, max(int(n), 400))
    mom = model.moments(times)
    with np.errstate(invalid="ignore", divide="ignore"):
        xb = {w: np.where(mom[f"norm_{w}"] > EMPTY_NORM, mom[f"x1_{w}"] / mom[f"norm_{w}"], np.nan)
              for w in ("tot", "tr", "ref")}
        width = np.sqrt(np.maximum(mom["x2_tot"] / mom["norm_tot"] - xb["tot"] ** 2, 0.0))
    drift = np.max(np.abs(mom["norm_tot"] - model.spectrum.norm()))
    if drift > NORM_DRIFT_LIMIT:
        raise NumericalFailure(f"total norm drifted by {drift:.3g}; window or k grid too small")
    if tol is None:
        scale = sys.mass * sys.D / (sys.hbar * model.spectrum.kbar)
        if sys.kappa0_sq > 0:
            scale = min(scale, sys.mass * sys.D / (sys.hbar * np.sqrt(sys.kappa0_sq)))
        tol = 1e-6 * scale

    entry = _crossings(model, "tr", times, xb["tr"], sys.a1, tol)
    exit_ = _crossings(model, "tr", times, xb["tr"], sys.b2, tol)
    ref_roots = _crossings(model, "ref", times, xb["ref"], sys.a1, tol)
    return CmTrajectory(times=times, xbar_tot=xb["tot"], xbar_tr=xb["tr"], xbar_ref=xb["ref"],
                        norm_tot=mom["norm_tot"], norm_T=mom["norm_tr"], norm_R=mom["norm_ref"],
                        width_tot=width,
                        entry=entry[0] if entry else np.nan,
                        exit=exit_[0] if exit_ else np.nan,
                        ref_roots=ref_roots)


@dataclass(frozen=True)
class LocalTimes:
    tau_loc_tr: float
    tau_loc_ref: float
    entry_tr: float
    exit_tr: float
    entry_ref: float
    exit_ref: float
    reached: bool


def local_group_times(traj):
    """Time the transmission CM spends in [a1, b2], and the reflection analogue.

    The reflection time is zero unless its CM crosses a1 at least twice.
    ``reached`` is False when the transmission CM never gets to a1 or b2.
    """
    reached = bool(np.isfinite(traj.entry) and np.isfinite(traj.exit))
    tau_tr = traj.exit - traj.entry if reached else np.nan
    roots = traj.ref_roots
    if len(roots) >= 2:
        e_ref, x_ref, tau_ref = roots[0], roots[-1], roots[-1] - roots[0]
    else:
        e_ref, x_ref, tau_ref = np.nan, np.nan, 0.0
    return LocalTimes(tau_loc_tr=tau_tr, tau_loc_ref=tau_ref, entry_tr=traj.entry, exit_tr=traj.exit,
                      entry_ref=e_ref, exit_ref=x_ref, reached=reached)


@dataclass(frozen=True)
class SpectralAverages:
    """Channel-weighted spectral averages that fix the asymptotic CM lines."""

    T_as: float
    R_as: float
    kbar_tr: float
    kbar_ref: float
    lambda_p_tr: float
    lambda_p_ref: float
    J_two_p_tr: float
    J_two_p_ref: float


def spectral_averages(spectrum, sys):
    k = spectrum.k
    two = compose_two_barrier(sys, k)
    der = derivatives(sys, k, two)
    w = spectrum.weights * spectrum.amp**2
    T, R = two.T_two, two.R_two
    avg = lambda f, c: float(np.sum(w * c * f) / np.sum(w * c))
    return SpectralAverages(
        T_as=float(np.sum(w * T)), R_as=float(np.sum(w * R)),
        kbar_tr=avg(k, T), kbar_ref=avg(k, R),
        lambda_p_tr=avg(der.lambda_p, T), lambda_p_ref=avg(der.lambda_p, R),
        J_two_p_tr=avg(der.J_two_p, T), J_two_p_ref=avg(der.J_two_p, R),
    )


@dataclass(frozen=True)
class AsymptoticTimes:
    tau_as_tr: float
    tau_as_ref: float
    t_dep_tr: float
    t_arr_tr: float
    x_start_tr: float
    x_start_ref: float
    v_tr: float
    averages: SpectralAverages

    def free_reference(self, t):
        """CM of a free packet moving at the transmission speed, leaving x=0 at t_dep."""
        return self.v_tr * (np.asarray(t) - self.t_dep_tr)


def asymptotic_group_times_packet(spectrum, sys, delta_x=None):
    """Asymptotic group times from the spectral averages of the in/out CM lines.

    ``t_arr_tr`` is the arrival time of the outgoing transmission line at
    ``b2 + delta_x`` (default ``10*l0``).
    """
    av = spectral_averages(spectrum, sys)
    if delta_x is None:
        delta_x = 10 * spectrum.l0
    v_tr = sys.hbar * av.kbar_tr / sys.mass
    v_ref = sys.hbar * av.kbar_ref / sys.mass
    tau_tr = (av.J_two_p_tr - av.lambda_p_tr) / v_tr
    tau_ref = (av.J_two_p_ref - av.lambda_p_ref) / v_ref if av.R_as > EMPTY_NORM else np.nan
    t_dep = av.lambda_p_tr / v_tr
    t_arr = (sys.b2 + delta_x - sys.D + av.J_two_p_tr) / v_tr
    return AsymptoticTimes(tau_as_tr=tau_tr, tau_as_ref=tau_ref, t_dep_tr=t_dep, t_arr_tr=t_arr,
                           x_start_tr=-av.lambda_p_tr, x_start_ref=-av.lambda_p_ref, v_tr=v_tr,
                           averages=av)


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    max_residual: float


def fit_line(t, x):
    """Least-squares straight line with its worst residual."""
    t, x = np.asarray(t), np.asarray(x)
    slope, icpt = np.polyfit(t, x, 1)
    return LineFit(float(slope), float(icpt), float(np.max(np.abs(x - (slope * t + icpt)))))


def fitted_asymptotic_time(model, t_in, t_out, n=64):
    """tau_as of transmission from straight-line fits to the in and out CM stages.

    ``t_in``/``t_out`` are (lo, hi) intervals where the transmission packet is
    far from the barriers.  Returns (tau_as, fit_in, fit_out); the in line
    reaches x=0 and the out line reaches x=D at the same offset as in the
    spectral form, so tau_as = (D + b_in - b_out)/v with v the mean slope.
    """
    ti = np.linspace(*t_in, n)
    to = np.linspace(*t_out, n)
    fin = fit_line(ti, model.cm("tr", ti))
    fout = fit_line(to, model.cm("tr", to))
    v = 0.5 * (fin.slope + fout.slope)
    return (model.sys.D + fin.intercept - fout.intercept) / v, fin, fout


@dataclass(frozen=True)
class NormTrace:
    times: np.ndarray
    T: np.ndarray
    R: np.ndarray
    total: np.ndarray
    imbalance: np.ndarray
    dT_dt: np.ndarray


def norm_trace(model, times, dt=None):
    """Norms T(t), R(t) and the midpoint current imbalance of psi_tr.

    ``dT_dt`` is a central difference with step ``dt`` (default 1e-4 of the
    free transit time of one packet width), computed from separately
    synthesised norms so it is independent of the currents.
    """
    sys, sp = model.sys, model.spectrum
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if dt is None:
        dt = 1e-4 * sys.mass * sp.l0 / (sys.hbar * sp.kbar)
    mom = model.moments(times)
    plus = model.moments(times + dt)["norm_tr"]
    minus = model.moments(times - dt)["norm_tr"]
    left, right = model.midpoint_currents(times)
    return NormTrace(times=times, T=mom["norm_tr"], R=mom["norm_ref"], total=mom["norm_tot"],
                     imbalance=right - left, dT_dt=(plus - minus) / (2 * dt))


@dataclass(frozen=True)
class Acceleration:
    factor: float
    before: float
    after: float
    v_asymptotic: float
    v_max_before: float
    v_max_after: float


def acceleration_factor(traj, v_asymptotic):
    """Peak CM speed of psi_tr before entry and after exit relative to its asymptotic speed."""
    v = np.gradient(traj.xbar_tr, traj.times)
    before = traj.times <= traj.entry
    after = traj.times >= traj.exit
    vb = float(np.max(v[before])) if np.any(before) else np.nan
    va = float(np.max(v[after])) if np.any(after) else np.nan
    fb, fa = vb / v_asymptotic, va / v_asymptotic
    return Acceleration(factor=float(np.nanmax([fb, fa])), before=fb, after=fa,
                        v_asymptotic=v_asymptotic, v_max_before=vb, v_max_after=va)


def incident_cross_term(spectrum, sys):
    """<psi_tr^inc|psi_ref^inc> from the incident amplitudes; its real part vanishes."""
    k = spectrum.k
    total = total_field(sys, k)
    swf = ref_field(sys, k, total)
    w = spectrum.weights * spectrum.amp**2
    return complex(np.sum(w * np.conj(swf.A_in_tr) * swf.A_in_ref))
