"""Stationary scattering on a symmetric pair of rectangular barriers.

Barriers of height ``V0`` and width ``d`` occupy ``[a1, b1]`` and ``[a2, b2]``,
separated by a gap ``L``.  A particle of wavenumber ``k > 0`` comes in from the
left.  The total stationary state is written region by region as

    x <= a1        exp(ikx) + B_out exp(ik(2 a1 - x))
    [a1, b1]       alpha1 sinh(kappa(x-a1))/kappa + B1 cosh(kappa(x-a1))
    [b1, a2]       Agap sin(k(x-xc)) + Bgap cos(k(x-xc))
    [a2, b2]       alpha2 sinh(kappa(x-b2))/kappa + B2 cosh(kappa(x-b2))
    x >= b2        A_out exp(ik(x-D))

Under-barrier coefficients are stored premultiplied by kappa (``alpha = kappa*A``)
so that the basis stays real and finite for E < V0, E = V0 and E > V0.

All functions accept scalar ``k`` or numpy arrays of ``k`` and broadcast.
"""
from dataclasses import dataclass

import numpy as np

from . import _entire as ent


class NumericalFailure(RuntimeError):
    """A numerical procedure could not produce a trustworthy result."""


@dataclass(frozen=True)
class BarrierSystem:
    """Symmetric two-barrier potential plus particle constants.

    Defaults are the reduced units hbar = 1, m = 1/2, in which E = k**2.
    """

    V0: float
    d: float
    L: float = 0.0
    a1: float = 1.0
    mass: float = 0.5
    hbar: float = 1.0

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError(f"barrier width d must be positive, got {self.d}")
        if not self.L >= 0:
            raise ValueError(f"gap L must be non-negative, got {self.L}")
        if not self.a1 > 0:
            raise ValueError(f"left edge a1 must be positive, got {self.a1}")
        if self.V0 == 0:
            raise ValueError("V0 must be nonzero")
        if not (self.mass > 0 and self.hbar > 0):
            raise ValueError("mass and hbar must be positive")

    @property
    def b1(self):
        return self.a1 + self.d

    @property
    def a2(self):
        return self.b1 + self.L

    @property
    def b2(self):
        return self.a2 + self.d

    @property
    def D(self):
        return 2 * self.d + self.L

    @property
    def xc(self):
        return 0.5 * (self.a1 + self.b2)

    @property
    def kappa0_sq(self):
        """2 m V0 / hbar**2 (negative for a well)."""
        return 2 * self.mass * self.V0 / self.hbar**2

    @property
    def kappa0(self):
        """sqrt(2 m V0)/hbar; purely imaginary for V0 < 0."""
        return np.sqrt(complex(self.kappa0_sq)) if self.V0 < 0 else np.sqrt(self.kappa0_sq)

    def energy(self, k):
        return (self.hbar * np.asarray(k)) ** 2 / (2 * self.mass)

    def kappa_sq(self, k):
        k = np.asarray(k, dtype=float)
        return self.kappa0_sq - k * k

    def with_(self, **changes):
        fields = dict(V0=self.V0, d=self.d, L=self.L, a1=self.a1, mass=self.mass, hbar=self.hbar)
        fields.update(changes)
        return BarrierSystem(**fields)

    def point(self, k):
        return WaveNumberPoint.at(self, k)


@dataclass(frozen=True)
class WaveNumberPoint:
    k: float
    E: float
    kappa: complex
    kappa0: complex

    @classmethod
    def at(cls, sys, k):
        _check_k(k)
        g = sys.kappa_sq(k)
        return cls(k=k, E=sys.energy(k), kappa=np.sqrt(g + 0j), kappa0=np.sqrt(sys.kappa0_sq + 0j))


@dataclass(frozen=True)
class OneBarrierParams:
    """Scattering parameters of one rectangular barrier of width d.

    ``s = theta_plus*sinh(kappa d)``, ``u = theta_minus*sinh(kappa d)`` and
    ``c = cosh(kappa d)`` are real in every energy regime; ``sh`` is
    ``sinh(kappa d)/kappa``.
    """

    k: np.ndarray
    T: np.ndarray
    R: np.ndarray
    J: np.ndarray
    J0: np.ndarray
    F: np.ndarray
    eta: np.ndarray
    s: np.ndarray
    u: np.ndarray
    c: np.ndarray
    sh: np.ndarray
    g: np.ndarray

    @property
    def theta_plus(self):
        kap = np.sqrt(self.g + 0j)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 0.5 * (self.k / kap + kap / self.k)

    @property
    def theta_minus(self):
        kap = np.sqrt(self.g + 0j)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 0.5 * (self.k / kap - kap / self.k)

    @property
    def rho(self):
        """eta*sqrt(R), written so that it is smooth through R = 0."""
        return self.s * np.sqrt(self.T)


@dataclass(frozen=True)
class TransferMatrix:
    """Y = [[q, p], [p*, q*]] mapping right-side to left-side plane-wave amplitudes."""

    q: np.ndarray
    p: np.ndarray

    @property
    def matrix(self):
        q, p = np.asarray(self.q), np.asarray(self.p)
        return np.stack([np.stack([q, p], -1), np.stack([np.conj(p), np.conj(q)], -1)], -2)

    @classmethod
    def from_matrix(cls, Y):
        return cls(q=Y[..., 0, 0], p=Y[..., 0, 1])

    def __matmul__(self, other):
        return TransferMatrix.from_matrix(self.matrix @ other.matrix)

    def flux_defect(self):
        """|q|^2 - |p|^2 - 1, zero for a physical transfer matrix."""
        return np.abs(self.q) ** 2 - np.abs(self.p) ** 2 - 1.0


@dataclass(frozen=True)
class TwoBarrierParams:
    k: np.ndarray
    T_two: np.ndarray
    R_two: np.ndarray
    J_two: np.ndarray
    F_two: np.ndarray
    F_two0: np.ndarray
    eta_two: np.ndarray
    chi: np.ndarray
    one: OneBarrierParams


@dataclass(frozen=True)
class StationaryField:
    """Coefficients of the total stationary state; see the module docstring."""

    k: np.ndarray
    g: np.ndarray
    B_out: np.ndarray
    A_out: np.ndarray
    alpha1: np.ndarray
    B1: np.ndarray
    Agap: np.ndarray
    Bgap: np.ndarray
    alpha2: np.ndarray
    B2: np.ndarray
    Q: np.ndarray
    P: np.ndarray

    def _kappa(self):
        return np.sqrt(np.asarray(self.g) + 0j)

    @property
    def A1(self):
        return self.alpha1 / self._kappa()

    @property
    def A2(self):
        return self.alpha2 / self._kappa()


def _check_k(k):
    k = np.asarray(k, dtype=float)
    if np.any(~(k > 0)):
        raise ValueError("wavenumber k must be positive")
    return k


def one_barrier_params(sys, k, width=None):
    """T, J, F, eta of a single rectangular barrier (width ``sys.d`` by default).

    ``J`` follows the branch J = arctan(theta_minus*tanh(kappa d)) + J0 with
    J0 = pi where cosh(kappa d) < 0, so ``J`` lies in (-pi/2, 3pi/2).
    """
    k = _check_k(k)
    d = sys.d if width is None else width
    g = sys.kappa_sq(k)
    sh = ent.sh(g, d)
    c = ent.ch(g, d)
    s = 0.5 * sh * (k + g / k)
    u = 0.5 * sh * (k - g / k)
    T = 1.0 / (1.0 + s * s)
    R = s * s * T
    J = np.arctan2(u, c)
    J = np.where(J < -0.5 * np.pi, J + 2 * np.pi, J)
    J0 = np.where(c < 0, np.pi, 0.0)
    eta = np.where(s > 0, 1.0, -1.0)
    F = np.where(eta > 0, 0.0, np.pi)
    return OneBarrierParams(k=k, T=T, R=R, J=J, J0=J0, F=F, eta=eta, s=s, u=u, c=c, sh=sh, g=g)


def transfer_matrix(params, a, b, k=None):
    """Transfer matrix of a barrier on [a, b] with one-barrier parameters ``params``.

    q = exp(i[k(b-a) - J])/sqrt(T),  p = i sqrt(R/T) exp(i[F - k(b+a)]).
    """
    if not b > a:
        raise ValueError("need b > a")
    k = params.k if k is None else np.asarray(k, dtype=float)
    sqT = np.sqrt(params.T)
    q = np.exp(1j * (k * (b - a) - params.J)) / sqT
    p = 1j * np.sqrt(params.R) / sqT * np.exp(1j * (params.F - k * (b + a)))
    return TransferMatrix(q=q, p=p)


def reduced_transfer_elements(params):
    """q = exp(-iJ)/sqrt(T), p = eta*sqrt(R/T): the position-free single-barrier pair."""
    sqT = np.sqrt(params.T)
    return np.exp(-1j * params.J) / sqT, params.s + 0j


def compose_two_barrier(sys, k):
    """Two-barrier parameters from the one-barrier ones (closed-form composition)."""
    one = one_barrier_params(sys, k)
    k = one.k
    T, R = one.T, one.R
    chi = one.J + k * sys.L
    cos_chi, sin_chi = np.cos(chi), np.sin(chi)
    denom = T * T + 4 * R * cos_chi**2
    T_two = T * T / denom
    R_two = 4 * R * cos_chi**2 / denom
    a = T / (1 + R)
    # arctan(a tan chi) + F_two0, written without dividing by cos chi
    J_two = one.J + np.arctan2(a * sin_chi, cos_chi)
    J_two = np.where((cos_chi < 0) & (sin_chi < 0), J_two + 2 * np.pi, J_two)
    F_two0 = np.where(cos_chi >= 0, 0.0, np.pi)
    F_two = np.mod(one.F + F_two0, 2 * np.pi)
    eta_two = np.where(F_two == 0, 1.0, -1.0)
    return TwoBarrierParams(k=k, T_two=T_two, R_two=R_two, J_two=J_two, F_two=F_two,
                            F_two0=F_two0, eta_two=eta_two, chi=chi, one=one)


def two_barrier_matrix(sys, k):
    """Y_two = Y1 @ Y2 built from the single-barrier transfer matrices."""
    one = one_barrier_params(sys, k)
    Y1 = transfer_matrix(one, sys.a1, sys.b1)
    Y2 = transfer_matrix(one, sys.a2, sys.b2)
    return Y1 @ Y2


def params_from_matrix(sys, Y, k):
    """Recover (T_two, J_two, F_two) from q_two, p_two; angles reduced mod 2pi."""
    k = np.asarray(k, dtype=float)
    T_two = 1.0 / np.abs(Y.q) ** 2
    J_two = np.mod(k * sys.D - np.angle(Y.q), 2 * np.pi)
    F_two = np.mod(np.angle(Y.p / 1j) + k * (sys.b2 + sys.a1), 2 * np.pi)
    return T_two, J_two, F_two


def total_field(sys, k, two=None):
    """All coefficients of the total stationary state from the transfer-matrix path."""
    if two is None:
        two = compose_two_barrier(sys, k)
    one = two.one
    k = two.k
    q, p = reduced_transfer_elements(one)
    hL = 0.5 * k * sys.L
    Q = np.conj(q) * np.exp(1j * hL) + 1j * p * np.exp(-1j * hL)
    P = 1j * np.conj(q) * np.exp(1j * hL) + p * np.exp(-1j * hL)
    A_out = np.sqrt(two.T_two) * np.exp(1j * two.J_two)
    B_out = -1j * np.sqrt(two.R_two) * np.exp(1j * (two.J_two - two.F_two))
    ea = np.exp(1j * k * sys.a1)
    return StationaryField(
        k=k, g=one.g, B_out=B_out, A_out=A_out,
        alpha1=1j * k * (1 - B_out) * ea, B1=(1 + B_out) * ea,
        Agap=-A_out * np.conj(P) * ea, Bgap=A_out * np.conj(Q) * ea,
        alpha2=1j * k * A_out * ea, B2=A_out * ea,
        Q=Q, P=P,
    )


def outgoing_from_QP(field):
    """A_out and B_out from the Q, P closed forms (second route)."""
    rq = field.Q / np.conj(field.Q)
    rp = field.P / np.conj(field.P)
    return 0.5 * (rq - rp), -0.5 * (rq + rp)


def _bcast(c, x):
    c = np.asarray(c)
    return c.reshape(c.shape + (1,) * np.ndim(x))


def region_masks(sys, x):
    x = np.asarray(x, dtype=float)
    left = x <= sys.a1
    bar1 = (x > sys.a1) & (x <= sys.b1)
    gap = (x > sys.b1) & (x < sys.a2)
    bar2 = (x >= sys.a2) & (x < sys.b2)
    right = x >= sys.b2
    bar2 &= ~bar1
    return left, bar1, gap, bar2, right


def eval_total(field, sys, x, deriv=False):
    """Total stationary state at ``x``; returns (psi, dpsi/dx) if ``deriv``.

    Output shape is ``k.shape + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    c = lambda v: _bcast(v, x)
    k, g = c(field.k), c(field.g)
    left, bar1, gap, bar2, right = region_masks(sys, x)

    e_in = np.exp(1j * k * x)
    e_ref = c(field.B_out) * np.exp(1j * k * (2 * sys.a1 - x))
    # clipping keeps the unused branches finite far from the barriers
    y1 = np.clip(x - sys.a1, 0.0, sys.d)
    sh1, ch1 = ent.sh(g, y1), ent.ch(g, y1)
    sn, cs = np.sin(k * (x - sys.xc)), np.cos(k * (x - sys.xc))
    y2 = np.clip(x - sys.b2, -sys.d, 0.0)
    sh2, ch2 = ent.sh(g, y2), ent.ch(g, y2)
    e_out = c(field.A_out) * np.exp(1j * k * (x - sys.D))

    psi = np.select(
        [left, bar1, gap, bar2],
        [e_in + e_ref,
         c(field.alpha1) * sh1 + c(field.B1) * ch1,
         c(field.Agap) * sn + c(field.Bgap) * cs,
         c(field.alpha2) * sh2 + c(field.B2) * ch2],
        default=e_out,
    )
    if not deriv:
        return psi
    dpsi = np.select(
        [left, bar1, gap, bar2],
        [1j * k * (e_in - e_ref),
         c(field.alpha1) * ch1 + c(field.B1) * g * sh1,
         k * (c(field.Agap) * cs - c(field.Bgap) * sn),
         c(field.alpha2) * ch2 + c(field.B2) * g * sh2],
        default=1j * k * e_out,
    )
    return psi, dpsi


def oracle_amplitudes(sys, k):
    """Solve the 8x8 continuity system directly with complex sinh/cosh.

    Independent of the transfer-matrix route; intended as ground truth in tests.
    Requires E != V0.
    """
    ks = np.atleast_1d(_check_k(k))
    out = {name: np.empty(ks.shape, complex) for name in
           ("B_out", "A1", "B1", "Agap", "Bgap", "A2", "B2", "A_out")}
    for i, kk in enumerate(ks):
        kap = np.sqrt(complex(sys.kappa0_sq - kk * kk))
        if abs(kap) * sys.d < 1e-12:
            raise NumericalFailure("oracle is singular at E = V0")
        ea = np.exp(1j * kk * sys.a1)
        d, xc = sys.d, sys.xc
        sb, cb = np.sin(kk * (sys.b1 - xc)), np.cos(kk * (sys.b1 - xc))
        sa, ca = np.sin(kk * (sys.a2 - xc)), np.cos(kk * (sys.a2 - xc))
        shd, chd = np.sinh(kap * d), np.cosh(kap * d)
        # unknowns: B_out, A1, B1, Agap, Bgap, A2, B2, A_out
        M = np.zeros((8, 8), complex)
        rhs = np.zeros(8, complex)
        M[0, [0, 2]] = [ea, -1]
        rhs[0] = -ea
        M[1, [0, 1]] = [-1j * kk * ea, -kap]
        rhs[1] = -1j * kk * ea
        M[2, [1, 2, 3, 4]] = [shd, chd, -sb, -cb]
        M[3, [1, 2, 3, 4]] = [kap * chd, kap * shd, -kk * cb, kk * sb]
        M[4, [3, 4, 5, 6]] = [sa, ca, shd, -chd]  # sinh(-kap d) = -shd
        M[5, [3, 4, 5, 6]] = [kk * ca, -kk * sa, -kap * chd, kap * shd]
        M[6, [6, 7]] = [1, -ea]
        M[7, [5, 7]] = [kap, -1j * kk * ea]
        try:
            sol = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(f"continuity system singular at k={kk}") from exc
        for name, v in zip(out, sol):
            out[name][i] = v
    shape = np.shape(k)
    kap = np.sqrt(sys.kappa_sq(ks) + 0j)
    B_out = out["B_out"]
    ea = np.exp(1j * ks * sys.a1)
    # Q, P are not defined by the linear system; recover them from the gap amplitudes
    A_out = out["A_out"]
    field = StationaryField(
        k=ks.reshape(shape), g=sys.kappa_sq(ks).reshape(shape),
        B_out=B_out.reshape(shape), A_out=A_out.reshape(shape),
        alpha1=(kap * out["A1"]).reshape(shape), B1=out["B1"].reshape(shape),
        Agap=out["Agap"].reshape(shape), Bgap=out["Bgap"].reshape(shape),
        alpha2=(kap * out["A2"]).reshape(shape), B2=out["B2"].reshape(shape),
        Q=np.conj(out["Bgap"] / (A_out * ea)).reshape(shape),
        P=np.conj(-out["Agap"] / (A_out * ea)).reshape(shape),
    )
    return field


def find_resonances(sys, k_lo, k_hi, points_per_kappa0=2000, rtol=1e-12):
    """Wavenumbers in [k_lo, k_hi] where the two-barrier system is fully transparent.

    Full transparency happens where cos(J + kL) = 0, and also where a single
    barrier is itself transparent (R = 0, only possible above the barrier top).
    Roots are bracketed on a uniform grid and refined by bisection.
    """
    from scipy.optimize import bisect

    k_lo = max(float(k_lo), 1e-12)
    scale = np.sqrt(abs(sys.kappa0_sq))
    n = max(int(np.ceil(points_per_kappa0 * (k_hi - k_lo) / scale)), 2000)
    grid = np.linspace(k_lo, k_hi, n + 1)

    def cos_chi(k):
        one = one_barrier_params(sys, k)
        return np.cos(one.J + one.k * sys.L)

    def s_of(k):
        return one_barrier_params(sys, k).s

    roots = []
    for f in (cos_chi, s_of):
        vals = f(grid)
        exact = grid[vals == 0]
        roots.extend(exact.tolist())
        idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        for i in idx:
            lo, hi = grid[i], grid[i + 1]
            roots.append(bisect(lambda kk: float(f(kk)), lo, hi, xtol=1e-300, rtol=max(rtol, 4.5e-16)))
    roots = np.sort(np.array(roots, dtype=float))
    if roots.size:
        keep = np.concatenate([[True], np.diff(roots) > 1e-9 * roots[1:]])
        roots = roots[keep]
    return roots.tolist()
