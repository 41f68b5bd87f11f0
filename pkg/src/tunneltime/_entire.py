"""Entire functions of kappa**2 used in place of sinh/cosh with real or imaginary kappa.

With ``g = kappa**2`` (negative above the barrier top) the combinations

    sinh(kappa*y)/kappa = y * S(g*y**2),    cosh(kappa*y) = C(g*y**2)

are real and analytic in ``g``, so one code path serves E < V0, E = V0 and E > V0.
"""
import math

import numpy as np

# |z| below this is handled by the power series
_SERIES_RADIUS = 1.0
_NTERMS = 18

_S_COEF = np.array([1.0 / math.factorial(2 * n + 1) for n in range(_NTERMS)])
_C_COEF = np.array([1.0 / math.factorial(2 * n) for n in range(_NTERMS)])
# S1(z) = (S(z) - 1)/z
_S1_COEF = _S_COEF[1:]
# dS/dz
_SP_COEF = np.array([n / math.factorial(2 * n + 1) for n in range(1, _NTERMS)])


def _series(coef, z):
    out = np.zeros_like(z)
    for c in coef[::-1]:
        out = out * z + c
    return out


def _split(z):
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < _SERIES_RADIUS
    pos = ~small & (z > 0)
    neg = ~small & (z < 0)
    return z, small, pos, neg


def S(z):
    """sinh(sqrt(z))/sqrt(z), continued to z <= 0."""
    z, small, pos, neg = _split(z)
    out = np.empty_like(z)
    out[small] = _series(_S_COEF, z[small])
    r = np.sqrt(z[pos])
    out[pos] = np.sinh(r) / r
    r = np.sqrt(-z[neg])
    out[neg] = np.sin(r) / r
    return out if out.ndim else out[()]


def C(z):
    """cosh(sqrt(z)), continued to z <= 0."""
    z, small, pos, neg = _split(z)
    out = np.empty_like(z)
    out[small] = _series(_C_COEF, z[small])
    out[pos] = np.cosh(np.sqrt(z[pos]))
    out[neg] = np.cos(np.sqrt(-z[neg]))
    return out if out.ndim else out[()]


def S1(z):
    """(S(z) - 1)/z."""
    z, small, pos, neg = _split(z)
    out = np.empty_like(z)
    out[small] = _series(_S1_COEF, z[small])
    big = ~small
    out[big] = (S(z[big]) - 1.0) / z[big]
    return out if out.ndim else out[()]


def Sp(z):
    """dS/dz = (C(z) - S(z))/(2z)."""
    z, small, pos, neg = _split(z)
    out = np.empty_like(z)
    out[small] = _series(_SP_COEF, z[small])
    big = ~small
    out[big] = (C(z[big]) - S(z[big])) / (2.0 * z[big])
    return out if out.ndim else out[()]


def sh(g, y):
    """sinh(kappa*y)/kappa with g = kappa**2."""
    y = np.asarray(y, dtype=float)
    return y * S(g * y * y)


def ch(g, y):
    """cosh(kappa*y) with g = kappa**2."""
    y = np.asarray(y, dtype=float)
    return C(g * y * y)
