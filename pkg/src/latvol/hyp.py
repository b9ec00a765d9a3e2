"""
Lobachevsky function and volumes of regular ideal bipyramids.

L(theta) = -int_0^theta log|2 sin t| dt = Cl_2(2 theta) / 2, evaluated from
the Clausen power series with the logarithmic term split off.
"""
import math

import numpy as np

from .kernels import clausen_reduced


def _clausen(x):
    """Cl_2 on the whole real line: odd and 2 pi periodic."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("Clausen/Lobachevsky argument must be finite")
    r = np.remainder(x, 2 * math.pi)  # [0, 2pi)
    sign = np.where(r > math.pi, -1.0, 1.0)
    r = np.where(r > math.pi, 2 * math.pi - r, r)
    return sign * clausen_reduced(r)


def lobachevsky(theta):
    """Lobachevsky function; accepts scalars or arrays.

    Odd and pi-periodic.  Absolute error is below 1e-14 on ``[0, pi]``.
    """
    out = 0.5 * _clausen(2.0 * np.asarray(theta, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


V_TET = 3 * lobachevsky(math.pi / 3)
V_OCT = 8 * lobachevsky(math.pi / 4)


def bipyramid_volume(n: int) -> float:
    """Volume of the regular ideal bipyramid over an ``n``-gon, ``2 n L(pi/n)``."""
    if int(n) != n or n < 2:
        raise ValueError(f"bipyramids need an integer n >= 2, got {n!r}")
    n = int(n)
    if n == 2:
        return 0.0
    return 2 * n * lobachevsky(math.pi / n)


def bipyramid_volumes(ns) -> np.ndarray:
    ns = np.asarray(ns)
    if (ns < 2).any():
        raise ValueError("bipyramids need n >= 2")
    vals = 2 * ns * lobachevsky(math.pi / ns)
    return np.where(ns == 2, 0.0, vals)
