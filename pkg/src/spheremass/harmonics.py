"""Real orthonormal spherical harmonics on the quadrature grid.

Fully normalized associated Legendre functions are generated by the standard
stable recurrences with derivative propagation; second theta-derivatives come
from the defining ODE.  Basis functions are orthonormal for the solid-angle
inner product, so Gauss-Legendre quadrature reproduces delta_{lm,l'm'} to
machine precision for l + l' < 2 n_theta.
"""

from __future__ import annotations

import numpy as np

__all__ = ["HarmonicBasis", "real_sph_harm_table"]


def _legendre_normalized(lmax, x):
    """P_bar[l][m] values and x-derivatives at abscissae x (|x| < 1).

    Normalization: int_{S^2} (P_bar_lm(cos t) e^{i m phi})^2-style weight,
    i.e. int_{-1}^{1} P_bar_lm^2 dx = (2 - delta_m0)^{-1} ... concretely the
    real harmonics assembled below satisfy int Y^2 dOmega = 1.
    """
    x = np.asarray(x, dtype=float)
    s = np.sqrt(1.0 - x * x)
    p = np.zeros((lmax + 1, lmax + 1) + x.shape)
    dp = np.zeros_like(p)
    p[0, 0] = np.sqrt(1.0 / (4.0 * np.pi))
    for m in range(1, lmax + 1):
        c = np.sqrt((2.0 * m + 1.0) / (2.0 * m))
        p[m, m] = c * (s * p[m - 1, m - 1])
        dp[m, m] = c * (s * dp[m - 1, m - 1] - x / s * p[m - 1, m - 1])
    for m in range(lmax):
        c = np.sqrt(2.0 * m + 3.0)
        p[m + 1, m] = c * x * p[m, m]
        dp[m + 1, m] = c * (p[m, m] + x * dp[m, m])
    for m in range(lmax + 1):
        for l in range(m + 2, lmax + 1):
            a = np.sqrt((2.0 * l - 1.0) * (2.0 * l + 1.0) / ((l - m) * (l + m)))
            b = np.sqrt((2.0 * l + 1.0) * (l - 1.0 - m) * (l - 1.0 + m)
                        / ((2.0 * l - 3.0) * (l - m) * (l + m)))
            p[l, m] = a * x * p[l - 1, m] - b * p[l - 2, m]
            dp[l, m] = a * (p[l - 1, m] + x * dp[l - 1, m]) - b * dp[l - 2, m]
    return p, dp


def real_sph_harm_table(lmax, theta, phi):
    """Values of the real orthonormal harmonics at given angles, as an array
    of shape ((lmax+1)^2, len(theta)); index layout l^2 + l + m with sin
    branches at m < 0 and cos branches at m > 0."""
    basis = HarmonicBasis(lmax, np.asarray(theta), np.asarray(phi))
    return basis.y


class HarmonicBasis:
    """Tabulated real harmonics and their first/second angle derivatives.

    Arrays ``y, yt, yp, ytt, ytp, ypp`` have shape (n_basis, n_nodes) where
    ``t`` means d/dtheta and ``p`` means d/dphi.
    """

    def __init__(self, lmax, theta, phi):
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        self.lmax = int(lmax)
        self.n_basis = (self.lmax + 1) ** 2
        n = theta.size
        x = np.cos(theta)
        st = np.sin(theta)
        ct = x
        p, dp = _legendre_normalized(self.lmax, x)
        # second x-derivative from the associated Legendre equation
        self.y = np.zeros((self.n_basis, n))
        self.yt = np.zeros_like(self.y)
        self.yp = np.zeros_like(self.y)
        self.ytt = np.zeros_like(self.y)
        self.ytp = np.zeros_like(self.y)
        self.ypp = np.zeros_like(self.y)
        one_m_x2 = 1.0 - x * x
        for l in range(self.lmax + 1):
            for m in range(0, l + 1):
                pv, pd = p[l, m], dp[l, m]
                pdd = (2.0 * x * pd - (l * (l + 1) - m * m / one_m_x2) * pv) / one_m_x2
                f = pv                     # f(theta) = P(cos theta)
                ft = -st * pd
                ftt = -ct * pd + st * st * pdd
                if m == 0:
                    idx = l * l + l
                    self.y[idx] = f
                    self.yt[idx] = ft
                    self.ytt[idx] = ftt
                    continue
                c = np.sqrt(2.0) * np.cos(m * phi)
                sn = np.sqrt(2.0) * np.sin(m * phi)
                ic = l * l + l + m
                isn = l * l + l - m
                self.y[ic], self.y[isn] = f * c, f * sn
                self.yt[ic], self.yt[isn] = ft * c, ft * sn
                self.yp[ic], self.yp[isn] = -m * f * sn, m * f * c
                self.ytt[ic], self.ytt[isn] = ftt * c, ftt * sn
                self.ytp[ic], self.ytp[isn] = -m * ft * sn, m * ft * c
                self.ypp[ic], self.ypp[isn] = -m * m * f * c, -m * m * f * sn

    def index(self, l, m):
        return l * l + l + m
