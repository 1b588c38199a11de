"""Mass functionals and volume comparisons evaluated on sampled surfaces.

All functionals consume surfaces and embeddings produced elsewhere; nothing
here re-derives geometry, so a MassReport row has a single source of truth
for every integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .embedding import minkowski_check
from .errors import GeometryError
from .spheres import integrate_scalar

__all__ = [
    "MassReport",
    "brown_york",
    "hawking",
    "adm_integral",
    "isoperimetric_term",
    "volume_comparison",
    "build_mass_report",
]

#: fixed serialization order of MassReport columns
MASS_REPORT_COLUMNS = (
    "r", "area", "int_H", "int_H0", "int_H2", "m_BY", "m_H", "adm_partial",
    "V", "V0", "iso_term", "embed_residual", "mink_res1", "mink_res2",
)


@dataclass
class MassReport:
    """Per-radius mass and volume observables with solver diagnostics.

    The mass fields are stored exactly as the algebraic combinations of the
    stored integrals: m_BY = (int_H0 - int_H)/(8 pi) and
    m_H = sqrt(area/16 pi) (16 pi - int_H2)/(16 pi).
    """

    r: float
    area: float
    int_H: float
    int_H0: Optional[float] = None
    int_H2: Optional[float] = None
    adm_partial: Optional[float] = None
    V: Optional[float] = None
    V0: Optional[float] = None
    embed_residual: Optional[float] = None
    mink_res1: Optional[float] = None
    mink_res2: Optional[float] = None
    m_BY: Optional[float] = field(init=False, default=None)
    m_H: Optional[float] = field(init=False, default=None)
    iso_term: Optional[float] = field(init=False, default=None)

    def __post_init__(self):
        if self.int_H0 is not None:
            self.m_BY = (self.int_H0 - self.int_H) / (8.0 * math.pi)
        if self.int_H2 is not None:
            self.m_H = math.sqrt(self.area / (16.0 * math.pi)) \
                * (16.0 * math.pi - self.int_H2) / (16.0 * math.pi)
        if self.V is not None:
            self.iso_term = isoperimetric_term(self.V, self.area)

    def to_dict(self):
        return {k: getattr(self, k) for k in MASS_REPORT_COLUMNS}


def brown_york(surface, es):
    """(1/8 pi) int (H0 - H) dSigma over the physical measure."""
    if es.grid is not surface.grid and es.grid.n_nodes != surface.grid.n_nodes:
        raise GeometryError("embedding and surface live on different grids")
    diff = es.h0_mean_curvature - surface.mean_curvature
    return integrate_scalar(surface, diff) / (8.0 * math.pi)


def hawking(surface):
    """sqrt(A/16 pi) (16 pi - int H^2 dSigma)/(16 pi); no embedding needed."""
    int_h2 = integrate_scalar(surface, surface.mean_curvature ** 2)
    area = surface.area
    return math.sqrt(area / (16.0 * math.pi)) * (16.0 * math.pi - int_h2) \
        / (16.0 * math.pi)


def adm_integral(metric, r, grid):
    """Flux integral (1/16 pi) int (g_ij,i - g_ii,j) nu^j dSigma^0 over the
    coordinate sphere |x| = r, with Euclidean measure and Euclidean normal."""
    if metric.af_order is None:
        raise GeometryError("the ADM flux integral needs an asymptotically "
                            "flat entry (af_order set)")
    x = r * grid.directions
    dg = np.moveaxis(metric.jets(x, 1).gradient, -1, -3)  # (n, m, i, j)
    nu = grid.directions
    integrand = (np.einsum("niij->nj", dg) - np.einsum("njii->nj", dg))
    flux = np.einsum("nj,nj->n", integrand, nu)
    return float(np.sum(grid.weights * flux * r * r)) / (16.0 * math.pi)


def isoperimetric_term(volume, area):
    """Isoperimetric-deficit mass term (2/A)(V - A^{3/2}/(6 sqrt(pi)))."""
    if volume <= 0 or area <= 0:
        raise ValueError("volume and area must be positive")
    return 2.0 / area * (volume - area ** 1.5 / (6.0 * math.sqrt(math.pi)))


def volume_comparison(volume, euclid_volume):
    """Euclidean-reference volume deficit V0 - V."""
    return euclid_volume - volume


def build_mass_report(surface, es=None, adm_partial=None, ball_volume=None):
    """Assemble the MassReport row for one surface (+ optional embedding)."""
    int_h = integrate_scalar(surface, surface.mean_curvature)
    int_h2 = integrate_scalar(surface, surface.mean_curvature ** 2)
    kwargs = dict(r=surface.radius, area=surface.area, int_H=int_h,
                  int_H2=int_h2, adm_partial=adm_partial, V=ball_volume)
    if es is not None:
        r1, r2 = minkowski_check(es)
        kwargs.update(int_H0=integrate_scalar(surface, es.h0_mean_curvature),
                      V0=es.integrate(es.support) / 3.0,
                      embed_residual=es.residual, mink_res1=r1, mink_res2=r2)
    return MassReport(**kwargs)