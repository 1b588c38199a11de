"""Closed-form expansion coefficients, ladder scans, coefficient fitting and
theory-versus-fit comparison reports.

Small geodesic spheres about a point p obey
    m_BY = (R/12) r^3 + [(24|Ric|^2 - 13 R^2 + 12 Lap R)/1440] r^5 + O(r^6),
    m_H  = (R/12) r^3 + [(6 Lap R - 5 R^2)/720] r^5 + O(r^6),
    Area = 4 pi r^2 - (2 pi R/9) r^4
           + [pi (4 R^2 - 2|Ric|^2 - 9 Lap R)/675] r^6 + O(r^7),
    V0 - V = -(pi R/15) r^5
           + [pi (59 R^2 - 152 |Ric|^2 - 12 Lap R)/2520] r^7 + O(r^8),
with all curvature quantities evaluated at p.  Large coordinate spheres in
an asymptotically flat chart of order tau satisfy m_BY -> m_ADM with an
O(r^-tau) tail, V0 - V = -2 pi m_ADM r^2 + o(r^2), and the isoperimetric
deficit term tends to m_ADM.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .curvature import curvature_at
from .embedding import EmbeddingOptions, solve_embedding
from .errors import FitRankDeficientError
from .masses import adm_integral, build_mass_report
from .spheres import (SphereGrid, ball_volume_family, coordinate_region_volume,
                      coordinate_sphere, geodesic_sphere_family)
from .utils import parallel_map

__all__ = [
    "TheoryCoefficients",
    "ExpansionFit",
    "small_sphere_theory",
    "fit_power_series",
    "large_sphere_limit",
    "freed_decay_exponent",
    "large_volume_fit",
    "small_sphere_scan",
    "large_sphere_scan",
    "theorem_report",
    "TheoremReport",
]


# ---------------------------------------------------------------------- #
# closed-form coefficients

@dataclass
class TheoryCoefficients:
    """Expansion coefficients as pure functions of pointwise curvature."""

    c3_by: float
    c5_by: float
    c3_h: float
    c5_h: float
    a4: float
    a6: float
    v5: float
    v7: float
    large_v2: Optional[float] = None

    def as_dict(self):
        return {k: getattr(self, k) for k in
                ("c3_by", "c5_by", "c3_h", "c5_h", "a4", "a6", "v5", "v7")}


def small_sphere_theory(curv):
    """Coefficients of the small-sphere expansions from curvature at p."""
    r = float(curv.scalar)
    p = float(curv.ricci_norm_sq)
    lap = float(curv.laplacian_scalar)
    return TheoryCoefficients(
        c3_by=r / 12.0,
        c5_by=(24.0 * p - 13.0 * r * r + 12.0 * lap) / 1440.0,
        c3_h=r / 12.0,
        c5_h=(6.0 * lap - 5.0 * r * r) / 720.0,
        a4=-2.0 * math.pi * r / 9.0,
        a6=math.pi * (4.0 * r * r - 2.0 * p - 9.0 * lap) / 675.0,
        v5=-math.pi * r / 15.0,
        v7=math.pi * (59.0 * r * r - 152.0 * p - 12.0 * lap) / 2520.0,
    )


def large_volume_theory(adm_mass):
    """Leading coefficient of (V0 - V)/r^2 for large coordinate spheres."""
    return -2.0 * math.pi * adm_mass


# ---------------------------------------------------------------------- #
# weighted power-series fits

@dataclass
class ExpansionFit:
    exponents: tuple
    coefficients: np.ndarray
    uncertainties: np.ndarray
    residual_norm: float
    ladder: np.ndarray
    condition_number: float
    weights: str = "relative"

    def coefficient(self, exponent):
        return float(self.coefficients[self.exponents.index(exponent)])

    def uncertainty(self, exponent):
        return float(self.uncertainties[self.exponents.index(exponent)])


def fit_power_series(samples, exponents, weights="relative"):
    """Weighted linear least squares of value against {r^e}.

    ``weights='relative'`` uses 1/r^(2 min e), equalizing the relative error
    of the leading term across the ladder; ``'uniform'`` uses unit weights.
    Rank deficiency raises FitRankDeficientError rather than regularizing.
    """
    samples = sorted((float(r), float(v)) for r, v in samples)
    rs = np.array([s[0] for s in samples])
    ys = np.array([s[1] for s in samples])
    exponents = tuple(exponents)
    if len(rs) < len(exponents) + 1:
        raise ValueError(f"need at least {len(exponents) + 1} samples for "
                         f"{len(exponents)} exponents")
    if np.any(rs <= 0) or len(np.unique(rs)) != len(rs):
        raise ValueError("radii must be positive and distinct")
    if weights == "relative":
        w = rs ** (-2.0 * min(exponents))
    elif weights == "uniform":
        w = np.ones_like(rs)
    else:
        raise ValueError(f"unknown weight selector '{weights}'")
    design = rs[:, None] ** np.array(exponents)[None, :]
    sw = np.sqrt(w)
    a = design * sw[:, None]
    b = ys * sw
    cond = float(np.linalg.cond(a))
    col_scale = np.linalg.norm(a, axis=0)
    if col_scale.min() == 0 or not np.isfinite(cond):
        raise FitRankDeficientError("degenerate design matrix")
    a_s = a / col_scale
    sv = np.linalg.svd(a_s, compute_uv=False)
    if sv.min() / sv.max() < 1e-13:
        raise FitRankDeficientError(
            f"design matrix numerically rank deficient for exponents "
            f"{exponents} on ladder [{rs.min():g}, {rs.max():g}]")
    coef_s, res2, _, _ = np.linalg.lstsq(a_s, b, rcond=None)
    coef = coef_s / col_scale
    resid = a @ coef - b
    dof = max(len(rs) - len(exponents), 1)
    sigma2 = float(resid @ resid) / dof
    cov = np.linalg.inv(a_s.T @ a_s)
    unc = np.sqrt(np.diag(cov) * sigma2) / col_scale
    return ExpansionFit(exponents=exponents, coefficients=coef,
                        uncertainties=unc,
                        residual_norm=float(np.linalg.norm(resid)),
                        ladder=rs, condition_number=cond, weights=weights)


def large_sphere_limit(reports, quantity, tau, extra_decay=False):
    """Extrapolated large-radius limit of a ladder quantity.

    Fits value = L + b r^(-tau) (optionally + c r^(-tau-1)) over the ladder;
    the ladder must span at least 1.5 decades.  Returns (L, uncertainty,
    ExpansionFit).
    """
    rs, ys = _ladder_values(reports, quantity)
    if rs.max() / rs.min() < 10.0 ** 1.5:
        raise ValueError("ladder must span at least 1.5 decades of radius")
    exps = (0.0, -float(tau)) + ((-float(tau) - 1.0,) if extra_decay else ())
    fit = fit_power_series(zip(rs, ys), exps, weights="uniform")
    return fit.coefficient(0.0), fit.uncertainty(0.0), fit


def freed_decay_exponent(reports, quantity, tau):
    """Diagnostic: decay exponent of |value - L| fitted on log-log axes."""
    rs, ys = _ladder_values(reports, quantity)
    limit, _, _ = large_sphere_limit(reports, quantity, tau)
    resid = np.abs(ys - limit)
    mask = resid > 0
    slope = np.polyfit(np.log(rs[mask]), np.log(resid[mask]), 1)[0]
    return -float(slope)


def large_volume_fit(reports, tau):
    """Fitted r^2 coefficient of V0 - V on a large-sphere ladder, with the
    heuristic r^(2 - delta) nuisance, delta = min(1, 2 tau - 1), plus a
    constant absorbing any interior (cap) offset."""
    rs, ys = _ladder_values(reports, "volume_deficit")
    delta = min(1.0, 2.0 * float(tau) - 1.0)
    exps = (2.0, 2.0 - delta, 0.0)
    fit = fit_power_series(zip(rs, ys), exps, weights="uniform")
    return fit.coefficient(2.0), fit.uncertainty(2.0), fit


def _ladder_values(reports, quantity):
    rs, ys = [], []
    for rep in reports:
        if quantity == "volume_deficit":
            val = None if rep.V is None or rep.V0 is None else rep.V0 - rep.V
        else:
            val = getattr(rep, quantity)
        if val is None:
            raise ValueError(f"report at r={rep.r} lacks '{quantity}'")
        rs.append(rep.r)
        ys.append(val)
    return np.array(rs), np.array(ys)


# ---------------------------------------------------------------------- #
# ladder scans

def small_sphere_scan(entry, center, radii, grid=None, embed_opts=None,
                      volumes=True, n_radial=12, volume_grid=None,
                      ode_tol=1e-10):
    """MassReports for geodesic spheres about ``center`` at all ``radii``.

    Embeddings start from the curvature-corrected guess; volumes use a
    coarser angular grid (the area integrand is low order) unless one is
    supplied.  Returns (reports, curvature at center).
    """
    grid = grid or SphereGrid.build(24, 48)
    metric = entry.metric
    curv = curvature_at(metric, center)
    opts = embed_opts or EmbeddingOptions(degree=12, tol=1e-11,
                                          guess="curvature", curvature=curv)
    if opts.guess == "curvature" and opts.curvature is None:
        opts.curvature = curv
    spheres = geodesic_sphere_family(metric, center, radii, grid,
                                     ode_tol=ode_tol)
    if volumes:
        vgrid = volume_grid or SphereGrid.build(12, 24)
        vols = ball_volume_family(metric, center, radii, vgrid,
                                  n_radial=n_radial, ode_tol=ode_tol)
    else:
        vols = [None] * len(spheres)

    def one(args):
        sphere, vol = args
        es = solve_embedding(sphere, opts)
        return build_mass_report(sphere, es=es, ball_volume=vol)

    reports = parallel_map(one, zip(spheres, vols))
    return reports, curv


def large_sphere_scan(entry, radii, grid=None, embed_opts=None,
                      volumes=False, n_radial=48):
    """MassReports for coordinate spheres of an asymptotically flat entry,
    including the ADM flux integral (and interior volumes when requested)."""
    grid = grid or SphereGrid.build(24, 48)
    metric = entry.metric
    opts = embed_opts or EmbeddingOptions(degree=8, tol=1e-11, guess="round")

    def one(r):
        sphere = coordinate_sphere(metric, r, grid)
        es = solve_embedding(sphere, opts)
        adm = adm_integral(metric, r, grid)
        vol = coordinate_region_volume(metric, r, grid, n_radial=n_radial) \
            if volumes else None
        return build_mass_report(sphere, es=es, adm_partial=adm,
                                 ball_volume=vol)

    return parallel_map(one, list(radii))


# ---------------------------------------------------------------------- #
# theory-vs-fit comparison

DEFAULT_TOLERANCES = {
    "c3_by": 0.02, "c5_by": 0.05, "c3_h": 0.02, "c5_h": 0.05,
    "a4": 0.01, "a6": 0.05, "v5": 0.02, "v7": 0.10,
}
#: absolute fallback when the theoretical coefficient vanishes
ZERO_THEORY_ATOL = 1e-6

MASS_EXPONENTS = (3, 5, 7)
AREA_EXPONENTS = (4, 6, 8)
VOLUME_EXPONENTS = (5, 7, 9)


@dataclass
class TheoremRow:
    name: str
    theory: float
    fitted: float
    uncertainty: float
    rel_dev: float
    passed: bool


@dataclass
class TheoremReport:
    rows: list
    theory: TheoryCoefficients
    fits: dict
    ladder: np.ndarray
    scalar_flat: bool = False
    c5_by_positive: Optional[bool] = None
    hawking_suppressed: Optional[bool] = None
    extras: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(row.passed for row in self.rows)

    def row(self, name):
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_text(self):
        lines = ["quantity      theory         fitted        uncertainty   rel_dev    pass"]
        for r in self.rows:
            lines.append(f"{r.name:<12}  {r.theory: .6e}  {r.fitted: .6e}  "
                         f"{r.uncertainty:.3e}     {r.rel_dev:.3e}  {'yes' if r.passed else 'NO'}")
        if self.scalar_flat:
            lines.append(f"scalar-flat point: fitted c5_by > 0: "
                         f"{'yes' if self.c5_by_positive else 'NO'}; "
                         f"|c5_h| <= 0.1 c5_by: "
                         f"{'yes' if self.hawking_suppressed else 'NO'}")
        return "\n".join(lines)


def _compare(name, theory, fit, exponent, tolerances):
    fitted = fit.coefficient(exponent)
    unc = fit.uncertainty(exponent)
    tol = tolerances[name]
    if abs(theory) > 1e-12:
        rel = abs(fitted - theory) / abs(theory)
        passed = rel <= tol
    else:
        rel = abs(fitted)
        passed = rel <= ZERO_THEORY_ATOL
    return TheoremRow(name=name, theory=theory, fitted=fitted,
                      uncertainty=unc, rel_dev=rel, passed=passed)


def theorem_report(entry, center, radii, grid=None, embed_opts=None,
                   tolerances=None, reports=None, curv=None, **scan_kwargs):
    """Side-by-side table of theoretical versus fitted expansion
    coefficients for geodesic spheres about ``center``.

    A precomputed (reports, curv) pair from small_sphere_scan can be passed
    to reuse ladder data; otherwise the scan runs here.
    """
    tolerances = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    if reports is None or curv is None:
        reports, curv = small_sphere_scan(entry, center, radii, grid=grid,
                                          embed_opts=embed_opts, **scan_kwargs)
    theory = small_sphere_theory(curv)
    rs = np.array([rep.r for rep in reports])
    fits = {
        "m_BY": fit_power_series(((rep.r, rep.m_BY) for rep in reports),
                                 MASS_EXPONENTS),
        "m_H": fit_power_series(((rep.r, rep.m_H) for rep in reports),
                                MASS_EXPONENTS),
        "area": fit_power_series(
            ((rep.r, rep.area - 4 * math.pi * rep.r ** 2) for rep in reports),
            AREA_EXPONENTS),
    }
    rows = [
        _compare("c3_by", theory.c3_by, fits["m_BY"], 3, tolerances),
        _compare("c5_by", theory.c5_by, fits["m_BY"], 5, tolerances),
        _compare("c3_h", theory.c3_h, fits["m_H"], 3, tolerances),
        _compare("c5_h", theory.c5_h, fits["m_H"], 5, tolerances),
        _compare("a4", theory.a4, fits["area"], 4, tolerances),
        _compare("a6", theory.a6, fits["area"], 6, tolerances),
    ]
    if all(rep.V is not None and rep.V0 is not None for rep in reports):
        fits["volume_deficit"] = fit_power_series(
            ((rep.r, rep.V0 - rep.V) for rep in reports), VOLUME_EXPONENTS)
        rows.append(_compare("v5", theory.v5, fits["volume_deficit"], 5,
                             tolerances))
        rows.append(_compare("v7", theory.v7, fits["volume_deficit"], 7,
                             tolerances))
    report = TheoremReport(rows=rows, theory=theory, fits=fits, ladder=rs)
    scale = max(abs(curv.ricci_norm_sq) ** 0.5, 1e-12)
    if abs(curv.scalar) <= 1e-8 * scale and curv.ricci_norm_sq > 1e-12:
        report.scalar_flat = True
        c5b = fits["m_BY"].coefficient(5)
        c5h = fits["m_H"].coefficient(5)
        report.c5_by_positive = bool(c5b > 0)
        report.hawking_suppressed = bool(abs(c5h) <= 0.1 * abs(c5b))
    return report