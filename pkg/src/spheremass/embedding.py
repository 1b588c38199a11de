"""Isometric embedding of positively curved sphere metrics into Euclidean
3-space, and the Euclidean extrinsic data the mass functionals need.

The unknowns are real-spherical-harmonic coefficients of the three Cartesian
components of the embedding map; a damped Gauss-Newton iteration drives the
node-wise first-fundamental-form defect to zero.  Translations are gauge
fixed exactly by excluding the constant harmonic (center of mass at the
origin); the three residual rotational null directions are controlled by a
small Tikhonov term and stay at the orientation of the initial guess.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import EmbeddingConvergenceError, GateError
from .harmonics import HarmonicBasis

__all__ = [
    "EmbeddingOptions",
    "EmbeddedSurface",
    "gauss_curvature_gate",
    "initial_guess",
    "solve_embedding",
    "minkowski_check",
    "enclosed_volume",
    "rigid_align",
]


@dataclass
class EmbeddingOptions:
    degree: int = 12              # spectral degree L of the unknowns
    tol: float = 1e-11            # sup-norm relative metric defect
    max_iter: int = 40
    tikhonov: float = 1e-10       # scaled by trace(J^T W J)/n_cols
    guess: object = "round"       # round | curvature | coordinate | supplied
    guess_positions: Optional[np.ndarray] = None
    curvature: object = None      # CurvatureData at the center, for "curvature"

    def __post_init__(self):
        if self.degree < 2:
            raise ValueError("spectral degree must be at least 2")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")


@dataclass
class EmbeddedSurface:
    """Numerically isometric image of a sphere metric in Euclidean 3-space.

    ``target_area_element`` is the physical measure of the surface that was
    embedded; it agrees with ``euclid_area_element`` exactly when the
    embedding is isometric, which is what the Minkowski check exploits.
    """

    grid: object
    degree: int
    positions: np.ndarray          # (N, 3)
    normal: np.ndarray             # (N, 3) outward unit
    support: np.ndarray            # (N,) X . n
    h0_mean_curvature: np.ndarray  # (N,)
    gauss_curvature: np.ndarray    # (N,)
    euclid_area_element: np.ndarray  # (N,) per unit solid angle
    target_area_element: np.ndarray  # (N,) physical dSigma per solid angle
    coefficients: np.ndarray       # (3, (L+1)^2), constant harmonic zero
    residual: float
    residual_history: list = field(default_factory=list)

    @property
    def area(self):
        """Euclidean area of the embedded image."""
        return float(np.sum(self.grid.weights * self.euclid_area_element))

    @property
    def target_area(self):
        return float(np.sum(self.grid.weights * self.target_area_element))

    def integrate(self, values, measure="euclidean"):
        dens = self.euclid_area_element if measure == "euclidean" \
            else self.target_area_element
        values = np.broadcast_to(np.asarray(values, dtype=float), dens.shape)
        return float(np.sum(self.grid.weights * values * dens))


def gauss_curvature_gate(surface, margin=1e-3):
    """True iff the surface's Gauss curvature is positive with a safety
    margin (min K > margin * max K), the well-definedness condition for the
    Euclidean reference embedding."""
    k = surface.gauss_curvature
    return bool(k.min() > margin * k.max())


def initial_guess(surface, selector="round", curvature=None):
    """Candidate embedding positions on the surface's grid.

    Selectors: ``round`` places a round sphere of the same area;
    ``curvature`` adds the leading curvature correction for small geodesic
    spheres (needs the center's CurvatureData); ``coordinate`` uses the
    coordinate radius for large nearly round spheres.
    """
    d = surface.grid.directions
    if isinstance(selector, np.ndarray):
        return np.asarray(selector, dtype=float)
    if selector == "supplied":
        raise ValueError("pass the supplied positions array itself as selector")
    if selector == "round":
        rho = np.sqrt(surface.area / (4 * np.pi))
        return rho * d
    if selector == "coordinate":
        if surface.kind != "coordinate":
            raise ValueError("'coordinate' guess needs a coordinate sphere")
        return surface.radius * d
    if selector == "curvature":
        if curvature is None:
            raise ValueError("'curvature' guess needs CurvatureData at the center")
        if surface.kind != "geodesic":
            raise ValueError("'curvature' guess needs a geodesic sphere")
        r = surface.radius
        ric = curvature.ricci
        scal = curvature.scalar
        q = np.einsum("ij,ni,nj->n", ric, d, d)
        return (r * (1.0 + (r * r / 6.0) * (0.5 * scal - q)))[:, None] * d \
            - (r ** 3 / 6.0) * (d @ ric.T)
    raise ValueError(f"unknown initial-guess selector '{selector}'")


def _first_fundamental(xt, xp):
    e = np.einsum("ni,ni->n", xt, xt)
    f = np.einsum("ni,ni->n", xt, xp)
    g = np.einsum("ni,ni->n", xp, xp)
    return e, f, g


def solve_embedding(surface, opts=None):
    """Solve the isometric-embedding least-squares problem for ``surface``.

    Raises GateError when the Gauss-curvature gate fails and
    EmbeddingConvergenceError (with the residual history) when the damped
    Gauss-Newton iteration cannot reach the tolerance.
    """
    opts = opts or EmbeddingOptions()
    if not gauss_curvature_gate(surface):
        raise GateError("surface fails the positive-Gauss-curvature gate; "
                        "no Euclidean reference embedding is attempted")
    grid = surface.grid
    basis = HarmonicBasis(opts.degree, grid.theta, grid.phi)
    nb = basis.n_basis
    yt, yp = basis.yt[1:], basis.yp[1:]    # translation gauge: drop constant
    y = basis.y[1:]
    ncols = 3 * (nb - 1)

    h = surface.induced_metric
    e0, f0, g0 = h[:, 0, 0], h[:, 0, 1], h[:, 1, 1]
    st = grid.sin_theta
    # per-component scales make the defect dimensionless and balanced
    se = np.maximum(e0, 1e-300)
    sg = np.maximum(g0, 1e-300)
    sf = np.sqrt(se * sg)
    wrow = np.sqrt(grid.weights)

    if opts.guess == "supplied":
        x0 = np.asarray(opts.guess_positions, dtype=float)
    elif isinstance(opts.guess, np.ndarray):
        x0 = np.asarray(opts.guess, dtype=float)
    else:
        x0 = initial_guess(surface, opts.guess, curvature=opts.curvature)
    # project the guess onto the (mean-free) basis by quadrature
    coeff = (y * grid.weights) @ x0        # (nb-1, 3)

    def assemble(coeff):
        xt = (coeff.T @ yt).T              # (N, 3)
        xp = (coeff.T @ yp).T
        e, f, g = _first_fundamental(xt, xp)
        de = (e - e0) / se
        df = (f - f0) / sf
        dg = (g - g0) / sg
        defect = float(max(np.abs(de).max(), np.abs(df).max(), np.abs(dg).max()))
        res = np.concatenate([wrow * de, wrow * df, wrow * dg])
        return xt, xp, res, defect

    def jacobian(xt, xp):
        j = np.empty((3 * grid.n_nodes, ncols))
        n = grid.n_nodes
        for c in range(3):
            cols = slice(c * (nb - 1), (c + 1) * (nb - 1))
            j[0:n, cols] = (2.0 * xt[:, c] * wrow / se)[:, None] * yt.T
            j[n:2 * n, cols] = (xt[:, c] * yp + xp[:, c] * yt).T \
                * (wrow / sf)[:, None]
            j[2 * n:, cols] = (2.0 * xp[:, c] * wrow / sg)[:, None] * yp.T
        return j

    coeff = coeff.copy()
    xt, xp, res, defect = assemble(coeff)
    history = [defect]
    it = 0
    while defect > opts.tol:
        if it >= opts.max_iter:
            raise EmbeddingConvergenceError(
                f"no convergence to {opts.tol:g} in {opts.max_iter} iterations "
                f"(last defect {defect:.3e})", residual_history=history)
        j = jacobian(xt, xp)
        jtj = j.T @ j
        lam = opts.tikhonov * np.trace(jtj) / ncols
        jtj[np.diag_indices_from(jtj)] += lam
        step = np.linalg.solve(jtj, -(j.T @ res))
        step = step.reshape(3, nb - 1).T
        # step halving keeps the iteration monotone far from the solution
        scale = 1.0
        for _ in range(8):
            trial = coeff + scale * step
            xt2, xp2, res2, defect2 = assemble(trial)
            if defect2 < defect or scale < 1e-3:
                break
            scale *= 0.5
        coeff = trial
        xt, xp, res, defect = xt2, xp2, res2, defect2
        history.append(defect)
        it += 1

    return _extract_surface(surface, basis, coeff, defect, history, opts)


def _extract_surface(surface, basis, coeff, defect, history, opts):
    grid = surface.grid
    y, yt, yp = basis.y[1:], basis.yt[1:], basis.yp[1:]
    ytt, ytp, ypp = basis.ytt[1:], basis.ytp[1:], basis.ypp[1:]
    x = (coeff.T @ y).T
    xt = (coeff.T @ yt).T
    xp = (coeff.T @ yp).T
    xtt = (coeff.T @ ytt).T
    xtp = (coeff.T @ ytp).T
    xpp = (coeff.T @ ypp).T
    cross = np.cross(xt, xp)
    norm = np.linalg.norm(cross, axis=1)
    nvec = cross / norm[:, None]
    # orient outward: enclosed volume must come out positive
    vol6 = np.sum(grid.weights * np.einsum("ni,ni->n", x, cross) / grid.sin_theta)
    if vol6 < 0:
        nvec = -nvec
    e, f, g = _first_fundamental(xt, xp)
    ll = -np.einsum("ni,ni->n", xtt, nvec)
    mm = -np.einsum("ni,ni->n", xtp, nvec)
    nn = -np.einsum("ni,ni->n", xpp, nvec)
    den = e * g - f * f
    h0 = (e * nn - 2.0 * f * mm + g * ll) / den
    kk = (ll * nn - mm * mm) / den
    full = np.zeros((3, basis.n_basis))
    full[:, 1:] = coeff.T
    return EmbeddedSurface(
        grid=grid, degree=basis.lmax, positions=x, normal=nvec,
        support=np.einsum("ni,ni->n", x, nvec), h0_mean_curvature=h0,
        gauss_curvature=kk, euclid_area_element=np.sqrt(den) / grid.sin_theta,
        target_area_element=surface.area_element.copy(),
        coefficients=full, residual=defect, residual_history=history)


def minkowski_check(es):
    """Relative defects of the two closed-surface integral identities
    int H0 dS = 2 int K (X.n) dS and 2 Area = int H0 (X.n) dS.

    All integrals run against the physical measure of the target surface
    (the identities hold for the embedded image's own measure no matter
    what, so only the physical measure makes this an isometry oracle).
    """
    int_h0 = es.integrate(es.h0_mean_curvature, measure="target")
    int_kxn = es.integrate(es.gauss_curvature * es.support, measure="target")
    area2 = 2.0 * es.target_area
    int_h0xn = es.integrate(es.h0_mean_curvature * es.support, measure="target")
    r1 = abs(int_h0 - 2.0 * int_kxn) / abs(int_h0)
    r2 = abs(area2 - int_h0xn) / area2
    return r1, r2


def enclosed_volume(es):
    """Euclidean volume bounded by the embedded surface, (1/3) int X.n dA."""
    v = es.integrate(es.support) / 3.0
    if v <= 0:
        raise ValueError("non-positive enclosed volume: orientation violated")
    return v


def rigid_align(x, target, weights):
    """Best-fit rotation (weighted, no translation) mapping x onto target."""
    m = (x * weights[:, None]).T @ target
    u, _, vt = np.linalg.svd(m)
    d = np.sign(np.linalg.det(u @ vt))
    rot = (u * np.array([1.0, 1.0, d])) @ vt
    return x @ rot
