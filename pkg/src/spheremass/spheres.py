"""Geodesic and coordinate spheres as sampled surfaces, with areas and
enclosed volumes.

Quadrature: Gauss-Legendre nodes in cos(theta) times a uniform phi grid;
the solid-angle measure lives in the weights, so per-node area elements are
densities with respect to solid angle (Euclidean round sphere of radius r
has area_element = r^2 at every node).  Node sums use numpy's pairwise
summation over a fixed node order, so reductions are bit-stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .curvature import connection_batch, riemann_from_connection, sym_inv3
from .errors import GeometryError, MetricDefinitenessError

__all__ = [
    "SphereGrid",
    "SurfaceGeometry",
    "geodesic_sphere",
    "coordinate_sphere",
    "integrate_scalar",
    "ball_volume",
    "coordinate_region_volume",
]


@dataclass(frozen=True)
class SphereGrid:
    """Product quadrature grid on the unit sphere, poles excluded."""

    n_theta: int
    n_phi: int
    theta: np.ndarray = field(repr=False, default=None)
    phi: np.ndarray = field(repr=False, default=None)
    weights: np.ndarray = field(repr=False, default=None)     # (N,), sums to 4 pi
    directions: np.ndarray = field(repr=False, default=None)  # (N, 3)
    d_theta: np.ndarray = field(repr=False, default=None)     # (N, 3)
    d_phi: np.ndarray = field(repr=False, default=None)       # (N, 3)
    sin_theta: np.ndarray = field(repr=False, default=None)   # (N,)

    @classmethod
    def build(cls, n_theta=24, n_phi=None):
        if n_phi is None:
            n_phi = 2 * n_theta
        if n_theta < 2 or n_phi < 4:
            raise ValueError("grid needs n_theta >= 2 and n_phi >= 4")
        x, w = np.polynomial.legendre.leggauss(n_theta)
        theta = np.arccos(x)
        phi = 2 * np.pi * np.arange(n_phi) / n_phi
        tt = np.repeat(theta, n_phi)
        pp = np.tile(phi, n_theta)
        st, ct = np.sin(tt), np.cos(tt)
        sp, cp = np.sin(pp), np.cos(pp)
        d = np.column_stack([st * cp, st * sp, ct])
        dth = np.column_stack([ct * cp, ct * sp, -st])
        dph = np.column_stack([-st * sp, st * cp, np.zeros_like(st)])
        weights = np.repeat(w, n_phi) * (2 * np.pi / n_phi)
        return cls(n_theta=n_theta, n_phi=n_phi, theta=tt, phi=pp,
                   weights=weights, directions=d, d_theta=dth, d_phi=dph,
                   sin_theta=st)

    @property
    def n_nodes(self):
        return self.n_theta * self.n_phi


@dataclass
class SurfaceGeometry:
    """A sampled topological sphere in the ambient metric.

    Per-node 2x2 tensors are in the (theta, phi) coordinate frame pushed to
    the surface; ``area_element`` and ``euclid_area_element`` are densities
    per unit solid angle (fold with ``grid.weights`` to integrate).
    """

    kind: str                      # "geodesic" | "coordinate"
    grid: SphereGrid
    radius: float
    positions: np.ndarray          # (N, 3) chart points
    induced_metric: np.ndarray     # (N, 2, 2)
    second_fundamental: np.ndarray  # (N, 2, 2)
    mean_curvature: np.ndarray     # (N,)
    gauss_curvature: np.ndarray    # (N,)
    area_element: np.ndarray       # (N,)
    unit_normal: np.ndarray        # (N, 3), contravariant, outward
    euclid_area_element: Optional[np.ndarray] = None  # coordinate spheres only
    center: Optional[np.ndarray] = None
    gauss_lemma_defect: float = 0.0
    ode_steps: int = 0

    @property
    def area(self):
        return float(np.sum(self.grid.weights * self.area_element))

    def integrate(self, values, measure="physical"):
        return integrate_scalar(self, values, measure)


def integrate_scalar(surface, values, measure="physical"):
    """Integral of per-node values against the chosen area measure."""
    if measure == "physical":
        dens = surface.area_element
    elif measure == "euclidean":
        if surface.euclid_area_element is None:
            raise ValueError("Euclidean measure only exists for coordinate "
                             "spheres and embedded surfaces")
        dens = surface.euclid_area_element
    else:
        raise ValueError(f"unknown measure '{measure}'")
    values = np.broadcast_to(np.asarray(values, dtype=float), dens.shape)
    return float(np.sum(surface.grid.weights * values * dens))


# ---------------------------------------------------------------------- #
# geodesic spheres via the exponential map and variational equations

def _hess_times(c6, v):
    """Hessian-vector product from the 6 quadratic jet coefficients; c6 has
    shape (..., 6) over monomials (xx, xy, xz, yy, yz, zz)."""
    vx, vy, vz = v[:, 0], v[:, 1], v[:, 2]
    bx = (Ellipsis,) if c6.ndim == 2 else (slice(None), None, None)
    vx, vy, vz = vx[bx], vy[bx], vz[bx]
    return np.stack([
        2 * c6[..., 0] * vx + c6[..., 1] * vy + c6[..., 2] * vz,
        c6[..., 1] * vx + 2 * c6[..., 3] * vy + c6[..., 4] * vz,
        c6[..., 2] * vx + c6[..., 4] * vy + 2 * c6[..., 5] * vz,
    ], axis=-1)


def _geodesic_rhs(metric, state):
    """Time derivative of (x, v, Jt, Wt, Jp, Wp) stacked as (N, 18).

    Christoffel symbols and their derivatives are contracted with the
    velocity as they are formed (rank-5 tensors never materialize), and all
    3x3-level contractions are fused slice arithmetic; this path skips the
    chart-domain check (the caller checks at the endpoints) but still trips
    on loss of positive definiteness via the determinant.
    """
    x = state[:, 0:3]
    v = state[:, 3:6]
    n = state.shape[0]
    c = metric.jets(x, 2, check=False).coeffs  # (N, 3, 3, 10)
    g = c[..., 0]
    dg = c[..., 1:4]                       # (N, i, j, m) = partial_m g_ij
    c6 = c[..., 4:10]
    ginv, detg = sym_inv3(g)
    if detg.min() <= 0:
        raise MetricDefinitenessError(
            f"metric '{metric.name}' lost positive definiteness along a geodesic")
    dg_l = dg.transpose(0, 3, 1, 2)        # (N, l, i, j)
    dgf = dg.reshape(n, 3, 9)              # rows l -> flatten (j, m) of dg[l, j, m]

    def sumlast(mat, vec):
        return (mat * vec[:, None, :]).sum(-1)

    def contract_lij(t4, a, b):
        """Sum_{i,j} t4[:, l, i, j] a^i b^j."""
        return ((t4 * b[:, None, None, :]).sum(-1) * a[:, None, :]).sum(-1)

    def gamma_bilinear(a, b):
        """Gamma^k_ij a^i b^j = 0.5 g^{kl}(d_i g_lj + d_j g_li - d_l g_ij) a^i b^j."""
        oab = (b[:, :, None] * a[:, None, :] + a[:, :, None] * b[:, None, :]).reshape(n, 9)
        t = sumlast(dgf, oab) - contract_lij(dg_l, a, b)
        return 0.5 * sumlast(ginv, t)

    # m-indexed derivative of Gamma(v, v), contracted early:
    ovv = (v[:, :, None] * v[:, None, :]).reshape(n, 9)
    tvv = 2.0 * sumlast(dgf, ovv) - contract_lij(dg_l, v, v)
    u = sumlast(ginv, tvv)                 # g^{kl} tmp_l(v, v)
    acc = -0.5 * u
    dglu = (dg_l * u[:, None, None, :]).sum(-1)        # (N, m, i)
    dvv1 = -0.5 * ((ginv[:, None] * dglu[:, :, None, :]).sum(-1))  # (N, m, k)
    hv = _hess_times(c6, v)                # (N, i, j, m) = Hess(g_ij) . v
    avv = ((hv * v[:, None, :, None]).sum(2)).transpose(0, 2, 1)   # (N, m, l)
    qc6 = (c6 * ovv.reshape(n, 3, 3)[..., None]).sum((1, 2))
    # Hessian of g_ij v^i v^j from its contracted quadratic coefficients:
    hq = np.empty((n, 3, 3))
    hq[:, 0, 0] = 2 * qc6[:, 0]
    hq[:, 0, 1] = hq[:, 1, 0] = qc6[:, 1]
    hq[:, 0, 2] = hq[:, 2, 0] = qc6[:, 2]
    hq[:, 1, 1] = 2 * qc6[:, 3]
    hq[:, 1, 2] = hq[:, 2, 1] = qc6[:, 4]
    hq[:, 2, 2] = 2 * qc6[:, 5]
    dtvv = 2.0 * avv - hq                  # (N, m, l)
    dvv2 = 0.5 * (ginv[:, None] * dtvv[:, :, None, :]).sum(-1)     # (N, m, k)
    gvvt = (dvv1 + dvv2).transpose(0, 2, 1)  # (N, k, m)

    def jacobi_acc(j, w):
        return -sumlast(gvvt, j) - 2.0 * gamma_bilinear(v, w)

    out = np.empty_like(state)
    out[:, 0:3] = v
    out[:, 3:6] = acc
    out[:, 6:9] = wt = state[:, 9:12]
    out[:, 9:12] = jacobi_acc(state[:, 6:9], wt)
    out[:, 12:15] = wp = state[:, 15:18]
    out[:, 15:18] = jacobi_acc(state[:, 12:15], wp)
    return out, g


def _integrate_geodesics(metric, state0, n_steps):
    """Classical RK4 over t in [0, 1] with fixed step; lane speeds are the
    target radii.  Returns the final state and the worst relative unit-speed
    defect max |g(v,v)/r^2 - 1| seen at step boundaries."""
    h = 1.0 / n_steps
    state = state0.copy()
    r2 = np.einsum("ni,ni->n", state0[:, 3:6], state0[:, 3:6])  # ~ r^2 at center
    defect = 0.0
    for _ in range(n_steps):
        k1, g = _geodesic_rhs(metric, state)
        v = state[:, 3:6]
        speed = np.einsum("nij,ni,nj->n", g, v, v)
        defect = max(defect, float(np.abs(speed / r2 - 1.0).max()))
        k2, _ = _geodesic_rhs(metric, state + 0.5 * h * k1)
        k3, _ = _geodesic_rhs(metric, state + 0.5 * h * k2)
        k4, _ = _geodesic_rhs(metric, state + h * k3)
        state += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return state, defect


def _inverse_sqrt_spd(g):
    """Inverse symmetric square root of one SPD 3x3 matrix."""
    evals, evecs = np.linalg.eigh(g)
    return (evecs / np.sqrt(evals)) @ evecs.T


def geodesic_sphere_family(metric, center, radii, grid, ode_tol=1e-10,
                           initial_steps=32, max_steps=4096):
    """Sample geodesic spheres about one center for a whole list of radii.

    The exponential map is integrated in a rescaled time t in [0, 1] with
    the lane velocity set to radius * (unit direction), so every radius
    shares one vectorized RK4 run; Jacobi fields come out unscaled.  The
    step count is a two-grid Richardson choice targeting ``ode_tol`` error
    per unit arc length.
    """
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    guard = metric.geodesic_r_max
    if guard is not None and max(radii) > guard:
        raise GeometryError(f"radius {max(radii):g} exceeds the guard "
                            f"{guard:g} of '{metric.name}'")
    center = np.asarray(center, dtype=float)
    gp = metric.metric(center)
    L = _inverse_sqrt_spd(gp)
    n = grid.n_nodes
    k = len(radii)
    rcol = np.repeat(radii, n)[:, None]
    state0 = np.zeros((k * n, 18))
    state0[:, 0:3] = center
    state0[:, 3:6] = rcol * np.tile(grid.directions @ L.T, (k, 1))
    state0[:, 9:12] = rcol * np.tile(grid.d_theta @ L.T, (k, 1))
    state0[:, 15:18] = rcol * np.tile(grid.d_phi @ L.T, (k, 1))

    states = {}
    n_steps = initial_steps
    while True:
        for m in (n_steps, 2 * n_steps):
            if m not in states:
                states[m] = _integrate_geodesics(metric, state0, m)
        coarse, fine = states[n_steps][0], states[2 * n_steps][0]
        err = float((np.abs(fine - coarse).max(axis=1) / rcol[:, 0]).max()) / 15.0
        if err <= ode_tol:
            state, defect = states[2 * n_steps]
            n_used = 2 * n_steps
            break
        if 2 * n_steps >= max_steps:
            raise GeometryError(
                f"geodesic integration did not reach tol {ode_tol:g}/unit-arc "
                f"within {max_steps} steps (err {err:.3e})")
        n_steps *= 2

    x = state[:, 0:3]
    v = state[:, 3:6] / rcol           # unit outward normal
    jt, wt = state[:, 6:9], state[:, 9:12] / rcol   # d/dt = r * d/d(arc)
    jp, wp = state[:, 12:15], state[:, 15:18] / rcol
    g, _, gamma, dgamma = connection_batch(metric, x)
    riem = riemann_from_connection(g, gamma, dgamma)
    gflat = gamma.reshape(-1, 3, 9)

    def cov_radial(j):
        vj = (v[:, :, None] * j[:, None, :]).reshape(-1, 9)
        return (gflat @ vj[:, :, None])[..., 0]

    cjt = wt + cov_radial(jt)
    cjp = wp + cov_radial(jp)

    def dot(a, b):
        return np.einsum("nij,ni,nj->n", g, a, b)

    h = np.empty((k * n, 2, 2))
    h[:, 0, 0] = dot(jt, jt)
    h[:, 0, 1] = h[:, 1, 0] = dot(jt, jp)
    h[:, 1, 1] = dot(jp, jp)
    a2 = np.empty_like(h)
    a2[:, 0, 0] = dot(cjt, jt)
    a2[:, 1, 1] = dot(cjp, jp)
    a2[:, 0, 1] = a2[:, 1, 0] = 0.5 * (dot(cjt, jp) + dot(cjp, jt))
    det_h = h[:, 0, 0] * h[:, 1, 1] - h[:, 0, 1] ** 2
    if det_h.min() <= 0:
        bad = radii[int(np.argmax(det_h.reshape(k, n).min(axis=1) <= 0))]
        raise GeometryError(f"degenerate induced metric at r={bad:g} "
                            "(conjugate-point proximity)")
    mean = (h[:, 1, 1] * a2[:, 0, 0] + h[:, 0, 0] * a2[:, 1, 1]
            - 2.0 * h[:, 0, 1] * a2[:, 0, 1]) / det_h
    det_a = a2[:, 0, 0] * a2[:, 1, 1] - a2[:, 0, 1] ** 2
    sect = np.einsum("nijkl,ni,nj,nk,nl->n", riem, jt, jp, jt, jp, optimize=True)
    gauss = (det_a + sect) / det_h
    d_sigma = np.sqrt(det_h) / np.tile(grid.sin_theta, k)

    out = []
    for idx, r in enumerate(radii):
        sl = slice(idx * n, (idx + 1) * n)
        out.append(SurfaceGeometry(
            kind="geodesic", grid=grid, radius=r, positions=x[sl],
            induced_metric=h[sl], second_fundamental=a2[sl],
            mean_curvature=mean[sl], gauss_curvature=gauss[sl],
            area_element=d_sigma[sl], unit_normal=v[sl], center=center,
            gauss_lemma_defect=defect, ode_steps=n_used))
    return out


def geodesic_sphere(metric, center, r, grid, ode_tol=1e-10, initial_steps=32,
                    max_steps=4096):
    """Sample the geodesic sphere of radius ``r`` about ``center``."""
    return geodesic_sphere_family(metric, center, [r], grid, ode_tol=ode_tol,
                                  initial_steps=initial_steps,
                                  max_steps=max_steps)[0]


# ---------------------------------------------------------------------- #
# coordinate spheres in an admissible AF chart

def coordinate_sphere(metric, r, grid):
    """Sample the coordinate sphere |x| = r of an asymptotically flat entry."""
    if metric.af_order is None:
        raise GeometryError("coordinate spheres need an asymptotically flat "
                            "entry (af_order set)")
    if r <= 0:
        raise ValueError("radius must be positive")
    x = r * grid.directions
    g, ginv, gamma, dgamma = connection_batch(metric, x)
    riem = riemann_from_connection(g, gamma, dgamma)
    # unit conormal n_k = x^k / sqrt(Q), Q = g^{ij} x^i x^j
    q = np.einsum("nij,ni,nj->n", ginv, x, x)
    n_lo = x / np.sqrt(q)[:, None]
    n_up = np.einsum("nij,nj->ni", ginv, n_lo)
    # dg^{ij}/dx^l and dQ/dx^l
    dg = np.moveaxis(metric.jets(x, 1).gradient, -1, -3)  # (n, l, i, j)
    dginv = -np.einsum("nia,nlab,nbj->nlij", ginv, dg, ginv)
    dq = np.einsum("nlij,ni,nj->nl", dginv, x, x) + 2 * np.einsum("nlj,nj->nl", ginv, x)
    dn = (np.eye(3)[None, :, :] / np.sqrt(q)[:, None, None]
          - x[:, :, None] * dq[:, None, :] / (2 * q[:, None, None] ** 1.5))  # (n, k, l)
    cov = dn - np.einsum("nmkl,nm->nkl", gamma, n_lo)
    tth = r * grid.d_theta
    tph = r * grid.d_phi

    def pair(f, a, b):
        return np.einsum("nkl,nk,nl->n", f, a, b)

    h = np.empty((grid.n_nodes, 2, 2))
    h[:, 0, 0] = np.einsum("nij,ni,nj->n", g, tth, tth)
    h[:, 0, 1] = h[:, 1, 0] = np.einsum("nij,ni,nj->n", g, tth, tph)
    h[:, 1, 1] = np.einsum("nij,ni,nj->n", g, tph, tph)
    a2 = np.empty_like(h)
    a2[:, 0, 0] = pair(cov, tth, tth)
    a2[:, 1, 1] = pair(cov, tph, tph)
    a2[:, 0, 1] = a2[:, 1, 0] = 0.5 * (pair(cov, tth, tph) + pair(cov, tph, tth))
    det_h = h[:, 0, 0] * h[:, 1, 1] - h[:, 0, 1] ** 2
    if det_h.min() <= 0:
        raise GeometryError(f"degenerate induced metric on coordinate sphere r={r}")
    hinv = np.linalg.inv(h)
    mean = np.einsum("nab,nab->n", hinv, a2)
    det_a = a2[:, 0, 0] * a2[:, 1, 1] - a2[:, 0, 1] ** 2
    sect = np.einsum("nijkl,ni,nj,nk,nl->n", riem, tth, tph, tth, tph)
    gauss = (det_a + sect) / det_h
    return SurfaceGeometry(
        kind="coordinate", grid=grid, radius=float(r), positions=x,
        induced_metric=h, second_fundamental=a2, mean_curvature=mean,
        gauss_curvature=gauss, area_element=np.sqrt(det_h) / grid.sin_theta,
        unit_normal=n_up, euclid_area_element=np.full(grid.n_nodes, r * r),
        center=np.zeros(3))


# ---------------------------------------------------------------------- #
# enclosed volumes

def _gauss_legendre_panel(lo, hi, n):
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return mid + half * x, half * w


def ball_volume(metric, center, r, grid, n_radial=16, ode_tol=1e-10):
    """Volume of the geodesic ball: V(r) = integral of the sphere areas,
    exact because the geodesic radius has unit gradient."""
    return ball_volume_family(metric, center, [r], grid, n_radial=n_radial,
                              ode_tol=ode_tol)[0]


def ball_volume_family(metric, center, radii, grid, n_radial=16, ode_tol=1e-10):
    """Geodesic-ball volumes for an increasing list of radii, accumulated
    over Gauss-Legendre panels between consecutive radii and integrated as
    one batched geodesic family."""
    radii = [float(r) for r in radii]
    if sorted(radii) != radii:
        order = np.argsort(radii)
        back = np.argsort(order)
        vols = ball_volume_family(metric, center, [radii[i] for i in order],
                                  grid, n_radial=n_radial, ode_tol=ode_tol)
        return [vols[i] for i in back]
    edges = [0.0] + radii
    panels = [_gauss_legendre_panel(lo, hi, n_radial)
              for lo, hi in zip(edges[:-1], edges[1:])]
    all_nodes = np.concatenate([p[0] for p in panels])
    spheres = geodesic_sphere_family(metric, center, all_nodes, grid,
                                     ode_tol=ode_tol)
    areas = np.array([s.area for s in spheres])
    vols, acc = [], 0.0
    for idx, (nodes, w) in enumerate(panels):
        acc += float(np.dot(w, areas[idx * n_radial:(idx + 1) * n_radial]))
        vols.append(acc)
    return vols


def coordinate_region_volume(metric, r, grid, n_radial=48):
    """Metric volume of the coordinate ball |x| <= r by radial Gauss-Legendre
    times the angular grid, with panels split at the metric's radial seams."""
    edges = [0.0] + [s for s in metric.radial_seams if 0.0 < s < r] + [float(r)]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        nodes, w = _gauss_legendre_panel(lo, hi, n_radial)
        for t, wt in zip(nodes, w):
            g = metric.metric(t * grid.directions)
            dens = np.sqrt(np.linalg.det(g))
            total += wt * t * t * float(np.sum(grid.weights * dens))
    return float(total)
