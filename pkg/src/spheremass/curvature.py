"""Metric fields and the jet-based curvature pipeline.

Sign convention, fixed once and anchored by tests: the Riemann tensor is
arranged so that R_ijij is the (unnormalized) sectional curvature and
Ric_jl = g^ik R_ijkl.  On the unit round 3-sphere this gives R_1212 = +1,
Ric = 2g and scalar curvature R = 6.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ChartDomainError, MetricDefinitenessError
from .jets import _MULT, Jet, NTERMS, coordinate_jets, jet_diff

__all__ = [
    "MetricField",
    "CurvatureData",
    "jet_eval",
    "curvature_at",
    "riemann_from_ricci",
    "second_bianchi_residual",
    "connection_batch",
    "riemann_batch",
    "symmetric3_eigenvalues",
]


# ---------------------------------------------------------------------- #
# metric fields

@dataclass
class MetricField:
    """A chart-defined smooth 3-metric with jet evaluation.

    ``components(x, y, z)`` returns the 3x3 (nested-sequence) matrix of
    metric components; it must be written in terms of +, -, *, /, ** and the
    analytic helpers in :mod:`spheremass.jets` so the same code evaluates on
    plain arrays and on jets.
    """

    name: str
    components: Optional[Callable] = None
    jet_builder: Optional[Callable] = None
    chart_contains: Optional[Callable] = None
    chart_description: str = "all of R^3"
    af_order: Optional[float] = None
    geodesic_r_max: Optional[float] = None
    radial_seams: tuple = ()
    params: dict = field(default_factory=dict)

    def check_domain(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.chart_contains is not None:
            inside = np.asarray(self.chart_contains(points))
            if not np.all(inside):
                bad = points[~inside][0]
                raise ChartDomainError(
                    f"point {bad} outside chart of '{self.name}' ({self.chart_description})")

    def metric(self, points):
        """Metric values g_ij at ``points`` of shape (..., 3); checks the
        chart domain and positive definiteness."""
        points = np.asarray(points, dtype=float)
        batch = points.shape[:-1]
        flat = points.reshape(-1, 3)
        self.check_domain(flat)
        if self.components is not None:
            x, y, z = flat[:, 0], flat[:, 1], flat[:, 2]
            g = _assemble_matrix(self.components(x, y, z), flat.shape[:-1])
        else:
            g = self.jet_builder(flat, 0).value
        _check_positive_definite(g, self.name)
        return g.reshape(batch + (3, 3))

    def jets(self, points, order, check=True):
        """Per-component jets of g_ij at ``points``, as a single Jet with
        batch shape (..., 3, 3)."""
        points = np.asarray(points, dtype=float)
        batch = points.shape[:-1]
        flat = points.reshape(-1, 3)
        if check:
            self.check_domain(flat)
        n = NTERMS[order]
        coeffs = None
        if self.jet_builder is not None:
            jet = self.jet_builder(flat, order)
            if jet is not None:
                coeffs = jet.coeffs
        if coeffs is None:
            X, Y, Z = coordinate_jets(flat, order)
            rows = self.components(X, Y, Z)
            coeffs = np.zeros((flat.shape[0], 3, 3, n))
            for i in range(3):
                for j in range(3):
                    entry = rows[i][j]
                    if isinstance(entry, Jet):
                        coeffs[:, i, j, :] = entry.truncated(order).coeffs
                    else:
                        coeffs[:, i, j, 0] = entry
        if check:
            _check_positive_definite(coeffs[..., 0], self.name)
        return Jet(coeffs.reshape(batch + (3, 3, n)), order)


def sym_inv3(g):
    """Inverse and determinant of symmetric 3x3 matrices via the adjugate;
    much faster than LAPACK for large thin batches."""
    a, b, c = g[..., 0, 0], g[..., 0, 1], g[..., 0, 2]
    d, e, f = g[..., 1, 1], g[..., 1, 2], g[..., 2, 2]
    ca = d * f - e * e
    cb = c * e - b * f
    cc = b * e - c * d
    det = a * ca + b * cb + c * cc
    inv = np.empty_like(g)
    inv[..., 0, 0] = ca
    inv[..., 0, 1] = inv[..., 1, 0] = cb
    inv[..., 0, 2] = inv[..., 2, 0] = cc
    inv[..., 1, 1] = a * f - c * c
    inv[..., 1, 2] = inv[..., 2, 1] = b * c - a * e
    inv[..., 2, 2] = a * d - b * b
    inv /= det[..., None, None]
    return inv, det


def _assemble_matrix(rows, batch):
    g = np.zeros(batch + (3, 3))
    for i in range(3):
        for j in range(3):
            g[..., i, j] = rows[i][j]
    return g


def _check_positive_definite(g, name):
    # Sylvester leading minors; cheap enough for every evaluation.
    m1 = g[..., 0, 0]
    m2 = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    m3 = np.linalg.det(g)
    ok = (m1 > 0) & (m2 > 0) & (m3 > 0)
    if not np.all(ok):
        raise MetricDefinitenessError(f"metric '{name}' is not positive definite "
                                      f"at {np.count_nonzero(~ok)} queried point(s)")


def jet_eval(metric, x, order=4):
    """Taylor jets of the metric components at ``x`` up to ``order`` <= 4."""
    if not 0 <= order <= 4:
        raise ValueError("jet order must be in 0..4")
    return metric.jets(x, order)


# ---------------------------------------------------------------------- #
# jet tensor helpers: coefficient arrays with tensor axes in front of the
# coefficient axis; ``order`` names the truncation of the product.

def _jet_einsum(spec, a, b, order):
    ins, out = spec.split("->")
    sa, sb = ins.split(",")
    n = NTERMS[order]
    return np.einsum(f"...{sa}t,...{sb}u,tuv->...{out}v",
                     a[..., :n], b[..., :n], _MULT[order], optimize=True)


def _diff_stack(coeffs, order, tensor_axes):
    """Stack of partial derivatives along a new axis in front of the
    ``tensor_axes`` trailing tensor axes (the coefficient axis stays last)."""
    out = [jet_diff(Jet(coeffs, order), v).coeffs for v in range(3)]
    return np.stack(out, axis=-(tensor_axes + 2))


def _jet_matrix_inverse(gc, order):
    """Inverse of a batch of symmetric 3x3 jet matrices via adjugate/det."""
    G = [[Jet(gc[..., i, j, :], order) for j in range(3)] for i in range(3)]
    cof = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            i1, i2 = [a for a in range(3) if a != i]
            j1, j2 = [b for b in range(3) if b != j]
            minor = G[i1][j1] * G[i2][j2] - G[i1][j2] * G[i2][j1]
            cof[i][j] = minor if (i + j) % 2 == 0 else -minor
    det = G[0][0] * cof[0][0] + G[0][1] * cof[0][1] + G[0][2] * cof[0][2]
    inv_det = 1.0 / det
    out = np.empty_like(gc)
    for i in range(3):
        for j in range(3):
            out[..., i, j, :] = (cof[j][i] * inv_det).coeffs  # adjugate = cof^T
    return out


def _curvature_jets(gc, order):
    """Run metric jets of ``order`` through the curvature pipeline.

    Returns a dict of coefficient arrays: ginv (order), Gamma (order-1),
    Riemann/Ricci/scalar (order-2), with tensor axes leading.
    """
    ginv = _jet_matrix_inverse(gc, order)
    dg = _diff_stack(gc, order, tensor_axes=2)        # (m,i,j) order-1
    tmp = (np.swapaxes(dg, -4, -3)                    # dg[i,l,j] arranged as (l,i,j)
           + np.moveaxis(dg, -4, -2)                  # dg[j,l,i] arranged as (l,i,j)
           - dg)
    o1 = order - 1
    gamma = 0.5 * _jet_einsum("kl,lij->kij", ginv, tmp, o1)
    dgamma = _diff_stack(gamma, o1, tensor_axes=3)    # (m,k,i,j) order-2
    o2 = order - 2
    gg = _jet_einsum("eaf,fbc->eabc", gamma, gamma, o2)
    u = (np.moveaxis(dgamma, -5, -4)                  # dGamma[a,e,b,c] -> (e,a,b,c)
         - np.moveaxis(dgamma, -5, -3)                # dGamma[b,e,a,c] -> (e,a,b,c)
         + gg - np.swapaxes(gg, -4, -3))
    t = _jet_einsum("de,eabc->abcd", gc, u, o2)
    riem = np.swapaxes(t, -3, -2)                     # R_abcd = T_abdc
    ric = _jet_einsum("ik,ijkl->jl", ginv, riem, o2)
    scal = _jet_einsum("jl,jl->", ginv, ric, o2)
    return {"ginv": ginv, "gamma": gamma, "riemann": riem,
            "ricci": ric, "scalar": scal}


# ---------------------------------------------------------------------- #
# pointwise curvature data

@dataclass
class CurvatureData:
    """Pointwise curvature package; arrays carry any batch shape in front."""

    metric: np.ndarray            # g_ij
    metric_inverse: np.ndarray    # g^ij
    christoffel: np.ndarray       # Gamma^k_ij, axes (k, i, j)
    riemann: np.ndarray           # R_ijkl, lowered
    ricci: np.ndarray             # R_ij
    ricci_eigenvalues: np.ndarray  # sorted descending, eigenvalues w.r.t. g
    scalar: np.ndarray            # R
    ricci_norm_sq: np.ndarray     # |Ric|^2
    grad_scalar: np.ndarray       # partial_j R (covector)
    laplacian_scalar: np.ndarray  # Delta R

    @property
    def grad_scalar_norm(self):
        return np.sqrt(np.einsum("...ij,...i,...j->...",
                                 self.metric_inverse, self.grad_scalar, self.grad_scalar))


def curvature_at(metric, x):
    """Full curvature data at chart point(s) ``x`` from order-4 jets."""
    gj = jet_eval(metric, x, 4)
    pipe = _curvature_jets(gj.coeffs, 4)
    g = gj.value
    ginv = pipe["ginv"][..., 0]
    gamma = pipe["gamma"][..., 0]
    riem = pipe["riemann"][..., 0]
    ric = pipe["ricci"][..., 0]
    scal_jet = Jet(pipe["scalar"], 2)
    scal = scal_jet.value
    grad = scal_jet.gradient
    hess = scal_jet.hessian
    lap = np.einsum("...kl,...kl->...", ginv, hess) \
        - np.einsum("...kl,...mkl,...m->...", ginv, gamma, grad)
    ric_norm = np.einsum("...ik,...jl,...ij,...kl->...", ginv, ginv, ric, ric)
    eigs = symmetric3_eigenvalues(ric, g)
    return CurvatureData(metric=g, metric_inverse=ginv, christoffel=gamma,
                         riemann=riem, ricci=ric, ricci_eigenvalues=eigs,
                         scalar=scal, ricci_norm_sq=ric_norm,
                         grad_scalar=grad, laplacian_scalar=lap)


def riemann_from_ricci(g, ric, scalar):
    """Rebuild the 3D Riemann tensor from metric, Ricci and scalar curvature:
    R_ijkl = g_ik R_jl - g_il R_jk - g_jk R_il + g_jl R_ik
             - R/2 (g_ik g_jl - g_il g_jk)."""
    g = np.asarray(g, dtype=float)
    ric = np.asarray(ric, dtype=float)
    scalar = np.asarray(scalar, dtype=float)
    t = np.einsum("...ik,...jl->...ijkl", g, ric) \
        - np.einsum("...il,...jk->...ijkl", g, ric) \
        - np.einsum("...jk,...il->...ijkl", g, ric) \
        + np.einsum("...jl,...ik->...ijkl", g, ric)
    gg = np.einsum("...ik,...jl->...ijkl", g, g) - np.einsum("...il,...jk->...ijkl", g, g)
    return t - 0.5 * scalar[..., None, None, None, None] * gg


def second_bianchi_residual(metric, x):
    """Residual covector of the contracted second Bianchi identity,
    g^ik R_ij;k - (1/2) partial_j R, evaluated from jets at ``x``."""
    gj = jet_eval(metric, x, 4)
    pipe = _curvature_jets(gj.coeffs, 4)
    ginv = pipe["ginv"][..., 0]
    gamma = pipe["gamma"][..., 0]
    ric_jet = Jet(pipe["ricci"], 2)
    ric = ric_jet.value
    dric = ric_jet.gradient                  # (..., i, j, m) -> partial_m R_ij
    dric = np.moveaxis(dric, -1, -3)         # (m, i, j)
    cov = dric \
        - np.einsum("...lki,...lj->...kij", gamma, ric) \
        - np.einsum("...lkj,...il->...kij", gamma, ric)
    div = np.einsum("...ik,...kij->...j", ginv, cov)
    grad = Jet(pipe["scalar"], 2).gradient
    return div - 0.5 * grad


# ---------------------------------------------------------------------- #
# batched value-level helpers for the surface samplers

def connection_batch(metric, points):
    """Values of (g, g^-1, Gamma, dGamma) at ``points`` from order-2 jets.

    Shapes: g (...,3,3), Gamma (...,3,3,3) as Gamma^k_ij, dGamma (...,3,3,3,3)
    as partial_m Gamma^k_ij with m leading.
    """
    gj = metric.jets(points, 2)
    g = gj.value
    dg = np.moveaxis(gj.gradient, -1, -3)    # (m, i, j)
    ddg = gj.hessian                          # (..., i, j, m, n)
    ddg = np.moveaxis(ddg, (-2, -1), (-4, -3))  # (m, n, i, j)
    ginv = np.linalg.inv(g)
    tmp = (np.swapaxes(dg, -3, -2)
           + np.moveaxis(dg, -3, -1)
           - dg)                              # tmp[l,i,j] = dg[i,l,j]+dg[j,l,i]-dg[l,i,j]
    batch = g.shape[:-2]
    flat3 = batch + (3, 9)
    gamma = (0.5 * (ginv @ tmp.reshape(flat3))).reshape(batch + (3, 3, 3))
    dginv = -(ginv[..., None, :, :] @ dg @ ginv[..., None, :, :])
    dtmp = (np.swapaxes(ddg, -3, -2)
            + np.moveaxis(ddg, -3, -1)
            - ddg)                            # same rearrangement on the (n,i,j) axes
    dgamma = 0.5 * (dginv @ tmp.reshape(flat3)[..., None, :, :]
                    + ginv[..., None, :, :] @ dtmp.reshape(batch + (3, 3, 9)))
    dgamma = dgamma.reshape(batch + (3, 3, 3, 3))
    return g, ginv, gamma, dgamma


def riemann_from_connection(g, gamma, dgamma):
    """Lowered Riemann values from connection values (see connection_batch)."""
    gg = np.einsum("...eaf,...fbc->...eabc", gamma, gamma)
    u = (np.moveaxis(dgamma, -4, -3)          # dGamma[a,e,b,c] -> (e,a,b,c)
         - np.moveaxis(dgamma, -4, -2)
         + gg - np.swapaxes(gg, -3, -2))
    t = np.einsum("...de,...eabc->...abcd", g, u)
    return np.swapaxes(t, -2, -1)


def riemann_batch(metric, points):
    """Values of the lowered Riemann tensor (paper arrangement) at ``points``."""
    g, ginv, gamma, dgamma = connection_batch(metric, points)
    return riemann_from_connection(g, gamma, dgamma)


# ---------------------------------------------------------------------- #
# closed-form symmetric eigenvalues

def symmetric3_eigenvalues(a, g=None):
    """Eigenvalues of a symmetric 3x3 matrix (w.r.t. metric ``g`` when given),
    via the trigonometric closed form; sorted descending.  Batched."""
    a = np.asarray(a, dtype=float)
    if g is not None:
        L = np.linalg.cholesky(np.asarray(g, dtype=float))
        Linv = np.linalg.inv(L)
        a = np.einsum("...ik,...kl,...jl->...ij", Linv, a, Linv)
    p1 = a[..., 0, 1] ** 2 + a[..., 0, 2] ** 2 + a[..., 1, 2] ** 2
    q = np.trace(a, axis1=-2, axis2=-1) / 3.0
    d = a - q[..., None, None] * np.eye(3)
    p2 = np.einsum("...ij,...ij->...", d, d)
    p = np.sqrt(np.maximum(p2 / 6.0, 0.0))
    safe_p = np.where(p > 0, p, 1.0)
    b = d / safe_p[..., None, None]
    r = np.clip(np.linalg.det(b) / 2.0, -1.0, 1.0)
    phi = np.arccos(r) / 3.0
    e1 = q + 2.0 * p * np.cos(phi)
    e3 = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    e2 = 3.0 * q - e1 - e3
    eigs = np.stack([e1, e2, e3], axis=-1)
    diag_sorted = np.sort(np.stack([a[..., 0, 0], a[..., 1, 1], a[..., 2, 2]], axis=-1),
                          axis=-1)[..., ::-1]
    return np.where((p1 == 0)[..., None], diag_sorted, eigs)
