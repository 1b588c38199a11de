"""Built-in metrics with closed-form reference data.

Every entry carries a :class:`KnownData` record of whatever closed forms
exist for it (masses, areas, volumes for a designated sphere family); the
acceptance suite re-derives all of them from the numerics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import jets
from .curvature import MetricField, curvature_at, riemann_from_ricci
from .errors import MetricDefinitenessError
from .jets import Jet

__all__ = [
    "CatalogEntry",
    "KnownData",
    "make_euclidean",
    "make_space_form",
    "make_schwarzschild_isotropic",
    "make_capped_schwarzschild",
    "make_af_perturbation",
    "make_normal_form",
    "make_anisotropic_normal_form",
    "make_scalar_flat_normal_form",
    "normal_form_coeff2_from_ricci",
    "make_entry",
    "ENTRY_FACTORIES",
]


@dataclass
class KnownData:
    """Optional closed-form records for one sphere family of an entry.

    Radius-indexed fields are callables of the family's radius parameter
    (geodesic radius or coordinate radius); ``None`` means no closed form.
    """

    sphere_family: str = "geodesic"
    adm_mass: Optional[float] = None
    mass_by: Optional[Callable] = None
    mass_hawking: Optional[Callable] = None
    area: Optional[Callable] = None
    ball_volume: Optional[Callable] = None
    euclid_volume: Optional[Callable] = None
    mean_curvature: Optional[Callable] = None
    euclid_mean_curvature: Optional[Callable] = None
    gauss_curvature: Optional[Callable] = None
    areal_radius: Optional[Callable] = None
    adm_integral: Optional[Callable] = None
    scalar: Optional[float] = None
    ricci_norm_sq: Optional[float] = None
    laplacian_scalar: Optional[float] = None


@dataclass
class CatalogEntry:
    metric: MetricField
    known: KnownData = field(default_factory=KnownData)
    notes: str = ""

    @property
    def name(self):
        return self.metric.name


# ---------------------------------------------------------------------- #
# helpers shared by the analytic entries

def _radius2(x, y, z):
    return x * x + y * y + z * z


def smoothstep(t):
    """C-infinity monotone step, 0 at t=0 and 1 at t=1 with all derivatives
    flat at both ends; evaluate strictly inside (0, 1)."""
    w = jets.exp(-1.0 / t)
    wc = jets.exp(-1.0 / (1.0 - t))
    return w / (w + wc)


def piecewise_radial(x, y, z, edges, fns):
    """Radial three-branch selection r <= e1 / e1 < r < e2 / r >= e2.

    Branches are evaluated only on their own sub-batch, so branch formulas
    may be singular outside their region.  Works on jets and plain arrays;
    the batch must be one-dimensional (MetricField guarantees this).
    """
    e1, e2 = edges
    is_jet = isinstance(x, Jet)
    r = np.sqrt(_radius2(x.value if is_jet else np.asarray(x, dtype=float),
                         y.value if is_jet else np.asarray(y, dtype=float),
                         z.value if is_jet else np.asarray(z, dtype=float)))
    masks = (r <= e1, (r > e1) & (r < e2), r >= e2)
    out = None
    for mask, fn in zip(masks, fns):
        if not np.any(mask):
            continue
        if is_jet:
            v = fn(x[mask], y[mask], z[mask])
            if not isinstance(v, Jet):
                v = Jet.constant(np.broadcast_to(v, mask.sum()), x.order)
            if out is None:
                out = np.zeros(r.shape + (v.coeffs.shape[-1],))
            out[mask] = v.coeffs
        else:
            if out is None:
                out = np.zeros_like(r)
            out[mask] = fn(x[mask], y[mask], z[mask])
    return Jet(out, x.order) if is_jet else out


def _diag_conformal(u4):
    zero = 0.0
    return [[u4, zero, zero], [zero, u4, zero], [zero, zero, u4]]


def _pd_sample_check(metric, points, name):
    g = metric.metric(points)
    eigs = np.linalg.eigvalsh(g)
    if eigs.min() <= 0:
        raise MetricDefinitenessError(f"'{name}' loses positive definiteness "
                                      f"on the requested domain")


def _ball_probe_points(radius, n=1000, r_min=0.0):
    rng = np.random.default_rng(20240817)
    u = rng.random((n, 3))
    r = r_min + (radius - r_min) * u[:, 0] ** (1 / 3)
    ct = 2 * u[:, 1] - 1
    st = np.sqrt(1 - ct ** 2)
    ph = 2 * np.pi * u[:, 2]
    return np.column_stack([r * st * np.cos(ph), r * st * np.sin(ph), r * ct])


# ---------------------------------------------------------------------- #
# flat baseline

def make_euclidean():
    def builder(points, order):
        n = points.shape[0]
        derivs = [np.broadcast_to(np.eye(3), (n, 3, 3))]
        for k in range(1, order + 1):
            derivs.append(np.zeros((n, 3, 3) + (3,) * k))
        return Jet.from_derivatives(derivs, order)

    metric = MetricField("euclidean", jet_builder=builder)
    known = KnownData(
        sphere_family="geodesic",
        adm_mass=0.0,
        mass_by=lambda r: 0.0 * r,
        mass_hawking=lambda r: 0.0 * r,
        area=lambda r: 4 * np.pi * r ** 2,
        ball_volume=lambda r: 4 * np.pi * r ** 3 / 3,
        euclid_volume=lambda r: 4 * np.pi * r ** 3 / 3,
        mean_curvature=lambda r: 2.0 / r,
        euclid_mean_curvature=lambda r: 2.0 / r,
        gauss_curvature=lambda r: 1.0 / r ** 2,
        areal_radius=lambda r: r,
        adm_integral=lambda r: 0.0 * r,
        scalar=0.0, ricci_norm_sq=0.0, laplacian_scalar=0.0)
    # flat space is legitimately asymptotically flat at any rate; tau = 1
    metric.af_order = 1.0
    return CatalogEntry(metric, known, notes="flat baseline")


# ---------------------------------------------------------------------- #
# round space form of curvature 1/a^2 in normal coordinates

_SERIES_TERMS = 20
#: Taylor coefficients of sin^2(u)/u^2 in u^2
_SINC2 = [(-1) ** j * 2 ** (2 * j + 1) / math.factorial(2 * j + 2)
          for j in range(_SERIES_TERMS)]
_SINC2_FN = jets.series_function(_SINC2)
_KAPPA_FN = jets.series_function([-c for c in _SINC2[1:]])


def _radial_xx_jets(points, order, f_series, k_series, f_scale, k_scale):
    """Order-<=2 jets of g = f(t) delta + k(t) x x with t = f_scale * |x|^2,
    f and k given as series in t and k carrying an extra k_scale factor."""
    x = points
    n = x.shape[0]
    t = f_scale * (x * x).sum(1)
    f = [f_series.deriv(t, m) * f_scale ** m for m in range(order + 1)]
    k = [k_series.deriv(t, m) * k_scale * f_scale ** m for m in range(order + 1)]
    nt = jets.NTERMS[order]
    coeffs = np.empty((n, 3, 3, nt))
    eye = np.eye(3)
    xi = [x[:, i] for i in range(3)]
    if order >= 2:
        f1d, f2d = 2.0 * f[1], 4.0 * f[2]
        k1d, k2d = 2.0 * k[1], 4.0 * k[2]
    for i in range(3):
        for j in range(i, 3):
            cij = coeffs[:, i, j, :]
            xx = xi[i] * xi[j]
            fk0 = f[0] * eye[i, j] + k[0] * xx
            cij[:, 0] = fk0
            if order >= 1:
                base1 = 2.0 * (f[1] * eye[i, j] + k[1] * xx)
                for m in range(3):
                    lin = base1 * xi[m]
                    if eye[i, m]:
                        lin = lin + k[0] * xi[j]
                    if eye[j, m]:
                        lin = lin + k[0] * xi[i]
                    cij[:, 1 + m] = lin
            if order >= 2:
                base2 = f1d * eye[i, j] + k1d * xx
                base4 = f2d * eye[i, j] + k2d * xx
                pos = 4
                for m in range(3):
                    for p in range(m, 3):
                        d2 = base4 * (xi[m] * xi[p])
                        if m == p:
                            d2 = d2 + base2
                        terms = []
                        if i == p:
                            terms.append(xi[m] * xi[j])
                        if j == p:
                            terms.append(xi[m] * xi[i])
                        if i == m:
                            terms.append(xi[p] * xi[j])
                        if j == m:
                            terms.append(xi[p] * xi[i])
                        if terms:
                            acc = terms[0]
                            for tm in terms[1:]:
                                acc = acc + tm
                            d2 = d2 + k1d * acc
                        if i == m and j == p:
                            d2 = d2 + k[0]
                        if j == m and i == p:
                            d2 = d2 + k[0]
                        cij[:, pos] = d2 if m != p else 0.5 * d2
                        pos += 1
            if i != j:
                coeffs[:, j, i, :] = cij
    return Jet(coeffs, order)


def make_space_form(a=1.0, sign=+1):
    """Round metric g = f(r)(delta - rhat rhat) + rhat rhat with
    f = (a sin(r/a)/r)^2, written as entire functions of s = |x|^2 so the
    origin is a regular point of the chart."""
    if a <= 0:
        raise ValueError("space-form radius must be positive")
    if sign != +1:
        raise ValueError("only the positively curved space form is provided")
    a2 = a * a

    def components(x, y, z):
        t = _radius2(x, y, z) * (1.0 / a2)      # (r/a)^2
        f = _SINC2_FN(t)                         # sin^2(r/a)/(r/a)^2
        k = _KAPPA_FN(t) * (1.0 / a2)            # (1 - f)/r^2
        xs = (x, y, z)
        kx = [k * xs[i] for i in range(3)]
        rows = []
        for i in range(3):
            row = []
            for j in range(3):
                e = kx[i] * xs[j] if j >= i else rows[j][i]
                if i == j:
                    e = e + f
                row.append(e)
            rows.append(row)
        return rows

    chart = 0.5 * np.pi * a

    def builder(points, order):
        # closed-form jets for the ODE-hot orders; higher orders fall back
        # to the generic components path
        if order > 2:
            return None
        return _radial_xx_jets(points, order, _SINC2_FN, _KAPPA_FN,
                               1.0 / a2, 1.0 / a2)

    metric = MetricField(
        "space_form", components=components, jet_builder=builder,
        chart_contains=lambda p: np.linalg.norm(p, axis=-1) < chart,
        chart_description=f"|x| < pi*a/2 = {chart:.6g}",
        geodesic_r_max=0.4 * np.pi * a,
        params={"a": a})

    sin, cos = np.sin, np.cos
    known = KnownData(
        sphere_family="geodesic",
        mass_by=lambda r: a * sin(r / a) * (1 - cos(r / a)),
        mass_hawking=lambda r: 0.5 * a * sin(r / a) ** 3,
        area=lambda r: 4 * np.pi * a2 * sin(r / a) ** 2,
        ball_volume=lambda r: 2 * np.pi * a2 * (r - 0.5 * a * sin(2 * r / a)),
        euclid_volume=lambda r: (4 * np.pi / 3) * (a * sin(r / a)) ** 3,
        mean_curvature=lambda r: 2 * cos(r / a) / (a * sin(r / a)),
        euclid_mean_curvature=lambda r: 2.0 / (a * sin(r / a)),
        gauss_curvature=lambda r: 1.0 / (a * sin(r / a)) ** 2,
        areal_radius=lambda r: a * sin(r / a),
        scalar=6.0 / a2, ricci_norm_sq=12.0 / a2 ** 2, laplacian_scalar=0.0)
    return CatalogEntry(metric, known, notes=f"round space form, a={a}")


# ---------------------------------------------------------------------- #
# Schwarzschild time-symmetric slice in isotropic coordinates

def _schwarzschild_known(m):
    def areal(rho):
        return rho * (1 + 0.5 * m / rho) ** 2

    def mass_by(rho):
        rs = areal(rho)
        return rs * (1 - np.sqrt(1 - 2 * m / rs))

    known = KnownData(
        sphere_family="coordinate",
        adm_mass=m,
        areal_radius=areal,
        area=lambda rho: 4 * np.pi * areal(rho) ** 2,
        mass_by=mass_by,
        mass_hawking=lambda rho: m + 0.0 * rho,
        mean_curvature=lambda rho: 2 / areal(rho) * np.sqrt(1 - 2 * m / areal(rho)),
        euclid_mean_curvature=lambda rho: 2.0 / areal(rho),
        gauss_curvature=lambda rho: 1.0 / areal(rho) ** 2,
        euclid_volume=lambda rho: (4 * np.pi / 3) * areal(rho) ** 3,
        adm_integral=lambda rho: m * (1 + 0.5 * m / rho) ** 3,
        scalar=0.0)
    return known


def make_schwarzschild_isotropic(m=1.0):
    if m <= 0:
        raise ValueError("mass must be positive")

    def components(x, y, z):
        r = jets.sqrt(_radius2(x, y, z))
        u = 1.0 + 0.5 * m / r
        return _diag_conformal(u ** 4)

    metric = MetricField(
        "schwarzschild", components=components,
        chart_contains=lambda p: np.linalg.norm(p, axis=-1) >= 0.5 * m,
        chart_description=f"|x| >= m/2 = {0.5 * m:.6g}",
        af_order=1.0,
        params={"m": m})
    return CatalogEntry(metric, _schwarzschild_known(m),
                        notes=f"scalar-flat, m={m}")


def make_capped_schwarzschild(m=1.0, cap_radius=10.0):
    """Schwarzschild outside ``cap_radius``, conformal factor smoothly
    frozen to a constant inside ``cap_radius/2``; interior volume finite."""
    if m <= 0:
        raise ValueError("mass must be positive")
    if cap_radius <= 2 * m:
        raise ValueError("cap radius must exceed 2m")
    r0 = cap_radius
    c = 1.0 + m / r0  # matches 1 + m/(2 rho) at rho = r0/2

    def conformal(x, y, z):
        def outer(x, y, z):
            return 1.0 + 0.5 * m / jets.sqrt(_radius2(x, y, z))

        def mid(x, y, z):
            r = jets.sqrt(_radius2(x, y, z))
            f = 1.0 + 0.5 * m / r
            t = (r - 0.5 * r0) / (0.5 * r0)
            return c + (f - c) * smoothstep(t)

        def inner(x, y, z):
            return c

        return piecewise_radial(x, y, z, (0.5 * r0, r0), (inner, mid, outer))

    def components(x, y, z):
        return _diag_conformal(conformal(x, y, z) ** 4)

    metric = MetricField(
        "capped_schwarzschild", components=components,
        af_order=1.0,
        radial_seams=(0.5 * r0, r0),
        params={"m": m, "cap_radius": cap_radius})
    entry = CatalogEntry(metric, _schwarzschild_known(m),
                         notes=f"m={m}, cap at {cap_radius}; closed forms valid for rho >= cap")
    entry.conformal_factor = conformal
    return entry


# ---------------------------------------------------------------------- #
# asymptotically flat perturbations of prescribed decay order

#: real solid harmonics of degree l as homogeneous polynomials, keyed (l, m)
_SOLID_HARMONICS = {
    (1, -1): lambda x, y, z: y,
    (1, 0): lambda x, y, z: z,
    (1, 1): lambda x, y, z: x,
    (2, -2): lambda x, y, z: 2.0 * x * y,
    (2, -1): lambda x, y, z: 2.0 * y * z,
    (2, 0): lambda x, y, z: 2.0 * z * z - x * x - y * y,
    (2, 1): lambda x, y, z: 2.0 * x * z,
    (2, 2): lambda x, y, z: x * x - y * y,
}


def make_af_perturbation(m=1.0, tau=1.0, seeds=(), cap_radius=1.0):
    """g = (1 + 2m r^-tau chi + multipoles) delta with decay order tau.

    ``seeds`` is a sequence of (l, m, amplitude) with l in {1, 2}; each adds
    amplitude * Y_lm(direction) * r^-(tau+1) * chi to the conformal factor,
    one power of r faster-decaying than the monopole.  The smooth cap chi
    vanishes inside cap_radius/2.
    """
    if not 0.5 < tau <= 1.0:
        raise ValueError(f"decay order must satisfy 1 >= tau > 1/2, got {tau}")
    seeds = tuple((int(l), int(mm), float(a)) for l, mm, a in seeds)
    for l, mm, _ in seeds:
        if (l, mm) not in _SOLID_HARMONICS:
            raise ValueError(f"unsupported multipole (l={l}, m={mm})")
    r0 = cap_radius

    def sigma_scalar(x, y, z):
        """The conformal perturbation phi with g = (1 + phi) delta."""
        def outer(x, y, z):
            s = _radius2(x, y, z)
            phi = 2.0 * m * jets.powf(s, -0.5 * tau)
            for l, mm, amp in seeds:
                poly = _SOLID_HARMONICS[(l, mm)](x, y, z)
                phi = phi + amp * poly * jets.powf(s, -0.5 * (l + tau + 1))
            return phi

        def mid(x, y, z):
            r = jets.sqrt(_radius2(x, y, z))
            t = (r - 0.5 * r0) / (0.5 * r0)
            return outer(x, y, z) * smoothstep(t)

        def inner(x, y, z):
            return 0.0

        return piecewise_radial(x, y, z, (0.5 * r0, r0), (inner, mid, outer))

    def components(x, y, z):
        return _diag_conformal(1.0 + sigma_scalar(x, y, z))

    metric = MetricField(
        "af_perturbation", components=components,
        af_order=tau,
        radial_seams=(0.5 * r0, r0),
        params={"m": m, "tau": tau, "seeds": seeds, "cap_radius": cap_radius})
    _pd_sample_check(metric, _ball_probe_points(50 * r0, r_min=1e-3), "af_perturbation")

    known = KnownData(sphere_family="coordinate")
    if tau == 1.0:
        # (g_ij,i - g_ii,j) nu^j = -2 d phi/dr; the monopole gives exactly m,
        # the multipoles integrate to zero by angular orthogonality.
        known.adm_mass = m
        known.adm_integral = lambda r: m + 0.0 * np.asarray(r, dtype=float)
    else:
        # leading-term flux integral at finite r (divergent as r -> infinity)
        known.adm_integral = lambda r: m * tau * np.asarray(r, dtype=float) ** (1 - tau)
    entry = CatalogEntry(metric, known, notes=f"tau={tau}, m={m}, seeds={seeds}")
    entry.sigma_scalar = sigma_scalar
    return entry


# ---------------------------------------------------------------------- #
# normal-form polynomial metrics

def _symmetrize_pair(c, axes):
    return 0.5 * (c + np.swapaxes(c, *axes))


def _check_symmetries(c, pair_axes, mono_axes, label):
    for ax in ([pair_axes] if pair_axes else []):
        if not np.allclose(c, np.swapaxes(c, *ax), atol=1e-12):
            raise ValueError(f"{label} must be symmetric in the metric index pair")
    import itertools
    for ax1, ax2 in itertools.combinations(mono_axes, 2):
        if not np.allclose(c, np.swapaxes(c, ax1, ax2), atol=1e-12):
            raise ValueError(f"{label} must be symmetric in the monomial indices")


def make_normal_form(coeff2=None, coeff3=None, coeff4=None, ball_radius=1.0,
                     name="normal_form"):
    """Polynomial metric delta + c2 xx + c3 xxx + c4 xxxx.

    ``coeff2[i,j,k,l]`` multiplies x^k x^l in g_ij, and so on; tensors must
    be symmetric in (i, j) and in their monomial indices.  Ground truth
    curvature comes from the (exact) jet pipeline, never from the raw
    coefficients.
    """
    c2 = np.zeros((3,) * 4) if coeff2 is None else np.asarray(coeff2, dtype=float)
    c3 = np.zeros((3,) * 5) if coeff3 is None else np.asarray(coeff3, dtype=float)
    c4 = np.zeros((3,) * 6) if coeff4 is None else np.asarray(coeff4, dtype=float)
    _check_symmetries(c2, (0, 1), (2, 3), "coeff2")
    _check_symmetries(c3, (0, 1), (2, 3, 4), "coeff3")
    _check_symmetries(c4, (0, 1), (2, 3, 4, 5), "coeff4")

    # flattened coefficient matrices so jet building is pure matmul
    m2 = c2.reshape(9, 9).T
    m3 = c3.reshape(9, 27).T
    m4 = c4.reshape(9, 81).T
    d2_1 = c2.reshape(27, 3).T
    d3_1, d3_2 = c3.reshape(27, 9).T, c3.reshape(81, 3).T
    d4_1, d4_2, d4_3 = c4.reshape(27, 27).T, c4.reshape(81, 9).T, c4.reshape(243, 3).T

    def builder(points, order):
        x = points
        n = points.shape[0]
        xx = (x[:, :, None] * x[:, None, :]).reshape(n, 9)
        xxx = (xx[:, :, None] * x[:, None, :]).reshape(n, 27)
        xxxx = (xx[:, :, None] * xx[:, None, :]).reshape(n, 81)
        g = np.eye(3) + (xx @ m2 + xxx @ m3 + xxxx @ m4).reshape(n, 3, 3)
        derivs = [g]
        if order >= 1:
            derivs.append((2 * (x @ d2_1) + 3 * (xx @ d3_1)
                           + 4 * (xxx @ d4_1)).reshape(n, 3, 3, 3))
        if order >= 2:
            derivs.append(2 * np.broadcast_to(c2, (n,) + c2.shape)
                          + (6 * (x @ d3_2) + 12 * (xx @ d4_2)).reshape(n, 3, 3, 3, 3))
        if order >= 3:
            derivs.append(6 * np.broadcast_to(c3, (n,) + c3.shape)
                          + 24 * (x @ d4_3).reshape((n,) + (3,) * 5))
        if order >= 4:
            derivs.append(np.broadcast_to(24 * c4, (n,) + c4.shape))
        return Jet.from_derivatives(derivs, order)

    metric = MetricField(
        name, jet_builder=builder,
        chart_contains=lambda p: np.linalg.norm(p, axis=-1) <= ball_radius,
        chart_description=f"|x| <= {ball_radius}",
        geodesic_r_max=0.8 * ball_radius,
        params={"ball_radius": ball_radius})
    _pd_sample_check(metric, _ball_probe_points(ball_radius), name)
    return CatalogEntry(metric, KnownData(sphere_family="geodesic"),
                        notes="polynomial normal form")


def normal_form_coeff2_from_ricci(ricci, scalar=None):
    """Quadratic coefficients (1/3) R_iklj (symmetrized in k, l) built from a
    prescribed Ricci tensor at the origin via the 3D reconstruction."""
    ricci = np.asarray(ricci, dtype=float)
    if scalar is None:
        scalar = np.trace(ricci)
    riem = riemann_from_ricci(np.eye(3), ricci, scalar)
    c2 = np.einsum("iklj->ijkl", riem) / 3.0
    return _symmetrize_pair(c2, (2, 3))


def _isotropic_quartic(mu):
    """mu * delta_ij * |x|^4 as a symmetric quartic coefficient tensor."""
    d = np.eye(3)
    s = (np.einsum("kl,mn->klmn", d, d) + np.einsum("km,ln->klmn", d, d)
         + np.einsum("kn,lm->klmn", d, d)) / 3.0
    return mu * np.einsum("ij,klmn->ijklmn", d, s)


def _laplacian_at_origin(c2, c4, ball_radius):
    entry = make_normal_form(c2, None, c4, ball_radius=ball_radius)
    return curvature_at(entry.metric, np.zeros(3)).laplacian_scalar


def make_anisotropic_normal_form(eigs=(3.0, 2.0, 1.0), quartic=-0.02,
                                 ball_radius=0.6):
    """Normal-form metric with prescribed Ricci eigenvalues at the origin and
    a quartic seed making Delta R nonzero there."""
    c2 = normal_form_coeff2_from_ricci(np.diag(eigs))
    c4 = _isotropic_quartic(quartic)
    entry = make_normal_form(c2, None, c4, ball_radius=ball_radius,
                             name="anisotropic")
    entry.notes = f"Ricci eigenvalues {tuple(eigs)} at origin, quartic={quartic}"
    return entry


def make_scalar_flat_normal_form(eigs=(1.0, 1.0, -2.0), ball_radius=0.6):
    """Scalar-flat (R(0) = 0), non-flat normal form with the quartic seed
    solved so that Delta R(0) = 0 as well (Delta R is affine in the seed)."""
    eigs = tuple(float(e) for e in eigs)
    if abs(sum(eigs)) > 1e-13:
        raise ValueError("Ricci eigenvalues must sum to zero for R(0) = 0")
    c2 = normal_form_coeff2_from_ricci(np.diag(eigs), scalar=0.0)
    d0 = _laplacian_at_origin(c2, _isotropic_quartic(0.0), ball_radius)
    d1 = _laplacian_at_origin(c2, _isotropic_quartic(1.0), ball_radius)
    mu = -d0 / (d1 - d0)
    entry = make_normal_form(c2, None, _isotropic_quartic(mu),
                             ball_radius=ball_radius, name="scalar_flat")
    entry.notes = f"Ricci eigenvalues {eigs}, quartic mu={mu:.6g} cancels Delta R(0)"
    return entry


# ---------------------------------------------------------------------- #
# registry for CLI addressing

ENTRY_FACTORIES = {
    "euclidean": make_euclidean,
    "space_form": make_space_form,
    "schwarzschild": make_schwarzschild_isotropic,
    "capped_schwarzschild": make_capped_schwarzschild,
    "af_perturbation": make_af_perturbation,
    "normal_form": make_normal_form,
    "anisotropic": make_anisotropic_normal_form,
    "scalar_flat": make_scalar_flat_normal_form,
}


def make_entry(name, **params):
    """Instantiate a catalog entry by registry name and parameter list."""
    try:
        factory = ENTRY_FACTORIES[name]
    except KeyError:
        known = ", ".join(sorted(ENTRY_FACTORIES))
        raise KeyError(f"unknown catalog entry '{name}' (known: {known})") from None
    return factory(**params)
