"""Report emission: delimited tables (CSV + JSON mirrors), plain-text node
dumps, and the matplotlib figures rendered alongside them.

Every file starts with a header naming the toolkit version and the config
hash, and all float formatting uses shortest round-trip representations, so
re-running an identical configuration reproduces every byte.
"""

from __future__ import annotations

import json
import math

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import __version__
from .masses import MASS_REPORT_COLUMNS

__all__ = [
    "write_mass_reports_csv",
    "write_mass_reports_json",
    "write_fits_csv",
    "write_theorem_report",
    "write_surface_table",
    "write_embedded_table",
    "write_coefficient_table",
    "write_curvature_json",
    "mass_ladder_figure",
    "limit_figure",
    "volume_figure",
    "surface_figure",
    "theorem_figure",
]

_RC = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 130,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.bbox": "tight",
}


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def file_header(config_hash):
    return f"# spheremass {__version__} config={config_hash}"


def _json_header(config_hash):
    return {"tool": "spheremass", "version": __version__,
            "config_hash": config_hash}


def write_mass_reports_csv(reports, path, config_hash):
    lines = [file_header(config_hash), ",".join(MASS_REPORT_COLUMNS)]
    for rep in reports:
        row = rep.to_dict()
        lines.append(",".join(_fmt(row[c]) for c in MASS_REPORT_COLUMNS))
    _write(path, lines)


def write_mass_reports_json(reports, path, config_hash):
    payload = {"header": _json_header(config_hash),
               "columns": list(MASS_REPORT_COLUMNS),
               "rows": [rep.to_dict() for rep in reports]}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def write_fits_csv(fits, path, config_hash):
    """``fits`` maps a quantity name to an ExpansionFit."""
    lines = [file_header(config_hash),
             "quantity,exponent,coefficient,uncertainty,residual_norm,condition_number"]
    for name in sorted(fits):
        fit = fits[name]
        for e, c, u in zip(fit.exponents, fit.coefficients, fit.uncertainties):
            lines.append(",".join([name, _fmt(float(e)), _fmt(float(c)),
                                   _fmt(float(u)), _fmt(fit.residual_norm),
                                   _fmt(fit.condition_number)]))
    _write(path, lines)


def write_theorem_report(report, csv_path, txt_path, config_hash):
    lines = [file_header(config_hash),
             "quantity,theory,fitted,uncertainty,rel_dev,pass"]
    for row in report.rows:
        lines.append(",".join([row.name, _fmt(row.theory), _fmt(row.fitted),
                               _fmt(row.uncertainty), _fmt(row.rel_dev),
                               "pass" if row.passed else "fail"]))
    _write(csv_path, lines)
    _write(txt_path, [file_header(config_hash), report.to_text()])


def write_surface_table(surface, path, config_hash):
    """Node table of a sampled surface; fixed column order.

    dSigma is the physical area element per unit solid angle (fold with the
    grid weights to integrate).
    """
    grid = surface.grid
    lines = [file_header(config_hash),
             "# theta phi x1 x2 x3 H K dSigma"]
    cols = np.column_stack([grid.theta, grid.phi, surface.positions,
                            surface.mean_curvature, surface.gauss_curvature,
                            surface.area_element])
    lines += [" ".join(repr(float(v)) for v in row) for row in cols]
    _write(path, lines)


def write_embedded_table(es, path, config_hash):
    grid = es.grid
    lines = [file_header(config_hash),
             "# theta phi X1 X2 X3 H0 support"]
    cols = np.column_stack([grid.theta, grid.phi, es.positions,
                            es.h0_mean_curvature, es.support])
    lines += [" ".join(repr(float(v)) for v in row) for row in cols]
    _write(path, lines)


def write_coefficient_table(es, path, config_hash):
    lines = [file_header(config_hash), "# l m component coefficient"]
    lmax = es.degree
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            idx = l * l + l + m
            for comp in range(3):
                lines.append(f"{l} {m} {comp + 1} "
                             f"{repr(float(es.coefficients[comp, idx]))}")
    _write(path, lines)


def write_curvature_json(curv, path, config_hash):
    payload = {"header": _json_header(config_hash),
               "metric": curv.metric.tolist(),
               "christoffel": curv.christoffel.tolist(),
               "riemann": curv.riemann.tolist(),
               "ricci": curv.ricci.tolist(),
               "ricci_eigenvalues": curv.ricci_eigenvalues.tolist(),
               "scalar": float(curv.scalar),
               "ricci_norm_sq": float(curv.ricci_norm_sq),
               "grad_scalar": curv.grad_scalar.tolist(),
               "laplacian_scalar": float(curv.laplacian_scalar)}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _write(path, lines):
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------- #
# figures

def _png(fig, path):
    fig.savefig(path)
    plt.close(fig)


def mass_ladder_figure(reports, path, theory=None, title="quasi-local masses"):
    """log-log masses against radius, with the cubic-order theory curve."""
    rs = np.array([rep.r for rep in reports])
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for name, attr, marker in (("m_BY", "m_BY", "o"), ("m_H", "m_H", "s")):
            vals = [getattr(rep, attr) for rep in reports]
            if any(v is None for v in vals):
                continue
            ax.loglog(rs, np.abs(vals), marker, ms=4, label=name)
        if theory is not None:
            rr = np.geomspace(rs.min(), rs.max(), 200)
            ax.loglog(rr, np.abs(theory.c3_by * rr ** 3 + theory.c5_by * rr ** 5),
                      "-", lw=1, label="cubic+quintic theory (BY)")
        ax.set_xlabel("radius r")
        ax.set_ylabel("mass")
        ax.set_title(title)
        ax.legend()
        _png(fig, path)


def limit_figure(reports, path, quantity="m_BY", limit=None, adm=None):
    """Large-sphere quantity against 1/r with the extrapolated limit."""
    rs = np.array([rep.r for rep in reports])
    vals = np.array([getattr(rep, quantity) for rep in reports], dtype=float)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(1.0 / rs, vals, "o-", ms=4, label=quantity)
        if limit is not None:
            ax.axhline(limit, color="k", lw=1, ls="--",
                       label=f"extrapolated {limit:.6g}")
        if adm is not None:
            ax.axhline(adm, color="r", lw=1, ls=":", label=f"ADM {adm:.6g}")
        ax.set_xlabel("1/r")
        ax.set_ylabel(quantity)
        ax.set_title(f"large-sphere limit of {quantity}")
        ax.legend()
        _png(fig, path)


def volume_figure(reports, path, expected=None, scale_power=None):
    """Volume deficit V0 - V scaled by r^p (p = 5 small / 2 large)."""
    rs = np.array([rep.r for rep in reports])
    dv = np.array([rep.V0 - rep.V for rep in reports])
    if scale_power is None:
        scale_power = 2 if rs.max() > 10 else 5
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.semilogx(rs, dv / rs ** scale_power, "o-", ms=4,
                    label=f"(V0 - V)/r^{scale_power}")
        if expected is not None:
            ax.axhline(expected, color="k", lw=1, ls="--",
                       label=f"expected {expected:.6g}")
        ax.set_xlabel("radius r")
        ax.set_ylabel(f"(V0 - V)/r^{scale_power}")
        ax.set_title("enclosed-volume comparison")
        ax.legend()
        _png(fig, path)


def surface_figure(surface, path, title=None):
    """Angular maps of H and K over the (theta, phi) grid."""
    grid = surface.grid
    shape = (grid.n_theta, grid.n_phi)
    order = np.argsort(grid.theta[::grid.n_phi])
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(1, 2, figsize=(9, 3.4))
        for ax, field, name in ((axes[0], surface.mean_curvature, "H"),
                                (axes[1], surface.gauss_curvature, "K")):
            img = field.reshape(shape)[order]
            pc = ax.pcolormesh(np.degrees(grid.phi[:grid.n_phi]),
                               np.degrees(np.sort(grid.theta[::grid.n_phi])),
                               img, shading="nearest")
            fig.colorbar(pc, ax=ax, shrink=0.9)
            ax.set_xlabel("phi [deg]")
            ax.set_ylabel("theta [deg]")
            ax.set_title(name)
        if title:
            fig.suptitle(title)
        _png(fig, path)


def embedded_figure(es, path, title=None):
    """Angular maps of the Euclidean mean curvature and support function."""
    grid = es.grid
    shape = (grid.n_theta, grid.n_phi)
    order = np.argsort(grid.theta[::grid.n_phi])
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(1, 2, figsize=(9, 3.4))
        for ax, field, name in ((axes[0], es.h0_mean_curvature, "H0"),
                                (axes[1], es.support, "support X.n")):
            img = field.reshape(shape)[order]
            pc = ax.pcolormesh(np.degrees(grid.phi[:grid.n_phi]),
                               np.degrees(np.sort(grid.theta[::grid.n_phi])),
                               img, shading="nearest")
            fig.colorbar(pc, ax=ax, shrink=0.9)
            ax.set_xlabel("phi [deg]")
            ax.set_ylabel("theta [deg]")
            ax.set_title(name)
        if title:
            fig.suptitle(title)
        _png(fig, path)


def theorem_figure(report, path):
    """Fitted vs theoretical coefficients, normalized per quantity."""
    rows = [r for r in report.rows if abs(r.theory) > 1e-12]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        idx = np.arange(len(rows))
        ax.bar(idx - 0.18, [1.0] * len(rows), width=0.36, label="theory")
        ax.bar(idx + 0.18, [r.fitted / r.theory for r in rows], width=0.36,
               label="fitted / theory")
        ax.set_xticks(idx, [r.name for r in rows])
        ax.axhline(1.0, color="k", lw=0.8)
        ax.set_ylabel("coefficient ratio")
        ax.set_title("expansion coefficients: fitted against theory")
        ax.legend()
        _png(fig, path)