"""Command-line interface: configuration ingestion, experiment orchestration
and report emission.

Subcommands: curvature, surface, embed, mass, small-sphere, large-sphere,
volume, validate.  Configuration comes from a JSON file (--config) with
flag overrides; a resolved copy is written next to every output and its
hash stamps every file.  Exit codes: 0 success, 2 invalid configuration,
3 geometry failure (chart/conjugate point/curvature gate), 4 embedding
non-convergence, 5 rank-deficient fit.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import reports as rep
from .catalog import ENTRY_FACTORIES, make_entry
from .curvature import curvature_at
from .embedding import EmbeddingOptions, solve_embedding
from .errors import (ChartDomainError, ConfigError, EmbeddingConvergenceError,
                     FitRankDeficientError, GateError, GeometryError,
                     MetricDefinitenessError)
from .expansions import (large_sphere_limit, large_sphere_scan,
                         large_volume_fit, small_sphere_scan,
                         small_sphere_theory, theorem_report)
from .masses import build_mass_report
from .spheres import SphereGrid, coordinate_sphere, geodesic_sphere

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GEOMETRY = 3
EXIT_EMBEDDING = 4
EXIT_FIT = 5

MODES = ("curvature", "surface", "embed", "mass", "small-sphere",
         "large-sphere", "volume")


@dataclass
class RunConfig:
    entry: dict = field(default_factory=lambda: {"name": "euclidean", "params": {}})
    mode: str = "curvature"
    center: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    radius: float = 1.0
    surface_kind: str = "auto"      # auto | geodesic | coordinate
    ladder: dict = field(default_factory=lambda: {
        "r_min": 0.1, "r_max": 0.4, "count": 8, "spacing": "log"})
    grid: dict = field(default_factory=lambda: {"n_theta": 24, "n_phi": 48})
    embedding: dict = field(default_factory=lambda: {
        "degree": 12, "tol": 1e-11, "max_iter": 40, "guess": "auto"})
    out_dir: str = "out"
    formats: list = field(default_factory=lambda: ["csv", "json"])
    figures: bool = True
    with_volumes: bool = False
    n_radial: int = 16

    def radii(self):
        lad = self.ladder
        if lad["spacing"] == "log":
            return list(np.geomspace(lad["r_min"], lad["r_max"], lad["count"]))
        return list(np.linspace(lad["r_min"], lad["r_max"], lad["count"]))


def validate(raw):
    """Normalize a raw config mapping into a RunConfig; collects one error
    message per invalid field and never runs any numerics."""
    errors = []
    cfg = RunConfig()
    known = {f for f in cfg.__dataclass_fields__}
    for key in raw:
        if key not in known:
            errors.append(f"{key}: unknown configuration field")
    data = {**{k: getattr(cfg, k) for k in known}, **{k: v for k, v in raw.items()
                                                      if k in known}}

    entry = data["entry"]
    if not isinstance(entry, dict) or "name" not in entry:
        errors.append("entry: must be a mapping with a 'name'")
    else:
        name = entry.get("name")
        params = entry.get("params", {}) or {}
        if name not in ENTRY_FACTORIES:
            errors.append(f"entry.name: unknown entry '{name}' "
                          f"(known: {', '.join(sorted(ENTRY_FACTORIES))})")
        if not isinstance(params, dict):
            errors.append("entry.params: must be a mapping")
        elif name == "af_perturbation" and "tau" in params:
            tau = params["tau"]
            if not (isinstance(tau, (int, float)) and 0.5 < tau <= 1.0):
                errors.append(f"entry.params.tau: decay order must satisfy "
                              f"1 >= tau > 1/2, got {tau}")
        data["entry"] = {"name": name, "params": params}

    if data["mode"] not in MODES:
        errors.append(f"mode: must be one of {', '.join(MODES)}")
    center = data["center"]
    if not (isinstance(center, (list, tuple)) and len(center) == 3
            and all(isinstance(c, (int, float)) for c in center)):
        errors.append("center: must be three numbers")
    else:
        data["center"] = [float(c) for c in center]
    if not (isinstance(data["radius"], (int, float)) and data["radius"] > 0):
        errors.append("radius: must be a positive number")
    if data["surface_kind"] not in ("auto", "geodesic", "coordinate"):
        errors.append("surface_kind: must be auto, geodesic or coordinate")

    lad = dict(data["ladder"])
    for k in ("r_min", "r_max"):
        if not (isinstance(lad.get(k), (int, float)) and lad[k] > 0):
            errors.append(f"ladder.{k}: must be a positive number")
    if isinstance(lad.get("r_min"), (int, float)) \
            and isinstance(lad.get("r_max"), (int, float)) \
            and lad["r_min"] >= lad["r_max"]:
        errors.append("ladder: r_min must be smaller than r_max")
    if not (isinstance(lad.get("count"), int) and lad["count"] >= 2):
        errors.append("ladder.count: must be an integer >= 2")
    if lad.get("spacing", "log") not in ("log", "linear"):
        errors.append("ladder.spacing: must be 'log' or 'linear'")
    lad.setdefault("spacing", "log")
    data["ladder"] = lad

    grd = dict(data["grid"])
    if not (isinstance(grd.get("n_theta"), int) and grd["n_theta"] >= 2):
        errors.append("grid.n_theta: must be an integer >= 2")
    if not (isinstance(grd.get("n_phi"), int) and grd["n_phi"] >= 4):
        errors.append("grid.n_phi: must be an integer >= 4")
    data["grid"] = grd

    emb = {**RunConfig().embedding, **dict(data["embedding"])}
    if not (isinstance(emb["degree"], int) and emb["degree"] >= 2):
        errors.append("embedding.degree: must be an integer >= 2")
    if not (isinstance(emb["tol"], (int, float)) and emb["tol"] > 0):
        errors.append("embedding.tol: must be positive")
    if not (isinstance(emb["max_iter"], int) and emb["max_iter"] >= 1):
        errors.append("embedding.max_iter: must be a positive integer")
    if emb["guess"] not in ("auto", "round", "curvature", "coordinate"):
        errors.append("embedding.guess: must be auto, round, curvature "
                      "or coordinate")
    data["embedding"] = emb

    fmts = data["formats"]
    if isinstance(fmts, str):
        fmts = ["csv", "json"] if fmts == "both" else [fmts]
    if not fmts or any(f not in ("csv", "json") for f in fmts):
        errors.append("formats: must be csv, json or both")
    data["formats"] = fmts
    if not isinstance(data["figures"], bool):
        errors.append("figures: must be true or false")
    if not isinstance(data["with_volumes"], bool):
        errors.append("with_volumes: must be true or false")
    if not (isinstance(data["n_radial"], int) and data["n_radial"] >= 2):
        errors.append("n_radial: must be an integer >= 2")

    if errors:
        raise ConfigError(errors)
    return RunConfig(**data)


def config_hash(cfg):
    canon = json.dumps(asdict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def _write_resolved(cfg, out_dir):
    path = os.path.join(out_dir, "resolved_config.json")
    with open(path, "w") as fh:
        json.dump({"header": {"tool": "spheremass"},
                   "config": asdict(cfg)}, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _embed_opts(cfg, curv=None, kind="geodesic"):
    emb = cfg.embedding
    guess = emb["guess"]
    if guess == "auto":
        guess = "curvature" if (kind == "geodesic" and curv is not None) \
            else "round"
    return EmbeddingOptions(degree=emb["degree"], tol=emb["tol"],
                            max_iter=emb["max_iter"], guess=guess,
                            curvature=curv)


def _resolve_kind(cfg, entry):
    if cfg.surface_kind != "auto":
        return cfg.surface_kind
    if cfg.mode == "large-sphere":
        return "coordinate"
    if cfg.mode == "small-sphere":
        return "geodesic"
    return "coordinate" if entry.metric.af_order is not None \
        and cfg.radius > 5 else "geodesic"


def _build_surface(cfg, entry, kind, grid):
    if kind == "coordinate":
        return coordinate_sphere(entry.metric, cfg.radius, grid)
    return geodesic_sphere(entry.metric, np.asarray(cfg.center), cfg.radius,
                           grid)


def run(cfg):
    """Execute the configured pipeline; returns the process exit status."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    _write_resolved(cfg, cfg.out_dir)
    h = config_hash(cfg)
    out = lambda name: os.path.join(cfg.out_dir, name)
    entry = make_entry(cfg.entry["name"], **cfg.entry["params"])
    grid = SphereGrid.build(cfg.grid["n_theta"], cfg.grid["n_phi"])
    center = np.asarray(cfg.center, dtype=float)

    try:
        if cfg.mode == "curvature":
            curv = curvature_at(entry.metric, center)
            rep.write_curvature_json(curv, out("curvature.json"), h)
            print(f"R = {float(curv.scalar)!r}")
            print(f"|Ric|^2 = {float(curv.ricci_norm_sq)!r}")
            print(f"Ricci eigenvalues = {curv.ricci_eigenvalues.tolist()!r}")
            print(f"Laplacian R = {float(curv.laplacian_scalar)!r}")

        elif cfg.mode == "surface":
            kind = _resolve_kind(cfg, entry)
            surface = _build_surface(cfg, entry, kind, grid)
            rep.write_surface_table(surface, out("surface_nodes.txt"), h)
            if cfg.figures:
                rep.surface_figure(surface, out("surface.png"),
                                   title=f"{entry.name} {kind} sphere "
                                         f"r={cfg.radius:g}")

        elif cfg.mode == "embed":
            kind = _resolve_kind(cfg, entry)
            surface = _build_surface(cfg, entry, kind, grid)
            curv = curvature_at(entry.metric, center) if kind == "geodesic" \
                else None
            es = solve_embedding(surface, _embed_opts(cfg, curv, kind))
            rep.write_embedded_table(es, out("embedded_nodes.txt"), h)
            rep.write_coefficient_table(es, out("embedding_coeffs.txt"), h)
            if cfg.figures:
                rep.embedded_figure(es, out("embedding.png"))

        elif cfg.mode == "mass":
            kind = _resolve_kind(cfg, entry)
            surface = _build_surface(cfg, entry, kind, grid)
            curv = curvature_at(entry.metric, center) if kind == "geodesic" \
                else None
            es = solve_embedding(surface, _embed_opts(cfg, curv, kind))
            row = build_mass_report(surface, es=es)
            _emit_mass_reports(cfg, [row], h)

        elif cfg.mode == "small-sphere":
            radii = cfg.radii()
            curv = curvature_at(entry.metric, center)
            reports_, curv = small_sphere_scan(
                entry, center, radii, grid=grid,
                embed_opts=_embed_opts(cfg, curv, "geodesic"),
                n_radial=cfg.n_radial)
            _emit_mass_reports(cfg, reports_, h)
            treport = theorem_report(entry, center, radii, reports=reports_,
                                     curv=curv)
            rep.write_theorem_report(treport, out("theorem_report.csv"),
                                     out("theorem_report.txt"), h)
            rep.write_fits_csv(treport.fits, out("fits.csv"), h)
            print(treport.to_text())
            if cfg.figures:
                rep.mass_ladder_figure(reports_, out("masses_smallsphere.png"),
                                       theory=treport.theory,
                                       title=f"{entry.name}: small-sphere masses")
                rep.theorem_figure(treport, out("theorem_coefficients.png"))
                if all(r.V is not None for r in reports_):
                    rep.volume_figure(reports_, out("volume_comparison.png"),
                                      expected=treport.theory.v5,
                                      scale_power=5)

        elif cfg.mode == "large-sphere":
            radii = cfg.radii()
            reports_ = large_sphere_scan(
                entry, radii, grid=grid,
                embed_opts=_embed_opts(cfg, None, "coordinate"),
                volumes=cfg.with_volumes, n_radial=max(cfg.n_radial, 32))
            _emit_mass_reports(cfg, reports_, h)
            tau = entry.metric.af_order
            limits = {}
            fits = {}
            for qty in ("m_BY", "m_H", "adm_partial"):
                value, unc, fit = large_sphere_limit(reports_, qty, tau)
                limits[qty] = (value, unc)
                fits[qty] = fit
            if cfg.with_volumes:
                value, unc, fit = large_sphere_limit(reports_, "iso_term", tau)
                limits["iso_term"] = (value, unc)
                fits["iso_term"] = fit
                v2, v2unc, vfit = large_volume_fit(reports_, tau)
                limits["volume_deficit_r2"] = (v2, v2unc)
                fits["volume_deficit"] = vfit
            lines = [rep.file_header(h), "quantity,limit,uncertainty"]
            for qty in sorted(limits):
                value, unc = limits[qty]
                lines.append(f"{qty},{value!r},{unc!r}")
            with open(out("limits.csv"), "w") as fh:
                fh.write("\n".join(lines) + "\n")
            rep.write_fits_csv(fits, out("fits.csv"), h)
            for qty in sorted(limits):
                print(f"{qty}: {limits[qty][0]!r} +- {limits[qty][1]!r}")
            if cfg.figures:
                rep.limit_figure(reports_, out("masses_largesphere.png"),
                                 quantity="m_BY", limit=limits["m_BY"][0],
                                 adm=entry.known.adm_mass)
                if cfg.with_volumes:
                    rep.volume_figure(reports_, out("volume_comparison.png"),
                                      expected=limits.get("volume_deficit_r2",
                                                          (None,))[0],
                                      scale_power=2)

        elif cfg.mode == "volume":
            radii = cfg.radii()
            kind = "coordinate" if entry.metric.af_order is not None \
                and max(radii) > 5 else "geodesic"
            if kind == "geodesic":
                curv = curvature_at(entry.metric, center)
                reports_, curv = small_sphere_scan(
                    entry, center, radii, grid=grid,
                    embed_opts=_embed_opts(cfg, curv, "geodesic"),
                    volumes=True, n_radial=cfg.n_radial)
                theory = small_sphere_theory(curv)
                expected, power = theory.v5, 5
            else:
                reports_ = large_sphere_scan(
                    entry, radii, grid=grid,
                    embed_opts=_embed_opts(cfg, None, "coordinate"),
                    volumes=True, n_radial=max(cfg.n_radial, 32))
                v2, _, _ = large_volume_fit(reports_, entry.metric.af_order)
                expected, power = v2, 2
            _emit_mass_reports(cfg, reports_, h)
            dv_fit = _volume_fit_rows(reports_, power, entry, h, cfg)
            if cfg.figures:
                rep.volume_figure(reports_, out("volume_comparison.png"),
                                  expected=expected, scale_power=power)

        return EXIT_OK
    except ConfigError:
        raise
    except (GateError, GeometryError, ChartDomainError,
            MetricDefinitenessError) as exc:
        print(f"geometry failure: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except EmbeddingConvergenceError as exc:
        print(f"embedding failure: {exc}", file=sys.stderr)
        return EXIT_EMBEDDING
    except FitRankDeficientError as exc:
        print(f"fit failure: {exc}", file=sys.stderr)
        return EXIT_FIT


def _volume_fit_rows(reports_, power, entry, h, cfg):
    from .expansions import VOLUME_EXPONENTS, fit_power_series
    out_path = os.path.join(cfg.out_dir, "volume_fit.csv")
    if power == 5:
        fit = fit_power_series(((r.r, r.V0 - r.V) for r in reports_),
                               VOLUME_EXPONENTS)
    else:
        _, _, fit = large_volume_fit(reports_, entry.metric.af_order)
    rep.write_fits_csv({"volume_deficit": fit}, out_path, h)
    return fit


def _emit_mass_reports(cfg, reports_, h):
    if "csv" in cfg.formats:
        rep.write_mass_reports_csv(reports_,
                                   os.path.join(cfg.out_dir, "mass_report.csv"), h)
    if "json" in cfg.formats:
        rep.write_mass_reports_json(reports_,
                                    os.path.join(cfg.out_dir, "mass_report.json"), h)


# ---------------------------------------------------------------------- #
# argument parsing

def _parse_params(pairs):
    params = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigError([f"--param '{pair}': expected key=value"])
        key, _, value = pair.partition("=")
        try:
            params[key] = json.loads(value)
        except json.JSONDecodeError:
            params[key] = value
    return params


def _load_config(args):
    raw = {}
    if args.config:
        with open(args.config) as fh:
            raw = json.load(fh)
    if args.entry:
        raw.setdefault("entry", {"name": args.entry, "params": {}})
        raw["entry"]["name"] = args.entry
    if args.param:
        raw.setdefault("entry", {"name": "euclidean", "params": {}})
        raw["entry"].setdefault("params", {})
        raw["entry"]["params"].update(_parse_params(args.param))
    if args.out:
        raw["out_dir"] = args.out
    if args.format:
        raw["formats"] = args.format
    if args.grid:
        try:
            nt, nph = (int(v) for v in args.grid.split(","))
        except ValueError:
            raise ConfigError(["--grid: expected N_THETA,N_PHI integers"])
        raw["grid"] = {"n_theta": nt, "n_phi": nph}
    if args.ladder:
        parts = args.ladder.split(",")
        if len(parts) != 4:
            raise ConfigError(["--ladder: expected MIN,MAX,COUNT,log|linear"])
        try:
            raw["ladder"] = {"r_min": float(parts[0]), "r_max": float(parts[1]),
                             "count": int(parts[2]), "spacing": parts[3]}
        except ValueError:
            raise ConfigError(["--ladder: expected MIN,MAX,COUNT,log|linear"])
    if args.center:
        try:
            raw["center"] = [float(v) for v in args.center.split(",")]
        except ValueError:
            raise ConfigError(["--center: expected X,Y,Z numbers"])
    if args.radius is not None:
        raw["radius"] = args.radius
    if args.degree is not None:
        raw.setdefault("embedding", {})
        raw["embedding"]["degree"] = args.degree
    if args.figures is not None:
        raw["figures"] = args.figures
    if getattr(args, "with_volumes", False):
        raw["with_volumes"] = True
    return raw


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spheremass",
        description="quasi-local masses and volume comparisons for spheres "
                    "in 3D Riemannian metrics")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES + ("validate",):
        p = sub.add_parser(mode)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", choices=["csv", "json", "both"],
                       help="tabular output format")
        p.add_argument("--grid", help="N_THETA,N_PHI quadrature grid")
        p.add_argument("--ladder", help="MIN,MAX,COUNT,log|linear radius ladder")
        p.add_argument("--entry", help="catalog entry name")
        p.add_argument("--param", action="append",
                       help="entry parameter key=value (repeatable)")
        p.add_argument("--center", help="center point X,Y,Z")
        p.add_argument("--radius", type=float, help="single-surface radius")
        p.add_argument("--degree", type=int, help="embedding spectral degree")
        p.add_argument("--figures", action=argparse.BooleanOptionalAction,
                       default=None, help="render figures next to tables")
        if mode in ("large-sphere", "volume"):
            p.add_argument("--with-volumes", dest="with_volumes",
                           action="store_true",
                           help="compute interior volumes and the "
                                "isoperimetric term")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        raw = _load_config(args)
        if args.mode != "validate":
            raw["mode"] = args.mode
        cfg = validate(raw)
    except ConfigError as exc:
        for msg in exc.errors:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.mode == "validate":
        print(json.dumps(asdict(cfg), indent=1, sort_keys=True))
        return EXIT_OK
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
