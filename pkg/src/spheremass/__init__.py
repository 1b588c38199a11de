"""spheremass: quasi-local masses, ADM integrals and enclosed-volume
comparisons for spheres in 3-dimensional Riemannian metrics."""

__version__ = "0.1.0"

from .catalog import (CatalogEntry, KnownData, make_af_perturbation,
                      make_anisotropic_normal_form, make_capped_schwarzschild,
                      make_entry, make_euclidean, make_normal_form,
                      make_scalar_flat_normal_form,
                      make_schwarzschild_isotropic, make_space_form)
from .curvature import (CurvatureData, MetricField, curvature_at, jet_eval,
                        riemann_from_ricci, second_bianchi_residual)
from .embedding import (EmbeddedSurface, EmbeddingOptions, enclosed_volume,
                        gauss_curvature_gate, initial_guess, minkowski_check,
                        solve_embedding)
from .errors import (ChartDomainError, ConfigError, EmbeddingConvergenceError,
                     FitRankDeficientError, GateError, GeometryError,
                     MetricDefinitenessError, SphereMassError)
from .expansions import (ExpansionFit, TheoremReport, TheoryCoefficients,
                         fit_power_series, large_sphere_limit,
                         large_sphere_scan, small_sphere_scan,
                         small_sphere_theory, theorem_report)
from .jets import Jet, coordinate_jets, jet_diff
from .masses import (MassReport, adm_integral, brown_york, build_mass_report,
                     hawking, isoperimetric_term, volume_comparison)
from .spheres import (SphereGrid, SurfaceGeometry, ball_volume,
                      coordinate_region_volume, coordinate_sphere,
                      geodesic_sphere, geodesic_sphere_family,
                      integrate_scalar)
