"""Hyperbolic cubic polynomials and the hypersurfaces they define.

Standard-form reduction, closedness and boundary classification, base-point
curvature with independent oracles, homogeneity detection, and deformation
inside the compact convex generating set of closed instances.
"""

from .ambient import (
    AmbientCubic,
    LinearChange,
    StandardCubic,
    apply_change,
    is_hyperbolic_point,
)
from .curvature import (
    CurvatureReport,
    GeodesicPath,
    christoffel_at_base,
    curvature_report,
    ds_at_base,
    fd_scalar_oracle,
    geodesic,
    pullback_metric,
    ricci_at_base,
    riemann_at_base,
    scalar_at,
    scalar_at_base,
    sectional_at_base,
)
from .domain import (
    CLOSEDNESS_THRESHOLD,
    RayRoots,
    alpha,
    beta,
    dom_contains,
    phi,
    ray_roots,
)
from .membership import (
    EigenRangeReport,
    GeneratingSetPosition,
    MembershipReport,
    SphereMaxResult,
    classify,
    eigen_range_check,
    hyperbolicity_form,
    max_on_sphere,
)
from .moduli import (
    CurvatureBoundsEstimate,
    DeformationCurve,
    HomogeneityResult,
    SurfaceFixture,
    curvature_bounds_estimate,
    deform,
    e_from_y3_limit,
    f_interpolation_chain,
    generating_set_position,
    homogeneity_test,
    scale_path,
    surface_fixture,
)
from .standard_form import (
    ReductionResult,
    SoNDirectionField,
    delta_p3,
    move_point,
    standard_form_at,
)
from .symtensor import SymCubic, cubic_from_values, multiplicity

__version__ = "0.1.0"
