"""Exact finite-level supergeometry: Grassmann algebras, Lambda-points,
polynomial supermanifold morphisms, truncated jet calculus, and seeded
verification suites with a JSON command-line front end.

Everything algebraic is exact (rational arithmetic); only the curved-geometry
backend works in floats, with explicit tolerances.
"""

from .errors import (
    DegreeBoundError,
    DimensionError,
    DomainError,
    ParityError,
    SchemaError,
)
from .geometry import (
    BundlePoint,
    BundleTangent,
    FlatBackend,
    Sphere2Backend,
    bundle_exp,
    local_detrivialize,
    local_trivialize,
    make_backend,
)
from .grassmann import (
    GrassmannElement,
    GrassmannHom,
    gr_mul,
    gr_split,
    hom_apply,
    hom_compose,
    hom_validate,
    merge_sign,
)
from .jetcalc import (
    SuperTaylor,
    TruncatedPolyMap,
    exp_pair,
    faa_di_bruno,
    taylor_of,
    trunc_compose,
    trunc_mul,
)
from .mapspace import (
    LambdaPointMap,
    MappingPoint,
    SmoothVerdict,
    SuperChart,
    chart_transition_map,
    lambda_point_map_of,
    mapping_chart,
    sc_functor_action,
    sc_pair_to_point,
    sc_point_to_pair,
    supersmooth_check,
    top_order_cancellation,
)
from .morphism import (
    EtaCoefficient,
    OrderVerdict,
    SuperMorphism,
    certified_order,
    default_probes,
    eta_decompose,
    morphism_compose,
    order_bound_check,
    pushforward,
    pushforward_general,
)
from .polyalg import (
    DEFAULT_DEGREE_BOUND,
    Polynomial,
    lattice_points,
    poly_compose,
    poly_derive,
    poly_eval,
    taylor_coefficient,
)
from .rng import ALGORITHM, SplitMix64
from .suites import SUITES, run_suite
from .superfun import (
    SuperFunction,
    SuperPoint,
    sf_eval,
    sf_eval_naive,
    sf_mul,
    sf_substitute,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHM",
    "BundlePoint",
    "BundleTangent",
    "DEFAULT_DEGREE_BOUND",
    "DegreeBoundError",
    "DimensionError",
    "DomainError",
    "EtaCoefficient",
    "FlatBackend",
    "GrassmannElement",
    "GrassmannHom",
    "LambdaPointMap",
    "MappingPoint",
    "OrderVerdict",
    "ParityError",
    "Polynomial",
    "SUITES",
    "SchemaError",
    "SmoothVerdict",
    "Sphere2Backend",
    "SplitMix64",
    "SuperChart",
    "SuperFunction",
    "SuperMorphism",
    "SuperPoint",
    "SuperTaylor",
    "TruncatedPolyMap",
    "bundle_exp",
    "certified_order",
    "chart_transition_map",
    "default_probes",
    "eta_decompose",
    "exp_pair",
    "faa_di_bruno",
    "gr_mul",
    "gr_split",
    "hom_apply",
    "hom_compose",
    "hom_validate",
    "lambda_point_map_of",
    "lattice_points",
    "local_detrivialize",
    "local_trivialize",
    "make_backend",
    "mapping_chart",
    "merge_sign",
    "morphism_compose",
    "order_bound_check",
    "poly_compose",
    "poly_derive",
    "poly_eval",
    "pushforward",
    "pushforward_general",
    "run_suite",
    "sc_functor_action",
    "sc_pair_to_point",
    "sc_point_to_pair",
    "sf_eval",
    "sf_eval_naive",
    "sf_mul",
    "sf_substitute",
    "supersmooth_check",
    "taylor_coefficient",
    "taylor_of",
    "top_order_cancellation",
    "trunc_compose",
    "trunc_mul",
]
