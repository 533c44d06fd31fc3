"""Contraction certificates and fixed points for set-valued maps on finite metric spaces."""

from .derived import DerivedMetric, DiscretePath, chain_metric, geodesic, path_length, path_metric, reparametrize
from .errors import CapacityError, EvaluationError, InputError, MetricfixError, NoPathError
from .expr import Expression
from .games import (
    Game,
    best_response_i,
    best_response_map,
    certify_contractive,
    evaluate_payoff,
    is_nash,
    nash_by_deviation,
    nash_enumerate,
    nash_via_dynamics,
)
from .hausdorff import (
    MetricView,
    as_view,
    directed_hausdorff,
    hausdorff_distance,
    hausdorff_via_expansion,
    image_distance_matrix,
    set_distance,
)
from .metric import (
    FiniteMetricSpace,
    ball,
    check_metric_convexity,
    components_at_scale,
    is_r_chainable,
    product_space,
    validate_metric,
)
from .setvalued import (
    ContractionCertificate,
    SetValuedMap,
    SolveTrace,
    compose,
    discrete_slope,
    fixed_points_exhaustive,
    global_modulus,
    image_path_length,
    is_shrinking,
    iterate,
    local_certificate,
    periodic_point_search,
    pointwise_certificate,
    solve_fixed_point,
)

__version__ = "0.1.0"
