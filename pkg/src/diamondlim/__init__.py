"""Diamond-graph towers, their one-parameter measure family, and certificates.

The tower refines a unit segment by repeated quarter-subdivision with doubled
middle branches; a weight w in (0,1) splits mass between the branches and
induces a doubling probability measure at every level.  This package builds
the level graphs explicitly, computes exact geodesics and metric balls,
samples the digit coding of points, and produces the numerical certificates
(variation/affinity decay, rate negativity, doubling and averaged-oscillation
ratios) that probe the family's regularity and mutual singularity.
"""

from .addresses import (
    PointAddress,
    chart_coordinate,
    child_edges,
    edge_length,
    index_of,
    is_vertex_point,
    point_from_cantor,
    project_point,
    truncate,
    word_at,
)
from .certificates import (
    DoublingReport,
    LipschitzFunction,
    PencilCurve,
    PoincareReport,
    affinity_factor,
    default_radii,
    doubling_estimate,
    doubling_ratio,
    hellinger_affinity,
    pencil_sample,
    poincare_estimate,
    poincare_ratio,
    random_lipschitz,
    tv_distance,
    tv_lower_bound,
)
from .graphs import (
    BallCover,
    BudgetError,
    LevelGraph,
    ball_cover,
    build_level,
    collapse_vertex_map,
    geodesic_distance,
    max_level,
)
from .kernels import BACKEND
from .measures import (
    EdgeMeasureRecord,
    MeasureSpec,
    ball_mass,
    edge_density,
    edge_mass,
    level_densities,
    level_masses,
    pushforward_consistency,
    rn_ratio,
)
from .selftest import run_selftest
from .stochastic import (
    OutcomeDistribution,
    SamplePath,
    empirical_rate,
    negativity_certificate,
    outcome_distribution,
    rate_trace,
    sample_path,
    slln_limits,
    slln_report,
    theoretical_rate,
    weight_grid,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BallCover",
    "BudgetError",
    "DoublingReport",
    "EdgeMeasureRecord",
    "LevelGraph",
    "LipschitzFunction",
    "MeasureSpec",
    "OutcomeDistribution",
    "PencilCurve",
    "PointAddress",
    "PoincareReport",
    "SamplePath",
    "affinity_factor",
    "ball_cover",
    "ball_mass",
    "build_level",
    "chart_coordinate",
    "child_edges",
    "collapse_vertex_map",
    "default_radii",
    "doubling_estimate",
    "doubling_ratio",
    "edge_density",
    "edge_length",
    "edge_mass",
    "empirical_rate",
    "geodesic_distance",
    "hellinger_affinity",
    "index_of",
    "is_vertex_point",
    "level_densities",
    "level_masses",
    "max_level",
    "negativity_certificate",
    "outcome_distribution",
    "pencil_sample",
    "poincare_estimate",
    "poincare_ratio",
    "point_from_cantor",
    "project_point",
    "pushforward_consistency",
    "random_lipschitz",
    "rate_trace",
    "rn_ratio",
    "run_selftest",
    "sample_path",
    "slln_limits",
    "slln_report",
    "theoretical_rate",
    "truncate",
    "tv_distance",
    "tv_lower_bound",
    "weight_grid",
    "word_at",
]
