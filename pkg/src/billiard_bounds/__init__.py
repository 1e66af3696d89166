"""Periodic billiard trajectories on embedded manifolds and Morse-theoretic
lower bounds for their number."""

from .bounds import (
    BettiVector,
    birkhoff_phi,
    bound_report,
    brute_force_necklaces,
    necklace_count,
    poincare_weighted_sum,
    small_period_bounds,
    theorem_bound,
    total_B,
)
from .catalog import (
    CATALOG,
    Circle,
    Ellipse,
    Ellipsoid,
    FlatTorus,
    FourierOval,
    Sphere,
    Suspended,
    Torus,
    from_config,
)
from .geometry import (
    EmbeddedManifold,
    ExtendedConfig,
    PolygonConfig,
    embed_point,
    extended_value,
    hessian_fd,
    length_gradient,
    lift_trajectory,
    polygon_length,
    reflection_residual,
    tangent_frame,
)
from .solver import (
    SolutionSet,
    SolveSettings,
    TrajectorySolution,
    canonicalize,
    find_periodic_trajectories,
    morse_index,
    newton_refine,
    verify_index_shift,
)

__version__ = "0.1.0"
