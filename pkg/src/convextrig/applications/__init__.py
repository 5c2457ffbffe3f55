"""Optimal control problems solved through convex trigonometry."""
from .lobachevsky import (
    HalfPlaneError,
    LobachevskyGeodesic,
    fixed_points,
    lobachevsky_geodesic,
    lobachevsky_horizontal,
    lobachevsky_vertical,
    support_set,
)
from .plane_dynamics import PlaneDynState, plane_dyn_extremal, plane_theta_flow
from .rolling_ball import (
    BallState,
    ball_energy,
    ball_integrate,
    ball_vertical_potential,
    edge_singular_controls,
    quat_exp_pure,
    quat_mul,
)
from .yachts import (
    PROBLEMS,
    AdmissibilityError,
    CriticalAngles,
    YachtReduction,
    YachtSpec,
    YachtTrajectory,
    critical_angles,
    level_angles,
    rotation_identity_residual,
    yacht_classify,
    yacht_extremal,
    yacht_reduce,
)

__all__ = [name for name in dir() if not name.startswith("_")]
