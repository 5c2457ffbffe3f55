"""Convex trigonometry on planar convex bodies and extremals of control problems built on it."""
from .convex_sets import (
    Arc,
    BodyError,
    Composite,
    ConvexBody,
    Disc,
    Ellipse,
    LpBall,
    Polygon,
    Segment,
    Transformed,
    body_from_dict,
    body_from_json,
    cut_disc,
    diamond,
    rotate,
    square,
)
from .convex_trig import NonSmoothPointError, TrigTable, angle_integrals, build_trig
from .ct_ode import (
    BranchingError,
    BranchPolicy,
    ExtremalTrajectory,
    IndeterminatePointError,
    IntegrationStallError,
    Potential,
    branch_enumerate,
    classify_stationary,
    integrate,
    quadrature_time,
    singular_control,
)
from .lie3d import LieSpec, extremal, extremal_type_report, phase_portrait

__all__ = [name for name in dir() if not name.startswith("_")]
