"""Generalized trigonometric functions of a convex body.

``build_trig`` wraps a body in a :class:`TrigTable` that answers cos/sin
queries, the angle correspondence with the polar body, derivatives and
curvature.  Values come from the body's exact primitives; the sample grid
stored on the table is used for dumps and sanity checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .convex_sets import ConvexBody, _cross

CORNER_REL_TOL = 1e-9
MIN_RESOLUTION = 64


class NonSmoothPointError(ValueError):
    """Raised when a derivative of order two is requested at a corner."""


@dataclass(eq=False)
class TrigTable:
    body: ConvexBody
    resolution: int = 1024
    S: float = field(init=False)
    breakpoints: np.ndarray = field(init=False)
    samples: np.ndarray = field(init=False, repr=False)
    _polar_table: "TrigTable | None" = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.resolution < MIN_RESOLUTION:
            raise ValueError(f"resolution must be at least {MIN_RESOLUTION}")
        self.S = self.body.area
        self.breakpoints = np.sort(self.body.corner_angles())
        theta = np.linspace(0.0, self.period, self.resolution, endpoint=False)
        pts = self.body.point_at(theta)
        # chord-accumulated area, refined between samples, as an independent check
        area = (4.0 * self._chord_area(16) - self._chord_area(8)) / 3.0
        self.samples = np.column_stack([theta, pts, area])

    def _chord_area(self, refine: int) -> np.ndarray:
        fine = np.linspace(0.0, self.period, refine * self.resolution + 1)
        fp = self.body.point_at(fine)
        acc = np.concatenate([[0.0], np.cumsum(0.5 * _cross(fp[:-1], fp[1:]))])
        return acc[::refine][: self.resolution]

    # -- basic properties ---------------------------------------------------
    @property
    def period(self) -> float:
        return 2.0 * self.S

    @property
    def polar_table(self) -> "TrigTable":
        if self._polar_table is None:
            pt = TrigTable(self.body.polar(), self.resolution)
            pt._polar_table = self
            self._polar_table = pt
        return self._polar_table

    @property
    def S_polar(self) -> float:
        return self.polar_table.S

    @property
    def corner_tol(self) -> float:
        return CORNER_REL_TOL * self.polar_table.period

    # -- queries ------------------------------------------------------------
    def cos_sin(self, theta) -> np.ndarray:
        return self.body.point_at(theta)

    def cos(self, theta):
        return self.cos_sin(theta)[..., 0]

    def sin(self, theta):
        return self.cos_sin(theta)[..., 1]

    def corresponding_angles(self, theta) -> tuple[np.ndarray, np.ndarray]:
        """Closed interval of polar angles corresponding to theta (monotone lift)."""
        lo, hi = self.body.dual_lift(theta)
        tight = (hi - lo) <= self.corner_tol
        hi = np.where(tight, lo, hi)
        if np.ndim(lo) == 0:
            return float(lo), float(hi)
        return lo, hi

    def monotone_branch(self, theta):
        lo, _ = self.corresponding_angles(theta)
        return lo

    def is_corner(self, theta):
        lo, hi = self.body.dual_lift(theta)
        out = (hi - lo) > self.corner_tol
        return bool(out) if np.ndim(out) == 0 else out

    def dual_points(self, theta) -> tuple[np.ndarray, np.ndarray]:
        """Polar-body points at both ends of the correspondence interval."""
        lo, hi = self.corresponding_angles(theta)
        pb = self.body.polar()
        return pb.point_at(lo), pb.point_at(hi)

    def derivative(self, theta) -> tuple[np.ndarray, np.ndarray]:
        """One-sided derivatives (cos', sin') at theta - 0 and theta + 0."""
        q_lo, q_hi = self.dual_points(theta)
        left = np.stack([-q_lo[..., 1], q_lo[..., 0]], axis=-1)
        right = np.stack([-q_hi[..., 1], q_hi[..., 0]], axis=-1)
        return left, right

    def dtheta_polar_dtheta(self, theta):
        val = self.body.dtheta_polar(theta)
        corner = np.asarray(self.is_corner(theta))
        if np.any(corner) or np.any(~np.isfinite(val)):
            raise NonSmoothPointError("boundary is not twice differentiable at the requested angle")
        return float(val) if np.ndim(val) == 0 else val

    def curvature(self, theta):
        d = self.dtheta_polar_dtheta(theta)
        q = self.body.polar().point_at(self.monotone_branch(theta))
        return (q[..., 0] ** 2 + q[..., 1] ** 2) ** -1.5 * d

    def polar_decompose(self, point) -> tuple:
        """Write point = r * (cos theta, sin theta) with r the gauge of the body."""
        x = np.asarray(point, dtype=float)
        r = np.asarray(self.body.gauge(x))
        if np.any(r <= 0.0):
            raise ValueError("cannot decompose the origin")
        theta = np.asarray(self.body.angle_of(np.arctan2(x[..., 1], x[..., 0])))
        if r.ndim == 0:
            return float(r), float(theta)
        return r, theta

    def angle_of_direction(self, phi):
        """Generalized angle of the boundary point at classic angle phi."""
        return self.body.angle_of(phi)

    def rough_angles(self) -> np.ndarray:
        return np.sort(self.body.rough_angles())

    def singular_angles(self) -> np.ndarray:
        """Angles where the boundary fails to be W^{2,inf}: corners plus rough points."""
        return np.unique(np.concatenate([self.breakpoints, self.rough_angles()]))

    # -- dumps --------------------------------------------------------------
    def rows(self, n: int) -> np.ndarray:
        """Columns theta, cos, sin, theta_polar_lo, theta_polar_hi, is_corner on n uniform points."""
        theta = np.linspace(0.0, self.period, n, endpoint=False)
        pts = self.cos_sin(theta)
        lo, hi = self.corresponding_angles(theta)
        corner = (hi - lo) > self.corner_tol
        return np.column_stack([theta, pts, lo, hi, corner.astype(float)])


def build_trig(body: ConvexBody, resolution: int = 1024) -> TrigTable:
    return TrigTable(body, resolution)


def angle_integrals(table: TrigTable, theta_a: float, theta_b: float, n_nodes: int = 24) -> np.ndarray:
    """Integral of (cos, sin) of the table over [theta_a, theta_b].

    Gauss-Legendre on the pieces between corners is exact for polygons and
    spectrally accurate on smooth arcs.
    """
    if theta_b == theta_a:
        return np.zeros(2)
    sign = 1.0
    if theta_b < theta_a:
        theta_a, theta_b = theta_b, theta_a
        sign = -1.0
    P = table.period
    cuts = table.singular_angles()
    k0 = math.floor(theta_a / P)
    k1 = math.floor(theta_b / P)
    marks = [theta_a, theta_b]
    for k in range(k0, k1 + 1):
        for c in cuts:
            v = c + k * P
            if theta_a < v < theta_b:
                marks.append(v)
    marks = np.unique(marks)
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    a, b = marks[:-1], marks[1:]
    # split long pieces so smooth quadrature stays accurate
    pieces = []
    for lo, hi in zip(a, b):
        m = max(1, int(math.ceil((hi - lo) / (P / 16.0))))
        edges = np.linspace(lo, hi, m + 1)
        pieces.extend(zip(edges[:-1], edges[1:]))
    pieces = np.array(pieces)
    mid = 0.5 * (pieces[:, 0] + pieces[:, 1])
    half = 0.5 * (pieces[:, 1] - pieces[:, 0])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = table.cos_sin(nodes)
    total = np.einsum("pn,pnc,p->c", np.broadcast_to(w, nodes.shape), vals, half)
    return sign * total
