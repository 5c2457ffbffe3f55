"""Planar convex bodies containing the origin.

Every body answers the classical questions (support function, Minkowski
gauge, polar body, area) and also exposes exact primitives used by the
trigonometry layer: the boundary point at a generalized angle, the
generalized angle of a direction, and the lifted angle interval of the
dual covector(s) on the polar body.

Generalized angles are twice the swept sector area measured from the
positive x-axis, so the full turn is ``2 * area``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import special

TWO_PI = 2.0 * math.pi


class BodyError(ValueError):
    """Raised when a body literal violates its validity invariants."""


def _as_points(x) -> tuple[np.ndarray, tuple]:
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("points must have a trailing dimension of size 2")
    return arr.reshape(-1, 2), arr.shape[:-1]


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _anchor(raw: float, qy: float, period: float) -> float:
    """Pick the lift of a polar angle at theta = 0.

    Lower half-plane covectors get a negative lift so the monotone branch
    passes through the origin of angles continuously.
    """
    raw = raw % period
    if qy < 0.0 and raw > 0.0:
        raw -= period
    return raw


class ConvexBody:
    """Common interface. Subclasses fill in the exact primitives."""

    kind = "body"

    # -- classical geometry -------------------------------------------------
    def support(self, direction) -> np.ndarray | float:
        d, shape = _as_points(direction)
        out = self._support(d)
        return out.reshape(shape) if shape else float(out[0])

    def gauge(self, point) -> np.ndarray | float:
        x, shape = _as_points(point)
        out = self._gauge(x)
        return out.reshape(shape) if shape else float(out[0])

    def contains(self, point, tol: float = 1e-12):
        g = self.gauge(point)
        return g <= 1.0 + tol

    def boundary_point(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        v = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        g = np.asarray(self.gauge(v))
        return v / g[..., None]

    @property
    def area(self) -> float:
        return self._area()

    def polar(self) -> "ConvexBody":
        cached = self.__dict__.get("_polar_cache")
        if cached is None:
            cached = self._make_polar()
            object.__setattr__(self, "_polar_cache", cached)
            object.__setattr__(cached, "_polar_cache", self)
        return cached

    # -- trigonometric primitives ------------------------------------------
    @property
    def period(self) -> float:
        return 2.0 * self.area

    def point_at(self, theta) -> np.ndarray:
        """Boundary point at generalized angle ``theta`` (any real)."""
        th = np.asarray(theta, dtype=float)
        r = np.mod(th.ravel(), self.period)
        return self._point(r).reshape(th.shape + (2,))

    def angle_of(self, phi) -> np.ndarray | float:
        """Generalized angle in [0, 2S) of the boundary point at classic angle phi."""
        ph = np.asarray(phi, dtype=float)
        out = self._angle_of(np.mod(ph.ravel(), TWO_PI))
        out = np.where(out >= self.period, out - self.period, out)
        out = np.where(out < 0.0, 0.0, out)
        return out.reshape(ph.shape) if ph.shape else float(out[0])

    def dual_lift(self, theta) -> tuple[np.ndarray, np.ndarray]:
        """Lifted polar-angle interval [lo, hi] of covectors dual to P_theta.

        The lift is the monotone, quasi-periodic branch: adding 2S to theta
        adds 2S of the polar body to both ends.
        """
        th = np.asarray(theta, dtype=float)
        flat = th.ravel()
        P = self.period
        k = np.floor(flat / P)
        r = flat - k * P
        r = np.where(r >= P, r - P, r)
        lo, hi = self._dual(r)
        shift = k * self.polar().period
        return (lo + shift).reshape(th.shape), (hi + shift).reshape(th.shape)

    def frame(self, theta) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Boundary point at theta and the polar points at both ends of its dual interval."""
        th = np.asarray(theta, dtype=float)
        r = np.mod(th.ravel(), self.period)
        p, ql, qh = self._frame(r)
        shp = th.shape + (2,)
        return p.reshape(shp), ql.reshape(shp), qh.reshape(shp)

    def _frame(self, theta):
        lo, hi = self._dual(theta)
        pol = self.polar()
        return self._point(theta), pol.point_at(lo), pol.point_at(hi)

    def dtheta_polar(self, theta) -> np.ndarray:
        """d(theta_polar)/d(theta) at smooth points, nan where undefined."""
        th = np.asarray(theta, dtype=float)
        r = np.mod(th.ravel(), self.period)
        return self._dtheta_polar(r).reshape(th.shape)

    def corner_angles(self) -> np.ndarray:
        """Angles in [0, 2S) of boundary corners."""
        return np.array([], dtype=float)

    def rough_angles(self) -> np.ndarray:
        """Angles in [0, 2S) where the boundary is C^1 but has unbounded curvature."""
        return np.array([], dtype=float)

    def rough_exponent(self) -> float:
        """Order of contact of the boundary with its tangent at rough points."""
        return 2.0

    def describe(self) -> dict:
        raise NotImplementedError

    # subclasses implement these on arrays already reduced to [0, 2S)
    def _support(self, d: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _gauge(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _area(self) -> float:
        raise NotImplementedError

    def _make_polar(self) -> "ConvexBody":
        raise NotImplementedError

    def _point(self, theta: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _angle_of(self, phi: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _dual(self, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def _dtheta_polar(self, theta: np.ndarray) -> np.ndarray:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# Disc
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Disc(ConvexBody):
    radius: float = 1.0
    kind = "disc"

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise BodyError("disc radius must be positive")

    def _support(self, d):
        return self.radius * np.hypot(d[:, 0], d[:, 1])

    def _gauge(self, x):
        return np.hypot(x[:, 0], x[:, 1]) / self.radius

    def _area(self):
        return math.pi * self.radius**2

    def _make_polar(self):
        return Disc(1.0 / self.radius)

    def _point(self, theta):
        r2 = self.radius**2
        return self.radius * np.stack([np.cos(theta / r2), np.sin(theta / r2)], axis=-1)

    def _angle_of(self, phi):
        return self.radius**2 * phi

    def _dual(self, theta):
        v = theta / self.radius**4
        return v, v.copy()

    def _dtheta_polar(self, theta):
        return np.full_like(theta, self.radius**-4)

    def _frame(self, theta):
        p = self._point(theta)
        q = p / self.radius**2
        return p, q, q.copy()

    def describe(self):
        return {"kind": "disc", "radius": self.radius}


# ---------------------------------------------------------------------------
# Polygon
# ---------------------------------------------------------------------------


def _clean_polygon(vertices) -> np.ndarray:
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
        raise BodyError("polygon needs at least three planar vertices")
    if not np.all(np.isfinite(v)):
        raise BodyError("polygon vertices must be finite")
    scale = max(1.0, float(np.abs(v).max()))
    changed = True
    while changed and len(v) >= 3:
        changed = False
        n = len(v)
        for i in range(n):
            a, b, c = v[i - 1], v[i], v[(i + 1) % n]
            if np.linalg.norm(b - a) <= 1e-14 * scale:
                v = np.delete(v, i, axis=0)
                changed = True
                break
            turn = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
            if abs(turn) <= 1e-13 * scale**2:
                v = np.delete(v, i, axis=0)
                changed = True
                break
    if len(v) < 3:
        raise BodyError("polygon is degenerate after dropping collinear vertices")
    n = len(v)
    turns = np.array([_cross(v[i] - v[i - 1], v[(i + 1) % n] - v[i]) for i in range(n)])
    if np.any(turns <= 0):
        raise BodyError("polygon vertices must be strictly convex and counterclockwise")
    # a convex CCW polygon turns exactly once around
    angles = np.arctan2(*(np.roll(v, -1, axis=0) - v)[:, ::-1].T)
    total = np.sum(np.mod(np.diff(np.append(angles, angles[0])), TWO_PI))
    if abs(total - TWO_PI) > 1e-6:
        raise BodyError("polygon boundary is not simple")
    edge_c = _cross(v, np.roll(v, -1, axis=0))
    if np.any(edge_c <= 1e-14 * scale**2):
        raise BodyError("origin must lie strictly inside the polygon")
    return v


@dataclass(frozen=True, eq=False)
class Polygon(ConvexBody):
    vertices: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    kind = "polygon"

    def __post_init__(self):
        v = _clean_polygon(self.vertices)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        nxt = np.roll(v, -1, axis=0)
        c = _cross(v, nxt)
        normals = np.stack([nxt[:, 1] - v[:, 1], v[:, 0] - nxt[:, 0]], axis=-1) / c[:, None]
        normals.setflags(write=False)
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "_S", 0.5 * float(np.sum(c)))
        self._build_chain()

    def _build_chain(self):
        v = self.vertices
        n = len(v)
        # edge k crosses the positive x-axis going up
        k = next(i for i in range(n) if v[i, 1] <= 0.0 < v[(i + 1) % n, 1])
        a, b = v[k], v[(k + 1) % n]
        t = -a[1] / (b[1] - a[1])
        p0 = np.array([a[0] + t * (b[0] - a[0]), 0.0])
        if t <= 0.0:
            p0 = a.copy()
        order = [(k + 1 + j) % n for j in range(n)]  # w_0 .. w_{n-1}, last one is v_k
        chain = [p0] + [v[i] for i in order] + [p0]
        chain = np.array(chain)
        inc = _cross(chain[:-1], chain[1:])
        inc[np.abs(inc) < 1e-300] = 0.0
        cum = np.concatenate([[0.0], np.cumsum(inc)])
        cum[-1] = 2.0 * self._S
        edges = np.array([k] + [(k + 1 + j) % n for j in range(n)])  # edge of chain segment j
        object.__setattr__(self, "_k", k)
        object.__setattr__(self, "_p0", p0)
        object.__setattr__(self, "_chain", chain)
        object.__setattr__(self, "_cum", cum)
        object.__setattr__(self, "_seg_edge", edges)
        object.__setattr__(self, "_p0_is_vertex", bool(t <= 0.0))
        ang = np.mod(np.arctan2(chain[:, 1], chain[:, 0]), TWO_PI)
        ang[0] = 0.0
        ang[-1] = TWO_PI
        if self._p0_is_vertex:
            ang[-2] = TWO_PI
        object.__setattr__(self, "_chain_ang", np.maximum.accumulate(ang))

    # lifted polar angles of the normals, in chain order
    def _edge_lifts(self) -> np.ndarray:
        cached = self.__dict__.get("_lifts")
        if cached is not None:
            return cached
        pol = self.polar()
        nrm = self.normals
        n = len(nrm)
        k = self._k
        seq = nrm[[(k + j) % n for j in range(n + 1)]]  # edges k, k+1, ..., k+n
        inc = _cross(seq[:-1], seq[1:])
        if self._p0_is_vertex:
            prev = nrm[(k - 1) % n]
            lo_raw = pol.angle_of(math.atan2(prev[1], prev[0]))
            lo = _anchor(lo_raw, prev[1], pol.period)
            start = lo + float(_cross(prev, nrm[k]))
        else:
            q = nrm[k]
            start = _anchor(pol.angle_of(math.atan2(q[1], q[0])), q[1], pol.period)
        lifts = start + np.concatenate([[0.0], np.cumsum(inc)])
        lifts[-1] = lifts[0] + pol.period
        object.__setattr__(self, "_lifts", lifts)
        return lifts

    def _support(self, d):
        return np.max(d @ self.vertices.T, axis=1)

    def _gauge(self, x):
        return np.maximum(np.max(x @ self.normals.T, axis=1), 0.0)

    def _area(self):
        return self._S

    def _make_polar(self):
        return Polygon(self.normals.copy())

    def _locate(self, theta):
        cum = self._cum
        j = np.searchsorted(cum, theta, side="right") - 1
        return np.clip(j, 0, len(cum) - 2)

    def _point(self, theta):
        j = self._locate(theta)
        cum, ch = self._cum, self._chain
        width = cum[j + 1] - cum[j]
        s = np.where(width > 0, (theta - cum[j]) / np.where(width > 0, width, 1.0), 0.0)
        return ch[j] + s[:, None] * (ch[j + 1] - ch[j])

    def _angle_of(self, phi):
        x = self.boundary_point(phi)
        j = np.searchsorted(self._chain_ang, phi, side="right") - 1
        j = np.clip(j, 0, len(self._chain) - 2)
        val = self._cum[j] + _cross(self._chain[j], x)
        # rounding must not move a vertex direction off its corner angle
        tol = 1e-14 * self.period
        val = np.where(np.abs(val - self._cum[j + 1]) <= tol, self._cum[j + 1], val)
        return np.where(np.abs(val - self._cum[j]) <= tol, self._cum[j], val)

    def _dual(self, theta):
        lifts = self._edge_lifts()
        cum = self._cum
        j = self._locate(theta)
        lo = lifts[j].copy()
        hi = lifts[j].copy()
        # exactly at a chain vertex (index >= 1) the interval spans the dual edge
        at_vertex = (theta == cum[j]) & (j >= 1)
        lo = np.where(at_vertex, lifts[j - 1], lo)
        if self._p0_is_vertex:
            at0 = theta == 0.0
            lo = np.where(at0, lifts[0] - _cross(self.normals[(self._k - 1) % len(self.normals)],
                                                    self.normals[self._k]), lo)
        return lo, hi

    def _frame(self, theta):
        j = self._locate(theta)
        nrm = self.normals
        edge = self._seg_edge
        hi = nrm[edge[j]]
        at_vertex = (theta == self._cum[j]) & (j >= 1)
        lo = np.where(at_vertex[:, None], nrm[edge[j - 1]], hi)
        if self._p0_is_vertex:
            lo = np.where((theta == 0.0)[:, None], nrm[(self._k - 1) % len(nrm)], lo)
        return self._point(theta), lo, hi.copy()

    def _dtheta_polar(self, theta):
        out = np.zeros_like(theta)
        c = self.corner_angles()
        for a in c:
            out[np.abs(theta - a) <= 1e-14 * self.period] = np.nan
        return out

    def corner_angles(self):
        c = self._cum[1:-1].copy()
        if self._p0_is_vertex:
            c = np.concatenate([[0.0], c[:-1]])
        return np.unique(c)

    def describe(self):
        return {"kind": "polygon", "vertices": self.vertices.tolist()}


# ---------------------------------------------------------------------------
# Ellipse
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Ellipse(ConvexBody):
    a: float = 1.0
    b: float = 1.0
    center: tuple = (0.0, 0.0)
    kind = "ellipse"

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise BodyError("ellipse semi-axes must be positive")
        x0, y0 = (float(c) for c in self.center)
        object.__setattr__(self, "center", (x0, y0))
        if (x0 / self.a) ** 2 + (y0 / self.b) ** 2 >= 1.0:
            raise BodyError("origin must lie strictly inside the ellipse")
        ab = self.a * self.b
        R = math.hypot(x0 * self.b, y0 * self.a)
        object.__setattr__(self, "_R", R)
        object.__setattr__(self, "_delta", math.atan2(y0 * self.a, x0 * self.b))
        s0 = math.asin(-y0 / self.b)
        object.__setattr__(self, "_s0", s0)
        object.__setattr__(self, "_F0", self._F(np.array([s0]))[0])
        object.__setattr__(self, "_ab", ab)

    @property
    def centered(self) -> bool:
        return self.center == (0.0, 0.0)

    def _F(self, s):
        x0, y0 = self.center
        return self.a * self.b * s - y0 * self.a * np.cos(s) + x0 * self.b * np.sin(s)

    def _dF(self, s):
        x0, y0 = self.center
        return self.a * self.b + y0 * self.a * np.sin(s) + x0 * self.b * np.cos(s)

    def param_of_angle(self, theta: np.ndarray) -> np.ndarray:
        """Solve F(s) - F(s0) = theta for the ellipse parameter s."""
        theta = np.asarray(theta, dtype=float)
        if theta.size == 1:
            return np.full(theta.shape, self._param_scalar(float(theta.reshape(-1)[0])))
        s0 = self._s0
        lo = np.full_like(theta, s0)
        hi = np.full_like(theta, s0 + TWO_PI)
        s = s0 + theta / self._ab
        for _ in range(60):
            g = self._F(s) - self._F0 - theta
            lo = np.where(g < 0, s, lo)
            hi = np.where(g > 0, s, hi)
            step = g / self._dF(s)
            s_new = s - step
            bad = (s_new <= lo) | (s_new >= hi)
            s_new = np.where(bad, 0.5 * (lo + hi), s_new)
            if np.all(np.abs(s_new - s) <= 4e-16 * (1.0 + np.abs(s))):
                s = s_new
                break
            s = s_new
        return s

    def _param_scalar(self, theta: float) -> float:
        # same safeguarded Newton iteration without array overhead (integrators query one angle at a time)
        x0, y0 = self.center
        a, b, ab = self.a, self.b, self._ab
        target = theta + self._F0
        lo, hi = self._s0, self._s0 + TWO_PI
        s = self._s0 + theta / ab
        for _ in range(60):
            g = ab * s - y0 * a * math.cos(s) + x0 * b * math.sin(s) - target
            if g < 0:
                lo = s
            elif g > 0:
                hi = s
            s_new = s - g / (ab + y0 * a * math.sin(s) + x0 * b * math.cos(s))
            if not lo < s_new < hi:
                s_new = 0.5 * (lo + hi)
            if abs(s_new - s) <= 4e-16 * (1.0 + abs(s)):
                return s_new
            s = s_new
        return s

    def _support(self, d):
        x0, y0 = self.center
        return d[:, 0] * x0 + d[:, 1] * y0 + np.hypot(self.a * d[:, 0], self.b * d[:, 1])

    def _gauge(self, x):
        x0, y0 = self.center
        a2 = (x[:, 0] / self.a) ** 2 + (x[:, 1] / self.b) ** 2
        b2 = -2.0 * (x[:, 0] * x0 / self.a**2 + x[:, 1] * y0 / self.b**2)
        c2 = (x0 / self.a) ** 2 + (y0 / self.b) ** 2 - 1.0
        disc = np.sqrt(np.maximum(b2 * b2 - 4.0 * a2 * c2, 0.0))
        return (-b2 - disc) / (2.0 * c2)

    def _area(self):
        return math.pi * self.a * self.b

    def _make_polar(self):
        if self.centered:
            return Ellipse(1.0 / self.a, 1.0 / self.b)
        c = np.array(self.center)
        B = np.diag([self.a**2, self.b**2]) - np.outer(c, c)
        Binv_c = np.linalg.solve(B, c)
        p0 = -Binv_c
        kk = 1.0 + c @ Binv_c
        lam, vec = np.linalg.eigh(B)
        if np.linalg.det(vec) < 0:
            vec[:, 1] = -vec[:, 1]
        local_center = vec.T @ p0
        base = Ellipse(math.sqrt(kk / lam[0]), math.sqrt(kk / lam[1]), tuple(local_center))
        return Transformed(base, vec)

    def _point(self, theta):
        s = self.param_of_angle(theta)
        x0, y0 = self.center
        return np.stack([self.a * np.cos(s) + x0, self.b * np.sin(s) + y0], axis=-1)

    def _angle_of(self, phi):
        x0, y0 = self.center
        p = self.boundary_point(phi)
        s = np.arctan2((p[:, 1] - y0) / self.b, (p[:, 0] - x0) / self.a)
        s = self._s0 + np.mod(s - self._s0, TWO_PI)
        return self._F(s) - self._F0

    def _polar_integral(self, s):
        # integral of ab / F'(s)^2, continuous in s
        A, R, ab = self._ab, self._R, self._ab
        u = s - self._delta
        w2 = A * A - R * R
        w = math.sqrt(w2)
        k = math.sqrt((A - R) / (A + R))
        n = np.round(u / TWO_PI)
        v = u - TWO_PI * n
        J = (2.0 / w) * np.arctan2(k * np.sin(0.5 * v), np.cos(0.5 * v)) + n * (TWO_PI / w)
        alpha = -R / w2
        beta = A / w2
        return ab * (alpha * np.sin(u) / (A + R * np.cos(u)) + beta * J)

    def polar_point_of_param(self, s):
        dF = self._dF(s)
        return np.stack([self.b * np.cos(s) / dF, self.a * np.sin(s) / dF], axis=-1)

    def _dual_anchor(self) -> float:
        cached = self.__dict__.get("_anchor_val")
        if cached is None:
            q = self.polar_point_of_param(np.array([self._s0]))[0]
            pol = self.polar()
            cached = _anchor(pol.angle_of(math.atan2(q[1], q[0])), q[1], pol.period)
            object.__setattr__(self, "_anchor_val", cached)
        return cached

    def _dual(self, theta):
        s = self.param_of_angle(theta)
        base = self._polar_integral(np.array([self._s0]))[0]
        v = self._dual_anchor() + self._polar_integral(s) - base
        return v, v.copy()

    def _dtheta_polar(self, theta):
        s = self.param_of_angle(theta)
        return self._ab / self._dF(s) ** 3

    def _frame(self, theta):
        s = self.param_of_angle(theta)
        x0, y0 = self.center
        p = np.stack([self.a * np.cos(s) + x0, self.b * np.sin(s) + y0], axis=-1)
        q = self.polar_point_of_param(s)
        return p, q, q.copy()

    def describe(self):
        return {"kind": "ellipse", "a": self.a, "b": self.b, "center": list(self.center)}


# ---------------------------------------------------------------------------
# l_p balls
# ---------------------------------------------------------------------------


def conjugate_exponent(p: float) -> float:
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def lp_area(p: float, scale: float = 1.0) -> float:
    if math.isinf(p):
        return 4.0 * scale**2
    return 4.0 * scale**2 * special.gamma(1.0 + 1.0 / p) ** 2 / special.gamma(1.0 + 2.0 / p)


_QUARTER_TURNS = np.array([[[1, 0], [0, 1]], [[0, -1], [1, 0]], [[-1, 0], [0, -1]], [[0, 1], [-1, 0]]], dtype=float)


def _rot90(xy: np.ndarray, k: np.ndarray) -> np.ndarray:
    R = _QUARTER_TURNS[np.mod(np.asarray(k, dtype=int), 4)]
    return np.einsum("nij,nj->ni", R, xy)


@dataclass(frozen=True, eq=False)
class LpBall(ConvexBody):
    p: float = 2.0
    scale: float = 1.0
    kind = "lp"

    def __post_init__(self):
        p = float(self.p)
        if not (p >= 1.0):
            raise BodyError("lp exponent must be in [1, inf]")
        if not (self.scale > 0):
            raise BodyError("lp scale must be positive")
        object.__setattr__(self, "p", p)
        s = self.scale
        if p == 1.0:
            object.__setattr__(self, "_poly", Polygon([[s, 0], [0, s], [-s, 0], [0, -s]]))
        elif math.isinf(p):
            object.__setattr__(self, "_poly", Polygon([[s, -s], [s, s], [-s, s], [-s, -s]]))
        else:
            object.__setattr__(self, "_poly", None)
            q = conjugate_exponent(p)
            object.__setattr__(self, "q", q)
            object.__setattr__(self, "_quarter", 0.5 * lp_area(p, s))
            object.__setattr__(self, "_quarter_polar", 0.5 * lp_area(q, 1.0 / s))

    @property
    def is_polygon(self) -> bool:
        return self._poly is not None

    def _norm(self, x, r):
        ax = np.abs(x)
        m = np.max(ax, axis=1)
        safe = np.where(m > 0, m, 1.0)
        if math.isinf(r):
            return m
        return np.where(m > 0, safe * np.sum((ax / safe[:, None]) ** r, axis=1) ** (1.0 / r), 0.0)

    def _support(self, d):
        if self._poly is not None:
            return self._poly._support(d)
        return self.scale * self._norm(d, self.q)

    def _gauge(self, x):
        if self._poly is not None:
            return self._poly._gauge(x)
        return self._norm(x, self.p) / self.scale

    def _area(self):
        return lp_area(self.p, self.scale)

    def _make_polar(self):
        return LpBall(conjugate_exponent(self.p), 1.0 / self.scale)

    # first-quadrant helpers: u = y^p on the unit ball
    def _u_of_fraction(self, frac):
        a = 1.0 / self.p
        return special.betaincinv(a, a, frac)

    def _quadrant(self, theta):
        Q = self._quarter
        k = np.floor(theta / Q)
        k = np.clip(k, 0, 3)
        t = theta - k * Q
        mirror = t > 0.5 * Q
        tt = np.where(mirror, Q - t, t)
        u = self._u_of_fraction(np.clip(tt / Q, 0.0, 0.5))
        return k.astype(int), mirror, u

    def _point(self, theta):
        if self._poly is not None:
            return self._poly._point(theta)
        k, mirror, u = self._quadrant(theta)
        X = (1.0 - u) ** (1.0 / self.p)
        Y = u ** (1.0 / self.p)
        xy = np.where(mirror[:, None], np.stack([Y, X], -1), np.stack([X, Y], -1))
        return self.scale * _rot90(xy, k)

    def _angle_of(self, phi):
        if self._poly is not None:
            return self._poly._angle_of(phi)
        k = np.clip(np.floor(phi / (0.5 * math.pi)), 0, 3).astype(int)
        v = np.stack([np.cos(phi), np.sin(phi)], -1)
        loc = np.abs(_rot90(v, -k))
        X, Y = loc[:, 0], loc[:, 1]
        mirror = Y > X
        small = np.where(mirror, X, Y)
        big = np.where(mirror, Y, X)
        ratio = np.where(big > 0, small / np.where(big > 0, big, 1.0), 0.0)
        u = ratio**self.p / (1.0 + ratio**self.p)
        a = 1.0 / self.p
        Q = self._quarter
        frac = special.betainc(a, a, u)
        t = np.where(mirror, Q - Q * frac, Q * frac)
        return k * Q + t

    def _dual(self, theta):
        if self._poly is not None:
            return self._poly._dual(theta)
        k, mirror, u = self._quadrant(theta)
        a = 1.0 / self.q
        Qp = self._quarter_polar
        loc = Qp * special.betainc(a, a, u)
        loc = np.where(mirror, Qp - loc, loc)
        v = k * Qp + loc
        return v, v.copy()

    def _frame(self, theta):
        if self._poly is not None:
            return self._poly._frame(theta)
        if theta.size == 1:
            return self._frame_scalar(float(theta[0]))
        k, mirror, u = self._quadrant(theta)
        X = (1.0 - u) ** (1.0 / self.p)
        Y = u ** (1.0 / self.p)
        xy = np.where(mirror[:, None], np.stack([Y, X], -1), np.stack([X, Y], -1))
        qxy = xy ** (self.p - 1.0)
        p = self.scale * _rot90(xy, k)
        q = _rot90(qxy, k) / self.scale
        return p, q, q.copy()

    def _frame_scalar(self, theta: float):
        Q = self._quarter
        k = min(max(math.floor(theta / Q), 0), 3)
        t = theta - k * Q
        mirror = t > 0.5 * Q
        tt = Q - t if mirror else t
        u = float(self._u_of_fraction(min(max(tt / Q, 0.0), 0.5)))
        X, Y = (1.0 - u) ** (1.0 / self.p), u ** (1.0 / self.p)
        if mirror:
            X, Y = Y, X
        qx, qy = X ** (self.p - 1.0), Y ** (self.p - 1.0)
        R = _QUARTER_TURNS[k]
        p = self.scale * (R @ np.array([X, Y]))
        q = (R @ np.array([qx, qy])) / self.scale
        return p[None, :], q[None, :], q[None, :].copy()

    def _dtheta_polar(self, theta):
        if self._poly is not None:
            return self._poly._dtheta_polar(theta)
        _, _, u = self._quadrant(theta)
        w = u * (1.0 - u)
        expo = 1.0 / self.q - 1.0 / self.p
        with np.errstate(divide="ignore", invalid="ignore"):
            val = (self.p / (self.q * self.scale**4)) * np.where(w > 0, w, 0.0) ** expo
        return np.where(np.isfinite(val), val, np.nan)

    def corner_angles(self):
        if self._poly is not None:
            return self._poly.corner_angles()
        return np.array([], dtype=float)

    def rough_angles(self):
        if self._poly is None and self.p < 2.0:
            return self._quarter * np.arange(4.0)
        return np.array([], dtype=float)

    def rough_exponent(self):
        if self._poly is None and self.p < 2.0:
            return self.p
        return 2.0

    def describe(self):
        p = "inf" if math.isinf(self.p) else self.p
        return {"kind": "lp", "p": p, "scale": self.scale}


# ---------------------------------------------------------------------------
# Linear images (rotations, shears of any body)
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Transformed(ConvexBody):
    """The image ``M @ base`` of a body under an orientation-preserving linear map."""

    base: ConvexBody = None
    matrix: np.ndarray = field(default_factory=lambda: np.eye(2))
    kind = "transformed"

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float).reshape(2, 2)
        base = self.base
        if isinstance(base, Transformed):
            M = M @ base.matrix
            base = base.base
            object.__setattr__(self, "base", base)
        det = float(np.linalg.det(M))
        if not det > 1e-300:
            raise BodyError("transform must preserve orientation")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "_det", det)
        Minv = np.linalg.inv(M)
        object.__setattr__(self, "_Minv", Minv)
        d = Minv @ np.array([1.0, 0.0])
        object.__setattr__(self, "_theta_start", float(base.angle_of(math.atan2(d[1], d[0]))))

    @staticmethod
    def rotation(angle: float) -> np.ndarray:
        c, s = math.cos(angle), math.sin(angle)
        return np.array([[c, -s], [s, c]])

    def _support(self, d):
        return self.base._support(d @ self.matrix)

    def _gauge(self, x):
        return self.base._gauge(x @ self._Minv.T)

    def _area(self):
        return self._det * self.base.area

    def _make_polar(self):
        return Transformed(self.base.polar(), self._Minv.T)

    def _base_theta(self, theta):
        return theta / self._det + self._theta_start

    def _point(self, theta):
        return self.base.point_at(self._base_theta(theta)) @ self.matrix.T

    def _angle_of(self, phi):
        v = np.stack([np.cos(phi), np.sin(phi)], -1) @ self._Minv.T
        tb = np.asarray(self.base.angle_of(np.arctan2(v[:, 1], v[:, 0])))
        return self._det * np.mod(tb - self._theta_start, self.base.period)

    def _shift(self) -> tuple[float, float]:
        cached = self.__dict__.get("_shift_val")
        if cached is None:
            pol_base = self.base.polar()
            MT = self.matrix.T
            d = MT @ np.array([1.0, 0.0])
            c = float(pol_base.angle_of(math.atan2(d[1], d[0])))
            lo_b, _ = self.base.dual_lift(self._theta_start)
            raw0 = (float(lo_b) - c) / self._det
            q_base = pol_base.point_at(float(lo_b))
            q = self._Minv.T @ q_base
            period = self.polar().period
            want = _anchor(raw0, q[1], period)
            shift = round((want - raw0) / period) * period
            cached = (c, shift)
            object.__setattr__(self, "_shift_val", cached)
        return cached

    def _dual(self, theta):
        c, shift = self._shift()
        lo, hi = self.base.dual_lift(self._base_theta(theta))
        return (lo - c) / self._det + shift, (hi - c) / self._det + shift

    def _dtheta_polar(self, theta):
        return self.base.dtheta_polar(self._base_theta(theta)) / self._det**2

    def _frame(self, theta):
        p, ql, qh = self.base.frame(self._base_theta(theta))
        W = self._Minv
        return p @ self.matrix.T, ql @ W, qh @ W

    def _map_angles(self, angles):
        if len(angles) == 0:
            return angles
        return np.sort(self._det * np.mod(angles - self._theta_start, self.base.period))

    def corner_angles(self):
        return self._map_angles(self.base.corner_angles())

    def rough_angles(self):
        return self._map_angles(self.base.rough_angles())

    def rough_exponent(self):
        return self.base.rough_exponent()

    def describe(self):
        return {"kind": "transformed", "matrix": self.matrix.tolist(), "body": self.base.describe()}


def rotate(body: ConvexBody, angle: float) -> ConvexBody:
    """Counterclockwise rotation of a body by ``angle`` radians."""
    if angle == 0.0:
        return body
    if isinstance(body, Disc):
        return body
    return Transformed(body, Transformed.rotation(angle))


# ---------------------------------------------------------------------------
# Composite bodies glued from boundary pieces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Arc:
    """Piece of ``body``'s boundary between classic angles phi_start and phi_end (CCW)."""

    body: ConvexBody
    phi_start: float
    phi_end: float


@dataclass(frozen=True)
class Segment:
    start: tuple
    end: tuple


class _Piece:
    """Internal piece: arc of a source body by generalized angle, or a segment."""

    __slots__ = ("src", "t0", "length", "A", "B", "normal")

    def __init__(self, src=None, t0=0.0, length=0.0, A=None, B=None):
        self.src = src
        self.t0 = t0
        self.length = length
        self.A = None if A is None else np.asarray(A, float)
        self.B = None if B is None else np.asarray(B, float)
        self.normal = None
        if src is None:
            c = float(_cross(self.A, self.B))
            self.length = c
            d = self.B - self.A
            self.normal = np.array([d[1], -d[0]]) / c

    @property
    def is_arc(self) -> bool:
        return self.src is not None

    def point(self, local):
        if self.is_arc:
            return self.src.point_at(self.t0 + local)
        s = local / self.length
        return self.A + np.multiply.outer(s, self.B - self.A)

    def start_point(self):
        return self.point(np.array([0.0]))[0]

    def end_point(self):
        return self.point(np.array([self.length]))[0]

    def q_start(self):
        if not self.is_arc:
            return self.normal
        _, hi = self.src.dual_lift(self.t0)
        return self.src.polar().point_at(float(hi))

    def q_end(self):
        if not self.is_arc:
            return self.normal
        lo, _ = self.src.dual_lift(self.t0 + self.length)
        return self.src.polar().point_at(float(lo))

    def polar_length(self):
        if not self.is_arc:
            return 0.0
        _, hi = self.src.dual_lift(self.t0)
        lo, _ = self.src.dual_lift(self.t0 + self.length)
        return float(lo - hi)

    def split(self, direction_phi):
        """Split at the ray of classic angle phi (must cut the piece interior)."""
        if self.is_arc:
            tb = float(self.src.angle_of(direction_phi))
            off = (tb - self.t0) % self.src.period
            return (_Piece(self.src, self.t0, off), _Piece(self.src, self.t0 + off, self.length - off))
        v = np.array([math.cos(direction_phi), math.sin(direction_phi)])
        X = v / float(self.normal @ v)
        return _Piece(A=self.A, B=X), _Piece(A=X, B=self.B)


JUNCTION_TOL = 1e-9


class Composite(ConvexBody):
    """Boundary glued from arcs of other bodies and straight segments.

    Arcs and segments are listed counterclockwise; consecutive pieces must
    meet (within 1e-9) and turn left at every junction.
    """

    kind = "composite"

    def __init__(self, arcs: Sequence[Arc | Segment]):
        pieces = []
        for a in arcs:
            if isinstance(a, Arc):
                t0 = float(a.body.angle_of(a.phi_start))
                t1 = float(a.body.angle_of(a.phi_end))
                length = (t1 - t0) % a.body.period
                if length == 0.0 and (a.phi_end - a.phi_start) % TWO_PI == 0.0 and a.phi_end != a.phi_start:
                    length = a.body.period
                pieces.append(_Piece(a.body, t0, length))
            elif isinstance(a, Segment):
                pieces.append(_Piece(A=a.start, B=a.end))
            else:
                raise BodyError(f"unknown composite piece {a!r}")
        self._arcs_spec = list(arcs)
        self._init_pieces(pieces)

    @classmethod
    def _from_pieces(cls, pieces):
        obj = cls.__new__(cls)
        obj._arcs_spec = None
        obj._init_pieces(pieces)
        return obj

    def _init_pieces(self, pieces):
        pieces = [p for p in pieces if p.length > 1e-15]
        if not pieces:
            raise BodyError("composite body needs at least one piece")
        n = len(pieces)
        starts = [p.start_point() for p in pieces]
        ends = [p.end_point() for p in pieces]
        scale = max(1.0, max(float(np.abs(s).max()) for s in starts))
        for i in range(n):
            gap = np.linalg.norm(ends[i] - starts[(i + 1) % n])
            if gap > JUNCTION_TOL * scale:
                raise BodyError(f"composite pieces {i} and {(i + 1) % n} do not meet (gap {gap:.3g})")
        for p, s in zip(pieces, starts):
            if p.is_arc:
                continue
            if p.length <= 0:
                raise BodyError("composite segment must run counterclockwise around the origin")
        sweep = 0.0
        for s, e in zip(starts, ends):
            sweep += (math.atan2(e[1], e[0]) - math.atan2(s[1], s[0])) % TWO_PI
        if abs(sweep - TWO_PI) > 1e-6:
            raise BodyError("composite boundary must wind once around the origin")
        # rotate so that piece 0 starts on the positive x-axis
        idx = None
        for i, (p, s, e) in enumerate(zip(pieces, starts, ends)):
            a0 = math.atan2(s[1], s[0]) % TWO_PI
            w = (math.atan2(e[1], e[0]) - math.atan2(s[1], s[0])) % TWO_PI
            off = (-a0) % TWO_PI
            if off < 1e-15 or off > TWO_PI - 1e-15:
                idx = (i, None)
                break
            if off < w:
                idx = (i, off)
                break
        if idx is None:
            raise BodyError("composite boundary does not cross the positive x-axis")
        i, off = idx
        if off is None:
            pieces = pieces[i:] + pieces[:i]
        else:
            first, second = pieces[i].split(0.0)
            pieces = [second] + pieces[i + 1:] + pieces[:i] + [first]
            pieces = [p for p in pieces if p.length > 1e-15]
        self._pieces = pieces
        n = len(pieces)
        lengths = np.array([p.length for p in pieces])
        self._cum = np.concatenate([[0.0], np.cumsum(lengths)])
        self._S = 0.5 * float(self._cum[-1])
        qs = [p.q_start() for p in pieces]
        qe = [p.q_end() for p in pieces]
        jumps = np.array([float(_cross(qe[i], qs[(i + 1) % n])) for i in range(n)])
        qscale = max(float(np.abs(q).max()) for q in qs) ** 2
        if np.any(jumps < -1e-9 * qscale):
            raise BodyError("composite boundary is not convex at a junction")
        jumps = np.maximum(jumps, 0.0)
        jumps[jumps < 1e-12 * qscale] = 0.0
        self._qs, self._qe, self._jumps = qs, qe, jumps
        self._polar_len = np.array([p.polar_length() for p in pieces])
        sp = [p.start_point() for p in pieces]
        ang = np.array([math.atan2(s[1], s[0]) % TWO_PI for s in sp])
        ang[0] = 0.0
        self._piece_ang = np.maximum.accumulate(ang)
        self._rough = []
        for i in range(n):
            prev = pieces[i - 1]
            cur = pieces[i]
            same = (prev.is_arc and cur.is_arc and prev.src is cur.src) or (
                not prev.is_arc and not cur.is_arc and np.allclose(prev.normal, cur.normal))
            if not same and jumps[i - 1] == 0.0:
                self._rough.append(self._cum[i])

    def _polar_offsets(self):
        cached = self.__dict__.get("_offs")
        if cached is not None:
            return cached
        n = len(self._pieces)
        pol = self.polar()
        q_lo = self._qe[-1]
        raw = pol.angle_of(math.atan2(q_lo[1], q_lo[0]))
        start = _anchor(raw, q_lo[1], pol.period) + self._jumps[-1]
        offs = np.empty(n)
        acc = start
        for i in range(n):
            offs[i] = acc
            acc += self._polar_len[i] + self._jumps[i]
        self.__dict__["_offs"] = offs
        return offs

    def _support(self, d):
        return self.polar()._gauge(d)

    def _gauge(self, x):
        phi = np.mod(np.arctan2(x[:, 1], x[:, 0]), TWO_PI)
        j = np.clip(np.searchsorted(self._piece_ang, phi, side="right") - 1, 0, len(self._pieces) - 1)
        out = np.zeros(len(x))
        for i, p in enumerate(self._pieces):
            m = j == i
            if not np.any(m):
                continue
            if p.is_arc:
                out[m] = p.src._gauge(x[m])
            else:
                out[m] = x[m] @ p.normal
        return out

    def _area(self):
        return self._S

    def _make_polar(self):
        pieces = []
        n = len(self._pieces)
        for i, p in enumerate(self._pieces):
            if p.is_arc and self._polar_len[i] > 0:
                _, hi = p.src.dual_lift(p.t0)
                src_pol = p.src.polar()
                pieces.append(_Piece(src_pol, float(hi) % src_pol.period, self._polar_len[i]))
            if self._jumps[i] > 0:
                pieces.append(_Piece(A=self._qe[i], B=self._qs[(i + 1) % n]))
        return Composite._from_pieces(pieces)

    def _locate(self, theta):
        j = np.searchsorted(self._cum, theta, side="right") - 1
        return np.clip(j, 0, len(self._pieces) - 1)

    def _point(self, theta):
        j = self._locate(theta)
        out = np.empty((len(theta), 2))
        for i, p in enumerate(self._pieces):
            m = j == i
            if np.any(m):
                out[m] = p.point(theta[m] - self._cum[i])
        return out

    def _angle_of(self, phi):
        j = np.clip(np.searchsorted(self._piece_ang, phi, side="right") - 1, 0, len(self._pieces) - 1)
        out = np.empty(len(phi))
        for i, p in enumerate(self._pieces):
            m = j == i
            if not np.any(m):
                continue
            if p.is_arc:
                tb = np.asarray(p.src.angle_of(phi[m]))
                val = np.mod(tb - p.t0, p.src.period)
                val = np.where(val > p.length + 0.5 * (p.src.period - p.length), val - p.src.period, val)
                out[m] = self._cum[i] + np.clip(val, 0.0, p.length)
            else:
                v = np.stack([np.cos(phi[m]), np.sin(phi[m])], -1)
                X = v / (v @ p.normal)[:, None]
                out[m] = self._cum[i] + np.clip(_cross(p.A, X), 0.0, p.length)
        return out

    def _dual(self, theta):
        offs = self._polar_offsets()
        j = self._locate(theta)
        lo = np.empty(len(theta))
        hi = np.empty(len(theta))
        for i, p in enumerate(self._pieces):
            m = j == i
            if not np.any(m):
                continue
            local = theta[m] - self._cum[i]
            if p.is_arc:
                _, h0 = p.src.dual_lift(p.t0)
                l, h = p.src.dual_lift(p.t0 + local)
                lo[m] = offs[i] + (l - h0)
                hi[m] = offs[i] + (h - h0)
            else:
                lo[m] = offs[i]
                hi[m] = offs[i]
            at_start = local <= 0.0
            if np.any(at_start):
                idx = np.flatnonzero(m)[at_start]
                hi[idx] = offs[i]
                lo[idx] = offs[i] - self._jumps[i - 1]
        return lo, hi

    def _dtheta_polar(self, theta):
        j = self._locate(theta)
        out = np.zeros(len(theta))
        for i, p in enumerate(self._pieces):
            m = j == i
            if np.any(m) and p.is_arc:
                out[m] = p.src.dtheta_polar(p.t0 + theta[m] - self._cum[i])
        for c in self.corner_angles():
            out[np.abs(theta - c) <= 1e-14 * self.period] = np.nan
        return out

    def corner_angles(self):
        out = [self._cum[i] for i in range(len(self._pieces)) if self._jumps[i - 1] > 0]
        for i, p in enumerate(self._pieces):
            if p.is_arc:
                for c in p.src.corner_angles():
                    off = (c - p.t0) % p.src.period
                    if 0 < off < p.length:
                        out.append(self._cum[i] + off)
        return np.unique(np.array(out, dtype=float))

    def rough_angles(self):
        out = list(self._rough)
        for i, p in enumerate(self._pieces):
            if p.is_arc:
                for c in p.src.rough_angles():
                    off = (c - p.t0) % p.src.period
                    if 0 < off < p.length:
                        out.append(self._cum[i] + off)
        return np.unique(np.array(out, dtype=float))

    def rough_exponent(self):
        return float("nan")

    def describe(self):
        if self._arcs_spec is None:
            arcs = []
            for p in self._pieces:
                if p.is_arc:
                    a = float(np.arctan2(*p.start_point()[::-1]))
                    b = float(np.arctan2(*p.end_point()[::-1]))
                    arcs.append({"body": p.src.describe(), "phi_start": a, "phi_end": b})
                else:
                    arcs.append({"segment": [p.A.tolist(), p.B.tolist()]})
            return {"kind": "composite", "arcs": arcs}
        arcs = []
        for a in self._arcs_spec:
            if isinstance(a, Arc):
                arcs.append({"body": a.body.describe(), "phi_start": a.phi_start, "phi_end": a.phi_end})
            else:
                arcs.append({"segment": [list(a.start), list(a.end)]})
        return {"kind": "composite", "arcs": arcs}


# ---------------------------------------------------------------------------
# Convenience constructors and JSON
# ---------------------------------------------------------------------------


def square(half: float = 1.0) -> Polygon:
    h = half
    return Polygon([[h, -h], [h, h], [-h, h], [-h, -h]])


def diamond(radius: float = 1.0) -> Polygon:
    r = radius
    return Polygon([[r, 0], [0, r], [-r, 0], [0, -r]])


def cut_disc(cut: float, radius: float = 1.0) -> Composite:
    """Disc of the given radius intersected with the half-plane x <= cut."""
    if not 0.0 < cut < radius:
        raise BodyError("cut must lie in (0, radius)")
    beta = math.acos(cut / radius)
    h = radius * math.sin(beta)
    disc = Disc(radius)
    return Composite([Arc(disc, beta, TWO_PI - beta), Segment((cut, -h), (cut, h))])


def body_from_dict(spec: dict) -> ConvexBody:
    try:
        kind = spec["kind"]
        if kind == "polygon":
            return Polygon(spec["vertices"])
        if kind == "ellipse":
            return Ellipse(float(spec["a"]), float(spec["b"]), tuple(spec.get("center", (0.0, 0.0))))
        if kind == "lp":
            p = spec["p"]
            p = math.inf if str(p).lower() in ("inf", "infinity") else float(p)
            return LpBall(p, float(spec.get("scale", 1.0)))
        if kind == "disc":
            return Disc(float(spec.get("radius", 1.0)))
        if kind == "cut_disc":
            return cut_disc(float(spec["cut"]), float(spec.get("radius", 1.0)))
        if kind == "transformed":
            return Transformed(body_from_dict(spec["body"]), np.array(spec["matrix"], float))
        if kind == "composite":
            arcs = []
            for a in spec["arcs"]:
                if "segment" in a:
                    s, e = a["segment"]
                    arcs.append(Segment(tuple(s), tuple(e)))
                else:
                    arcs.append(Arc(body_from_dict(a["body"]), float(a["phi_start"]), float(a["phi_end"])))
            return Composite(arcs)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, BodyError):
            raise
        raise BodyError(f"malformed body literal: {exc}") from exc
    raise BodyError(f"unknown body kind {spec.get('kind')!r}")


def body_from_json(text: str) -> ConvexBody:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BodyError(f"body is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise BodyError("body literal must be a JSON object")
    return body_from_dict(data)


def hausdorff_sampled(a: ConvexBody, b: ConvexBody, n: int = 2048) -> float:
    """Hausdorff distance between two bodies via their support functions."""
    phi = np.linspace(0.0, TWO_PI, n, endpoint=False)
    d = np.stack([np.cos(phi), np.sin(phi)], -1)
    return float(np.max(np.abs(a.support(d) - b.support(d))))


def all_vertices_match(a: Iterable, b: Iterable, tol: float = 1e-10) -> bool:
    """True if two vertex lists agree up to cyclic shift."""
    A = np.asarray(a, float)
    B = np.asarray(b, float)
    if A.shape != B.shape:
        return False
    return any(np.max(np.abs(np.roll(B, s, axis=0) - A)) <= tol for s in range(len(B)))
