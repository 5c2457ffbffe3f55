"""Finsler geodesics on the upper half-plane  x' = y u1, y' = y u2,  u in Omega.

Horizontal geodesics (p != 0) are similarity images of the upper part of the
polar boundary: (x, y) = (x0 - s*lam*sin°, s*lam*cos°) with s = sign(p) and
theta° driven by theta°' = -cos°(theta°).  Vertical geodesics (p = 0) keep u on
the top (or bottom) support set of Omega.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..convex_sets import ConvexBody
from ..convex_trig import TrigTable, build_trig
from ._flow import FlowResult, integrate_flow

EDGE_TOL = 1e-9


class HalfPlaneError(ValueError):
    """Raised when a horizontal geodesic would start outside y > 0."""


@dataclass
class LobachevskyGeodesic:
    kind: str
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    theta_polar: np.ndarray | None = None
    params: dict = field(default_factory=dict)
    fixed: bool = False

    def columns(self) -> dict:
        cols = {"t": self.t, "x": self.x, "y": self.y, "u1": self.u[:, 0], "u2": self.u[:, 1]}
        if self.theta_polar is not None:
            cols["theta_polar"] = self.theta_polar
        return cols

    def to_polar_boundary(self) -> np.ndarray:
        """Undo the similarity: points that should lie on the polar boundary."""
        if self.kind != "horizontal":
            raise ValueError("only horizontal geodesics come from the polar boundary")
        lam, s, x0 = self.params["lam"], self.params["sign"], self.params["x0"]
        return np.column_stack([self.y / (s * lam), (x0 - self.x) / (s * lam)])


def fixed_points(polar_table: TrigTable) -> np.ndarray:
    """Polar angles where the polar boundary meets the vertical axis."""
    return np.sort(np.asarray(polar_table.angle_of_direction(np.array([0.5 * math.pi, 1.5 * math.pi]))))


def _linear_rate_solution(P_a, D, x0, x_end, direction):
    # x' = -(c0 + c1 x) with cos°(a + x) = c0 + c1 x on a polar edge
    c0, c1 = float(P_a[0]), float(D[0])
    if abs(c1) <= 1e-15:
        if c0 == 0.0:
            return None
        tau = (x_end - x0) / (-c0)
        return (lambda s: x0 - c0 * s), (tau if tau > 0 else math.inf)
    xs = -c0 / c1
    d0 = x0 - xs
    ratio = (x_end - xs) / d0 if d0 != 0.0 else -1.0
    tau = -math.log(ratio) / c1 if 0.0 < ratio else math.inf
    if not (tau > 0):
        tau = math.inf
    return (lambda s: xs + d0 * np.exp(-c1 * s)), tau


def _controls(polar_table: TrigTable, theta_polar: np.ndarray) -> np.ndarray:
    lo, hi = polar_table.corresponding_angles(theta_polar)
    omega = polar_table.body.polar()
    return omega.point_at(0.5 * (np.asarray(lo) + np.asarray(hi)))


def lobachevsky_horizontal(polar_table: TrigTable, lam: float, sign: int, x0: float,
                           theta_polar0: float, T: float, n_samples: int = 1001) -> LobachevskyGeodesic:
    """Horizontal geodesic on the polar table scaled by lam, rotated by sign and shifted by x0."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    s = 1 if sign >= 0 else -1
    c0 = float(polar_table.cos(theta_polar0))
    if s * c0 <= 0.0:
        raise HalfPlaneError("the starting polar angle maps to y <= 0")
    t = np.linspace(0.0, float(T), max(int(n_samples), 2))
    flow: FlowResult = integrate_flow(polar_table, lambda q: -q[..., 0], float(theta_polar0), t,
                                      closed_form=_linear_rate_solution)
    th = flow.theta
    Q = polar_table.cos_sin(th)
    x = x0 - s * lam * Q[:, 1]
    y = s * lam * Q[:, 0]
    keep = y > 0.0
    u = _controls(polar_table, th)
    return LobachevskyGeodesic("horizontal", t[keep], x[keep], y[keep], u[keep], th[keep],
                               {"lam": float(lam), "sign": s, "x0": float(x0)}, flow.fixed)


def support_set(body: ConvexBody, direction: int) -> tuple[np.ndarray, np.ndarray]:
    """End points (left, right as generalized-angle order) of the top (+1) or bottom (-1) support set."""
    pol = body.polar()
    phi = 0.5 * math.pi if direction > 0 else 1.5 * math.pi
    th_p = float(pol.angle_of(phi))
    lo, hi = pol.dual_lift(th_p)
    return body.point_at(float(lo)), body.point_at(float(hi))


def lobachevsky_vertical(body: ConvexBody, direction: int, x0: float, y0: float, T: float,
                         selection: Callable[[np.ndarray], np.ndarray] | None = None,
                         n_samples: int = 1001) -> LobachevskyGeodesic:
    """Vertical geodesic moving up (direction=+1) or down (-1).

    ``selection(t)`` returns controls of shape (len(t), 2) on the support set;
    the default is its midpoint.
    """
    if y0 <= 0:
        raise HalfPlaneError("y0 must be positive")
    d = 1 if direction >= 0 else -1
    A, B = support_set(body, d)
    if selection is None:
        mid = 0.5 * (A + B)
        selection = lambda s: np.broadcast_to(mid, (len(np.atleast_1d(s)), 2))  # noqa: E731
    h = float(A[1])
    t = np.linspace(0.0, float(T), max(int(n_samples), 2))

    def checked(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        u = np.asarray(selection(s), dtype=float).reshape(len(s), 2)
        lo, hi = min(A[0], B[0]), max(A[0], B[0])
        bad = (np.abs(u[:, 1] - h) > EDGE_TOL * (1 + abs(h))) | (u[:, 0] < lo - EDGE_TOL) | (u[:, 0] > hi + EDGE_TOL)
        if np.any(bad):
            raise ValueError("selection leaves the support set")
        return u

    u = checked(t)
    gx, gw = np.polynomial.legendre.leggauss(12)
    a, b = t[:-1], t[1:]
    nodes = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * gx[None, :]
    un = checked(nodes.ravel()).reshape(nodes.shape + (2,))
    inc = np.sum(gw[None, :] * np.exp(h * nodes) * un[..., 0], axis=1) * 0.5 * (b - a)
    x = x0 + y0 * np.concatenate([[0.0], np.cumsum(inc)])
    y = y0 * np.exp(h * t)
    kind = "vertical_up" if d > 0 else "vertical_down"
    return LobachevskyGeodesic(kind, t, x, y, u, None, {"x0": float(x0), "y0": float(y0), "u2": h})


def lobachevsky_geodesic(body: ConvexBody, x0: float, y0: float, p: float, q: float, T: float,
                         n_samples: int = 1001, resolution: int = 1024,
                         selection: Callable | None = None) -> LobachevskyGeodesic:
    """Geodesic through (x0, y0) with adjoint (p, q); dispatches on the sign of p."""
    if y0 <= 0:
        raise HalfPlaneError("y0 must be positive")
    if p == 0.0 and q == 0.0:
        raise ValueError("adjoint (p, q) must be nonzero")
    if p == 0.0:
        return lobachevsky_vertical(body, 1 if q > 0 else -1, x0, y0, T, selection, n_samples)
    h = np.array([p * y0, q * y0])
    H = float(body.support(h))
    pt = build_trig(body, resolution).polar_table
    _, th0 = pt.polar_decompose(h)
    lam = H / abs(p)
    s = 1 if p > 0 else -1
    shift = x0 + s * lam * float(pt.sin(th0))
    geo = lobachevsky_horizontal(pt, lam, s, shift, th0, T, n_samples)
    geo.params.update({"p": float(p), "q": float(q), "H": H})
    return geo
