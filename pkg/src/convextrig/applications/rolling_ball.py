"""Ball rolling on a plane without slipping or twisting, velocity of the contact point in Omega.

State: contact point (x, y), orientation quaternion z with z' = 1/2 z (u2 i - u1 j).
For H > 0 the vertical subsystem is theta°'' = -U'(theta°) on the polar table with

    U(Q) = 1/2 |Q|^2 - (p Q1 + q Q2) / H,      E_ball = H * (1/2 theta°'^2 + U),

and h3 = H theta°'.  H = 0 gives straight lines with u on the boundary of Omega
parallel to (p, q).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..convex_sets import ConvexBody
from ..convex_trig import TrigTable, build_trig
from ..ct_ode import ExtremalTrajectory, Potential, integrate, singular_control


def quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a0, a1, a2, a3 = np.moveaxis(np.asarray(a, dtype=float), -1, 0)
    b0, b1, b2, b3 = np.moveaxis(np.asarray(b, dtype=float), -1, 0)
    return np.stack([
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ], axis=-1)


def quat_exp_pure(v: np.ndarray) -> np.ndarray:
    """exp of the pure quaternion v1 i + v2 j + v3 k."""
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        return np.array([1.0, 0.0, 0.0, 0.0])
    return np.concatenate([[math.cos(n)], math.sin(n) * v / n])


@dataclass
class BallState:
    t: np.ndarray
    xy: np.ndarray
    z: np.ndarray
    p: float
    q: float
    H: float
    theta_polar: np.ndarray
    h3: np.ndarray
    u: np.ndarray
    energy: float
    vertical: ExtremalTrajectory | None = None
    info: dict = field(default_factory=dict)

    def columns(self) -> dict:
        return {
            "t": self.t, "x": self.xy[:, 0], "y": self.xy[:, 1],
            "z0": self.z[:, 0], "z1": self.z[:, 1], "z2": self.z[:, 2], "z3": self.z[:, 3],
            "theta_polar": self.theta_polar, "h3": self.h3, "u1": self.u[:, 0], "u2": self.u[:, 1],
        }

    def norm_drift(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.z, axis=1) - 1.0)))


def ball_vertical_potential(polar_table: TrigTable, p: float, q: float, H: float) -> Potential:
    """U(theta°) = 1/2 |Q|^2 - (p, q).Q / H with Q the polar boundary point."""
    if not H > 0:
        raise ValueError("H must be positive for the normal vertical subsystem")
    return Potential.from_quadratic(polar_table, np.eye(2), (-p / H, -q / H), label="ball")


def ball_energy(polar_table: TrigTable, p: float, q: float, H: float, theta_polar, theta_polar_dot):
    """E = 1/2 H (theta°'^2 + |Q|^2) - p Q1 - q Q2."""
    Q = polar_table.cos_sin(theta_polar)
    v = np.asarray(theta_polar_dot, dtype=float)
    return 0.5 * H * (v ** 2 + Q[..., 0] ** 2 + Q[..., 1] ** 2) - p * Q[..., 0] - q * Q[..., 1]


def edge_singular_controls(polar_table: TrigTable, p: float, q: float, H: float) -> list[dict]:
    """Corner angles of the polar body with their singular control (if the corner is stationary)."""
    pot = ball_vertical_potential(polar_table, p, q, H)
    out = []
    for c in polar_table.breakpoints:
        if not pot.is_stationary(float(c)):
            continue
        kind, u = singular_control(pot, float(c))
        out.append({"theta_polar": float(c), "kind": kind, "u": None if u is None else np.asarray(u),
                    "energy": float(H * pot.U(float(c)))})
    return out


def _roll(t: np.ndarray, u_mid: np.ndarray, z0, xy0) -> tuple[np.ndarray, np.ndarray]:
    z = np.empty((len(t), 4))
    xy = np.empty((len(t), 2))
    z[0] = np.asarray(z0, dtype=float) / np.linalg.norm(z0)
    xy[0] = xy0
    for k in range(len(t) - 1):
        dt = t[k + 1] - t[k]
        m = u_mid[k]
        step = quat_exp_pure(0.5 * dt * np.array([m[1], -m[0], 0.0]))
        w = quat_mul(z[k], step)
        z[k + 1] = w / np.linalg.norm(w)
        xy[k + 1] = xy[k] + dt * m
    return z, xy


def _interval_controls(table: TrigTable, tr: ExtremalTrajectory) -> np.ndarray:
    th, v, t = tr.theta_polar, tr.theta_polar_dot, tr.t
    dt = np.diff(t)
    mid = 0.5 * (th[:-1] + th[1:]) + (v[:-1] - v[1:]) * dt / 8.0
    lo, hi = table.body.dual_lift(mid)
    u = table.body.polar().point_at(0.5 * (lo + hi))
    rest = tr.stationary[:-1] & tr.stationary[1:]
    if np.any(rest):
        u[rest] = tr.u[:-1][rest]
    return u


def ball_integrate(body: ConvexBody, p: float, q: float, H: float, theta_polar0: float, h3_0: float,
                   T: float, branch_policy="stay", n_samples: int = 1001, resolution: int = 1024,
                   selection: Callable | None = None, z0=(1.0, 0.0, 0.0, 0.0), xy0=(0.0, 0.0),
                   polar_table: TrigTable | None = None) -> BallState:
    """Normal (H > 0) or abnormal (H = 0) extremal of the rolling ball."""
    if H < 0:
        raise ValueError("H must be non-negative")
    t_grid = np.linspace(0.0, float(T), max(int(n_samples), 2))
    if H == 0:
        if p == 0 and q == 0:
            raise ValueError("abnormal extremals need (p, q) != 0")
        u0 = body.point_at(body.angle_of(math.atan2(q, p)))
        u = np.broadcast_to(u0, (len(t_grid), 2)).copy()
        z, xy = _roll(t_grid, u[:-1], z0, xy0)
        nan = np.full(len(t_grid), np.nan)
        return BallState(t_grid, xy, z, p, q, 0.0, nan, np.zeros(len(t_grid)), u, 0.0,
                         info={"mode": "abnormal"})
    if polar_table is None:
        polar_table = build_trig(body, resolution).polar_table
    pot = ball_vertical_potential(polar_table, p, q, H)
    tr = integrate(pot, theta_polar0, h3_0 / H, T, branch_policy, n_samples, recover=True, selection=selection)
    z, xy = _roll(tr.t, _interval_controls(polar_table, tr), z0, xy0)
    E = H * tr.energy
    return BallState(tr.t, xy, z, p, q, H, tr.theta_polar, H * tr.theta_polar_dot, tr.u, E, tr,
                     {"mode": "normal", "events": tr.events, "branch": tr.branch})
