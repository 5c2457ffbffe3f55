"""Time-optimal plane motion with drift:  x'' = u in Omega.

The adjoints are p (constant) and q(t) = q0 - p t.  Writing q = R (cos°, sin°)
on the polar table gives the first integral E = p1 q2 - p2 q1 and

    E theta°' = (p2 cos° - p1 sin°)^2,

so theta° follows an autonomous scalar flow; the control is the boundary point
of Omega dual to theta°.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..convex_sets import ConvexBody
from ..convex_trig import TrigTable, build_trig
from ._flow import FlowResult, integrate_flow


@dataclass
class PlaneDynState:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    p: np.ndarray
    q: np.ndarray
    E: float
    R: np.ndarray
    theta_polar: np.ndarray
    info: dict = field(default_factory=dict)

    def columns(self) -> dict:
        return {"t": self.t, "x1": self.x[:, 0], "x2": self.x[:, 1], "y1": self.y[:, 0], "y2": self.y[:, 1],
                "u1": self.u[:, 0], "u2": self.u[:, 1], "q1": self.q[:, 0], "q2": self.q[:, 1],
                "R": self.R, "theta_polar": self.theta_polar}


def _closed_piece(p):
    p1, p2 = float(p[0]), float(p[1])

    def solve(P_a, D, x0, x_end, direction, E):
        k0 = p2 * P_a[0] - p1 * P_a[1]
        k1 = p2 * D[0] - p1 * D[1]
        w0 = k0 + k1 * x0
        if w0 == 0.0:
            return None
        if abs(k1) <= 1e-15:
            rate = k0 * k0 / E
            tau = (x_end - x0) / rate
            return (lambda s: x0 + rate * s), (tau if tau > 0 else math.inf)
        we = k0 + k1 * x_end
        tau = (1.0 / w0 - 1.0 / we) * E / k1 if we != 0.0 and we * w0 > 0 else math.inf
        if not tau > 0:
            tau = math.inf
        return (lambda s: (w0 / (1.0 - k1 * w0 * s / E) - k0) / k1), tau

    return solve


def plane_theta_flow(polar_table: TrigTable, p, q0, t: np.ndarray) -> FlowResult:
    """theta°(t) from E theta°' = (p2 cos° - p1 sin°)^2 for E != 0."""
    p = np.asarray(p, dtype=float)
    q0 = np.asarray(q0, dtype=float)
    E = float(p[0] * q0[1] - p[1] * q0[0])
    if E == 0.0:
        raise ValueError("the scalar flow needs E != 0")
    _, th0 = polar_table.polar_decompose(q0)
    solve = _closed_piece(p)

    def rate(Q):
        return (p[1] * Q[..., 0] - p[0] * Q[..., 1]) ** 2 / E

    return integrate_flow(polar_table, rate, float(th0), t,
                          closed_form=lambda Pa, D, x0, xe, d: solve(Pa, D, x0, xe, d, E))


def _controls(polar_table: TrigTable, theta_polar) -> np.ndarray:
    lo, hi = polar_table.corresponding_angles(np.asarray(theta_polar, dtype=float))
    return polar_table.body.polar().point_at(0.5 * (np.asarray(lo) + np.asarray(hi)))


def plane_dyn_extremal(body: ConvexBody | None, p, q0, T: float, x0=(0.0, 0.0), y0=(0.0, 0.0),
                       n_samples: int = 1001, resolution: int = 1024,
                       polar_table: TrigTable | None = None) -> PlaneDynState:
    """Extremal with adjoints p (constant) and q(0) = q0 over [0, T]."""
    p = np.asarray(p, dtype=float).reshape(2)
    q0 = np.asarray(q0, dtype=float).reshape(2)
    pt = polar_table if polar_table is not None else build_trig(body, resolution).polar_table
    t = np.linspace(0.0, float(T), max(int(n_samples), 2))
    q = q0[None, :] - t[:, None] * p[None, :]
    E = float(p[0] * q0[1] - p[1] * q0[0])
    info: dict = {}
    if E != 0.0:
        flow = plane_theta_flow(pt, p, q0, t)
        theta_polar = flow.theta
        ufun = lambda s: _controls(pt, flow.theta_at(s))  # noqa: E731
        cuts = sorted({s.t0 for s in flow.segments} | {s.t1 for s in flow.segments if math.isfinite(s.t1)})
        info["mode"] = "rotating"
    elif not np.any(p):
        if not np.any(q0):
            u0 = np.zeros(2)
            theta_polar = np.full(len(t), np.nan)
            info["mode"] = "undetermined"
        else:
            _, th = pt.polar_decompose(q0)
            u0 = _controls(pt, th)
            theta_polar = np.full(len(t), float(th))
            info["mode"] = "constant"
        ufun = lambda s, c=u0: np.broadcast_to(c, (np.size(s), 2))  # noqa: E731
        cuts = []
    else:
        t0 = float(q0 @ p / (p @ p))
        _, th_before = pt.polar_decompose(p)
        _, th_after = pt.polar_decompose(-p)
        ub, ua = _controls(pt, th_before), _controls(pt, th_after)
        theta_polar = np.where(t < t0, th_before, th_after)

        def ufun(s):
            s = np.asarray(s, dtype=float).ravel()
            return np.where((s < t0)[:, None], ub, ua)

        cuts = [t0]
        info.update({"mode": "two_valued", "t0": t0, "theta_polar_values": (float(th_before), float(th_after))})
    u = ufun(t)
    xs, ys = _integrate_motion(t, ufun, cuts, np.asarray(x0, dtype=float), np.asarray(y0, dtype=float))
    R = np.asarray(pt.body.gauge(q))
    return PlaneDynState(t, xs, ys, np.asarray(u, dtype=float).reshape(len(t), 2), np.broadcast_to(p, q.shape).copy(),
                         q, E, R, np.asarray(theta_polar, dtype=float), info)


def _integrate_motion(t, ufun, cuts, x0, y0, n_nodes: int = 10):
    """y' = u, x' = y with Gauss-Legendre between samples, splitting at control jumps."""
    gx, gw = np.polynomial.legendre.leggauss(n_nodes)
    cuts = np.asarray([c for c in cuts if t[0] < c < t[-1]])
    xs = np.empty((len(t), 2))
    ys = np.empty((len(t), 2))
    xs[0], ys[0] = x0, y0
    bounds = []
    for a, b in zip(t[:-1], t[1:]):
        inner = cuts[(cuts > a) & (cuts < b)] if len(cuts) else []
        e = np.concatenate([[a], inner, [b]])
        bounds.append(e)
    sub_a = np.concatenate([e[:-1] for e in bounds])
    sub_b = np.concatenate([e[1:] for e in bounds])
    owner = np.concatenate([np.full(len(e) - 1, k) for k, e in enumerate(bounds)])
    mid, half = 0.5 * (sub_a + sub_b), 0.5 * (sub_b - sub_a)
    nodes = mid[:, None] + half[:, None] * gx[None, :]
    un = np.asarray(ufun(nodes.ravel()), dtype=float).reshape(nodes.shape + (2,))
    ends = t[1:][owner]
    dy = np.einsum("n,snc->sc", gw, un) * half[:, None]
    dx = np.einsum("n,sn,snc->sc", gw, ends[:, None] - nodes, un) * half[:, None]
    DY = np.zeros((len(t) - 1, 2))
    DX = np.zeros((len(t) - 1, 2))
    np.add.at(DY, owner, dy)
    np.add.at(DX, owner, dx)
    for k in range(len(t) - 1):
        dt = t[k + 1] - t[k]
        ys[k + 1] = ys[k] + DY[k]
        xs[k + 1] = xs[k] + ys[k] * dt + DX[k]
    return xs, ys
