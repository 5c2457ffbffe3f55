"""Autonomous scalar flows theta' = F(cos theta, sin theta) on a trig table.

Both the Lobachevsky and the plane-dynamics extremals reduce to such a flow
on the polar table.  The flow is advanced piece by piece between singular
angles; a piece on which the boundary is a segment can be handed to a closed
form, everything else goes to DOP853 with boundary events.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from ..convex_trig import TrigTable

RTOL = 1e-12
ATOL = 1e-13


def piece_bounds(table: TrigTable, theta: float, direction: int) -> tuple[float, float]:
    """Lifted piece [a, b] between consecutive singular angles containing theta."""
    b = table.singular_angles()
    if len(b) == 0:
        return -math.inf, math.inf
    P = table.period
    m = len(b)
    tol = 1e-12 * (P + abs(theta))

    def B(j):
        return float(b[j % m] + (j // m) * P)

    n = math.floor((theta - b[0]) / P)
    r = theta - b[0] - n * P
    j = int(np.searchsorted(b - b[0], r, side="right")) - 1 + n * m
    if direction < 0 and abs(theta - B(j)) <= tol:
        j -= 1
    elif direction >= 0 and abs(B(j + 1) - theta) <= tol:
        j += 1
    return B(j), B(j + 1)


def linear_piece(table: TrigTable, a: float, b: float):
    """(P_a, D) with point(a + x) = P_a + x D on [a, b], or None if the arc is curved."""
    if not (math.isfinite(a) and math.isfinite(b)):
        return None
    body = table.body
    xs = np.array([0.0, 0.25, 0.5, 0.75, 1.0]) * (b - a) + a
    pts = body.point_at(xs)
    _, _, ph = body.frame(np.array([0.5 * (a + b)]))
    D = np.array([-ph[0, 1], ph[0, 0]])
    lin = pts[0] + (xs - a)[:, None] * D
    if np.max(np.abs(lin - pts)) <= 1e-12 * (1.0 + np.max(np.abs(pts))):
        return pts[0], D
    return None


@dataclass
class Segment:
    """Motion on one piece: theta(t) for t in [t0, t1]."""

    t0: float
    t1: float
    theta: Callable[[np.ndarray], np.ndarray]
    closed: bool


@dataclass
class FlowResult:
    t: np.ndarray
    theta: np.ndarray
    segments: list[Segment] = field(default_factory=list)
    fixed: bool = False

    def theta_at(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t)
        starts = np.array([s.t0 for s in self.segments])
        idx = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(self.segments) - 1)
        for k in np.unique(idx):
            sel = idx == k
            out[sel] = self.segments[k].theta(t[sel])
        return out


ClosedForm = Callable[[np.ndarray, np.ndarray, float, float, float], "tuple[Callable, float] | None"]


def integrate_flow(table: TrigTable, rate: Callable[[np.ndarray], np.ndarray], theta0: float,
                   t: np.ndarray, closed_form: ClosedForm | None = None,
                   rate_tol: float = 1e-14, max_pieces: int = 100000) -> FlowResult:
    """Integrate theta' = rate(point(theta)) from theta0 over the sample times t (t[0] = 0).

    ``closed_form(P_a, D, x0, x_end, dir)`` returns ``(x(tau), tau_exit)`` for
    the local coordinate x = theta - a on a linear piece, or None.
    """
    t = np.asarray(t, dtype=float)
    T = float(t[-1])
    body = table.body

    def F(th):
        return rate(body.point_at(th))

    th = float(theta0)
    r0 = float(F(np.array([th]))[0])
    if abs(r0) <= rate_tol:
        seg = Segment(0.0, math.inf, lambda s, c=th: np.full(np.shape(s), c), True)
        return FlowResult(t, np.full_like(t, th), [seg], fixed=True)
    segments: list[Segment] = []
    t_now = 0.0
    for _ in range(max_pieces):
        if t_now >= T:
            break
        probe = F(np.array([th]))[0]
        direction = 1 if probe > 0 else -1
        if abs(probe) <= rate_tol:
            # reached a fixed point exactly (only possible at a piece end)
            segments.append(Segment(t_now, math.inf, lambda s, c=th: np.full(np.shape(s), c), True))
            break
        a, b = piece_bounds(table, th, direction)
        target = b if direction > 0 else a
        seg = None
        lin = linear_piece(table, a, b) if closed_form is not None else None
        if lin is not None:
            got = closed_form(lin[0], lin[1], th - a, target - a, direction)
            if got is not None:
                xfun, tau_exit = got
                seg = Segment(t_now, t_now + tau_exit, lambda s, f=xfun, t0=t_now, a=a: a + f(np.asarray(s) - t0), True)
        if seg is None:
            seg = _rk_segment(F, t_now, th, target, direction, T)
        segments.append(seg)
        if not math.isfinite(seg.t1) or seg.t1 >= T:
            break
        t_now = seg.t1
        th = target
    res = FlowResult(t, np.empty_like(t), segments)
    res.theta = res.theta_at(t)
    return res


def _rk_segment(F, t0: float, th0: float, target: float, direction: int, T: float) -> Segment:
    def rhs(_, y):
        return [F(np.array([y[0]]))[0]]

    def hit(_, y):
        return y[0] - target

    hit.terminal = True
    hit.direction = direction
    sol = solve_ivp(rhs, (t0, T), [th0], method="DOP853", rtol=RTOL, atol=ATOL,
                    events=hit, dense_output=True)
    if sol.t_events[0].size:
        t1 = float(sol.t_events[0][0])
    else:
        t1 = math.inf
    dense = sol.sol

    def theta(s, d=dense, lo=t0, hi=float(sol.t[-1]), end=t1):
        s = np.asarray(s, dtype=float)
        v = d(np.clip(s, lo, hi))[0]
        if math.isfinite(end):
            v = np.where(s >= end, target, v)
        return v

    return Segment(t0, t1, theta, False)
