"""Yacht problems on R^2 x (R / 2S):  x' = u1 cos_Omega(theta), y' = u1 sin_Omega(theta), theta' = u2.

Four cost/constraint choices: elastica (u1 = 1, cost u2^2/2), markov_dubins
(u1 = 1, |u2| <= 1), reeds_shepp (|u1|, |u2| <= 1) and sr_se2 (cost |u|^2/2).

With (psi1, psi2) = (cos a, sin a) the body is rotated clockwise by a; on the
rotated body the vertical subsystem reads psi3' = u1 sin°(theta~°).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate as sp_integrate
from scipy.optimize import brentq

from ..convex_sets import ConvexBody, rotate
from ..convex_trig import TrigTable, angle_integrals, build_trig
from ..ct_ode import ExtremalTrajectory, Potential, integrate

PROBLEMS = ("elastica", "markov_dubins", "reeds_shepp", "sr_se2")
LEVEL_TOL = 1e-12


class AdmissibilityError(ValueError):
    """Raised when H is below the admissible range for the chosen initial angle."""


@dataclass
class YachtSpec:
    problem: str
    body: ConvexBody
    psi1: float = 1.0
    psi2: float = 0.0
    resolution: int = 1024
    # the factorized/non-factorized choice only matters for optimality, which is not asserted
    non_factorized: bool = False

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ValueError(f"unknown problem {self.problem!r}; expected one of {PROBLEMS}")

    @property
    def degenerate(self) -> bool:
        return self.psi1 == 0.0 and self.psi2 == 0.0


@dataclass
class YachtReduction:
    alpha: float
    body: ConvexBody
    polar: ConvexBody
    alpha_tilde: float
    alpha_tilde_polar: float
    table: TrigTable
    base_table: TrigTable

    @property
    def S(self) -> float:
        return self.table.S

    def cos_tilde_from_base(self, theta) -> np.ndarray:
        """cos of the rotated body at theta - alpha~, evaluated on the original body."""
        P = self.base_table.cos_sin(theta)
        return P[..., 0] * math.cos(self.alpha) + P[..., 1] * math.sin(self.alpha)


def yacht_reduce(spec: YachtSpec, base_table: TrigTable | None = None) -> YachtReduction:
    """Rotate the body clockwise by alpha = atan2(psi2, psi1) and compute the angle shifts."""
    if spec.degenerate:
        raise ValueError("(psi1, psi2) must be nonzero for the rotation reduction")
    alpha = math.atan2(spec.psi2, spec.psi1)
    body = spec.body
    rot = rotate(body, -alpha) if alpha != 0.0 else body
    table = build_trig(rot, spec.resolution)
    base = base_table if base_table is not None else build_trig(body, spec.resolution)
    return YachtReduction(alpha, rot, rot.polar(), float(body.angle_of(alpha)),
                          float(body.polar().angle_of(alpha)), table, base)


def rotation_identity_residual(body: ConvexBody, theta, alpha) -> float:
    """Max residual of the angle-sum identities for cos and sin at the given (theta, alpha) pairs."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    worst = 0.0
    for a in np.unique(alpha):
        sel = alpha == a
        rot = rotate(body, -float(a))
        P = body.point_at(theta[sel])
        Q = rot.point_at(theta[sel] - float(body.angle_of(float(a))))
        lhs_c = P[:, 0] * math.cos(a) + P[:, 1] * math.sin(a)
        lhs_s = P[:, 1] * math.cos(a) - P[:, 0] * math.sin(a)
        worst = max(worst, float(np.max(np.abs(lhs_c - Q[:, 0]))), float(np.max(np.abs(lhs_s - Q[:, 1]))))
    return worst


# ---------------------------------------------------------------------------
# Critical angles of cos on the rotated body
# ---------------------------------------------------------------------------


@dataclass
class CriticalAngles:
    """Lifted so that theta3 <= theta4 < theta5 < theta1 <= theta2 < theta6 < theta3 + 2S."""

    m1: float
    m2: float
    theta1: float
    theta2: float
    theta3: float
    theta4: float
    theta5: float
    theta6: float
    period: float

    def as_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in ("m1", "m2", "theta1", "theta2", "theta3", "theta4", "theta5", "theta6")}


def _lift_above(x: float, ref: float, P: float) -> float:
    return x + P * math.ceil((ref - x) / P) if x <= ref else x - P * math.floor((x - ref) / P)


def critical_angles(red: YachtReduction) -> CriticalAngles:
    body, pol = red.body, red.polar
    P = red.table.period
    m2 = float(body.support(np.array([1.0, 0.0])))
    m1 = -float(body.support(np.array([-1.0, 0.0])))
    lo3, hi4 = pol.dual_lift(float(pol.angle_of(0.0)))
    th3, th4 = float(lo3), float(hi4)
    lo1, hi2 = pol.dual_lift(float(pol.angle_of(math.pi)))
    th1 = _lift_above(float(lo1), th4, P)
    if th1 <= th4:
        th1 += P
    th2 = th1 + float(hi2 - lo1)
    th5 = _lift_above(float(body.angle_of(0.5 * math.pi)), th4, P)
    th6 = _lift_above(float(body.angle_of(1.5 * math.pi)), th2, P)
    return CriticalAngles(m1, m2, th1, th2, th3, th4, th5, th6, P)


def _branch_root(table: TrigTable, level: float, a: float, b: float) -> float:
    """Root of cos = level on a monotone branch [a, b] (clamped to the ends)."""
    fa, fb = float(table.cos(a)) - level, float(table.cos(b)) - level
    if abs(fa) <= LEVEL_TOL:
        return a
    if abs(fb) <= LEVEL_TOL:
        return b
    if fa * fb > 0:
        raise AdmissibilityError(f"level {level} is not attained on [{a}, {b}]")
    return float(brentq(lambda x: float(table.cos(x)) - level, a, b, xtol=1e-15, rtol=1e-15, maxiter=200))


def level_angles(red: YachtReduction, crit: CriticalAngles, level: float) -> tuple[float, float]:
    """(root on the decreasing branch [theta4, theta1], root on the increasing branch [theta2, theta3 + 2S])."""
    if not (crit.m1 - LEVEL_TOL <= level <= crit.m2 + LEVEL_TOL):
        raise AdmissibilityError(f"cos of the rotated body never equals {level}")
    if abs(level - crit.m2) <= LEVEL_TOL:
        return crit.theta4, crit.theta3 + crit.period
    if abs(level - crit.m1) <= LEVEL_TOL:
        return crit.theta1, crit.theta2
    dec = _branch_root(red.table, level, crit.theta4, crit.theta1)
    inc = _branch_root(red.table, level, crit.theta2, crit.theta3 + crit.period)
    return dec, inc


def _near(x: float, y: float, scale: float = 1.0) -> bool:
    return abs(x - y) <= 1e-10 * max(1.0, abs(scale))


def yacht_classify(spec: YachtSpec, H: float | None = None, red: YachtReduction | None = None) -> dict:
    """Regime report: case number, m1, m2, critical angles and the pattern times of the case."""
    red = red or yacht_reduce(spec)
    crit = critical_angles(red)
    P = crit.period
    rep = {"problem": spec.problem, "alpha": red.alpha, "alpha_tilde": red.alpha_tilde,
           "alpha_tilde_polar": red.alpha_tilde_polar, "S": red.S, **crit.as_dict()}
    if H is None:
        return rep
    m1, m2 = crit.m1, crit.m2
    rep["H"] = float(H)
    times: dict = {}
    if spec.problem in ("elastica", "markov_dubins"):
        if H < m1 and not _near(H, m1):
            case = 1
        elif _near(H, m1):
            case = 2
        elif H < m2 and not _near(H, m2):
            case = 3
            dec, inc = level_angles(red, crit, H)
            rep["theta_H_minus"], rep["theta_H_plus"] = dec, inc
            if spec.problem == "markov_dubins":
                times["T1"] = inc - dec
        elif _near(H, m2):
            case = 4
            if spec.problem == "markov_dubins":
                times["T1"] = crit.theta3 + P - crit.theta4
        else:
            case = 5
    elif spec.problem == "reeds_shepp":
        lo, hi = min(-m1, m2), max(-m1, m2)
        if H < 0:
            case = 0
        elif _near(H, 0.0):
            case = 1
        elif H < lo and not _near(H, lo):
            case = 2
            pdec, pinc = level_angles(red, crit, H)
            ndec, ninc = level_angles(red, crit, -H)
            rep.update({"theta_pH_plus": pdec, "theta_pH_minus": pinc - P,
                        "theta_mH_plus": ndec, "theta_mH_minus": ninc})
            times["T(1,1)"] = times["T(1,-1)"] = crit.theta5 - pdec
            times["T(-1,1)"] = times["T(-1,-1)"] = ndec - crit.theta5
        elif _near(H, lo):
            case = 3
        elif H < hi and not _near(H, hi):
            case = 4
            times["T3"] = crit.theta6 - crit.theta5
        elif _near(H, hi):
            case = 5
            times["T1"] = crit.theta3 + P - crit.theta6
            times["T2"] = crit.theta5 - crit.theta4
            times["T3"] = crit.theta6 - crit.theta5
        else:
            case = 6
            times["T+"] = crit.theta6 - crit.theta5
            times["T-"] = P - times["T+"]
    else:
        lo, hi = min(m1 * m1, m2 * m2), max(m1 * m1, m2 * m2)
        if H < 0:
            case = 0
        elif _near(H, 0.0):
            case = 1
        elif H < lo and not _near(H, lo):
            case = 2
        elif _near(H, lo):
            case = 3
        elif H < hi and not _near(H, hi):
            case = 4
        elif _near(H, hi):
            case = 5
        else:
            case = 6
    rep["case"] = case
    rep["times"] = {k: float(v) for k, v in times.items()}
    return rep


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------


@dataclass
class YachtTrajectory:
    problem: str
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    u: np.ndarray
    psi3: np.ndarray
    hamiltonian: np.ndarray
    H: float
    schedule: list = field(default_factory=list)
    vertical: ExtremalTrajectory | None = None
    report: dict = field(default_factory=dict)

    def columns(self) -> dict:
        return {"t": self.t, "x": self.x, "y": self.y, "theta": self.theta,
                "u1": self.u[:, 0], "u2": self.u[:, 1], "psi3": self.psi3, "hamiltonian": self.hamiltonian}

    def switch_times(self) -> np.ndarray:
        return np.array([e["t"] for e in self.schedule if e["label"] in ("switch_u1", "switch_u2")])


@dataclass
class _Piece:
    t0: float
    t1: float
    th0: float
    u1: float
    u2: float
    psi0: float


def _cos_integral(base: TrigTable, a: float, b: float) -> np.ndarray:
    return angle_integrals(base, a, b)


def _sample_pieces(pieces: list[_Piece], t: np.ndarray) -> np.ndarray:
    idx = np.searchsorted([p.t0 for p in pieces], t, side="right") - 1
    return np.clip(idx, 0, len(pieces) - 1)


def _accumulate(pieces: list[_Piece], t: np.ndarray, gain: Callable, init):
    """Sum gain(piece, tau0, tau1) from the start to every sample, one short hop at a time."""
    idx = _sample_pieces(pieces, t)
    out = [np.asarray(init, dtype=float)]
    acc = np.asarray(init, dtype=float)
    for j in range(1, len(t)):
        k0, k1 = idx[j - 1], idx[j]
        tau = t[j - 1] - pieces[k0].t0
        for k in range(k0, k1):
            pc = pieces[k]
            acc = acc + gain(pc, tau, pc.t1 - pc.t0)
            tau = 0.0
        acc = acc + gain(pieces[k1], tau, t[j] - pieces[k1].t0)
        out.append(acc)
    return np.array(out)


def _positions_piecewise(base: TrigTable, pieces: list[_Piece], t: np.ndarray, xy0) -> tuple[np.ndarray, np.ndarray]:
    """(x, y) and theta on the grid for piecewise-constant controls."""
    idx = _sample_pieces(pieces, t)
    theta = np.array([pieces[k].th0 + pieces[k].u2 * (tj - pieces[k].t0) for k, tj in zip(idx, t)])
    xy = _accumulate(pieces, t, lambda pc, a, b: _advance(base, pc, a, b), xy0)
    return xy, theta


def _advance(base: TrigTable, pc: _Piece, tau0: float, tau1: float) -> np.ndarray:
    if tau1 <= tau0:
        return np.zeros(2)
    if pc.u2 == 0.0:
        return pc.u1 * (tau1 - tau0) * base.cos_sin(pc.th0)
    return pc.u1 * angle_integrals(base, pc.th0 + pc.u2 * tau0, pc.th0 + pc.u2 * tau1) / pc.u2


def _positions_smooth(base: TrigTable, t, theta, theta_dot, speed: Callable, xy0) -> np.ndarray:
    """Integrate (x, y)' = u1 P(theta) with a cubic Hermite theta on each interval."""
    t = np.asarray(t)
    dt = np.diff(t)
    gx, gw = np.polynomial.legendre.leggauss(8)
    s = 0.5 * (gx + 1.0)
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    th = (theta[:-1, None] * h00 + dt[:, None] * theta_dot[:-1, None] * h10
          + theta[1:, None] * h01 + dt[:, None] * theta_dot[1:, None] * h11)
    P = base.cos_sin(th)
    v = speed(th)[..., None] * P
    inc = 0.5 * np.einsum("n,kni->ki", gw, v) * dt[:, None]
    return np.asarray(xy0, dtype=float) + np.vstack([np.zeros((1, 2)), np.cumsum(inc, axis=0)])


def _rough_marks(table: TrigTable) -> tuple[np.ndarray, np.ndarray]:
    """(all cut angles, cuts where the integrand is only Hoelder) for the dual-angle sine."""
    pol = table.body.polar()
    rough = np.asarray(table.rough_angles(), dtype=float)
    rp = pol.rough_angles()
    if len(rp):
        lo, _ = pol.dual_lift(rp)
        rough = np.concatenate([rough, np.mod(lo, table.period)])
    allc = np.unique(np.concatenate([np.asarray(table.breakpoints, dtype=float), rough]))
    return allc, np.unique(rough)


def _dual_sin(table: TrigTable, x):
    lo, hi = table.body.dual_lift(x)
    return table.body.polar().point_at(0.5 * (lo + hi))[..., 1]


def _dual_sin_integral(table: TrigTable, a: float, b: float, n_nodes: int = 16) -> float:
    """Integral over theta~ in [a, b] of sin of the polar body at the dual angle."""
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    P = table.period
    allc, rough = _rough_marks(table)

    def lifted(marks):
        out = []
        for c in marks:
            k0, k1 = math.floor((a - c) / P), math.ceil((b - c) / P)
            out.extend(c + k * P for k in range(k0, k1 + 1))
        return np.asarray(out)

    cuts = np.unique(np.concatenate([[a, b], [v for v in lifted(allc) if a < v < b]]))
    rl = lifted(rough)
    gx, gw = np.polynomial.legendre.leggauss(n_nodes)
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        near = len(rl) and np.min(np.abs(rl - lo)) < 1e-12 * P or len(rl) and np.min(np.abs(rl - hi)) < 1e-12 * P
        if near:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", sp_integrate.IntegrationWarning)
                val, _ = sp_integrate.quad(lambda x: float(_dual_sin(table, x)), lo, hi, limit=200,
                                           epsabs=1e-14, epsrel=1e-13)
            total += val
            continue
        m = max(1, int(math.ceil((hi - lo) / (P / 32.0))))
        e = np.linspace(lo, hi, m + 1)
        mid, half = 0.5 * (e[:-1] + e[1:]), 0.5 * np.diff(e)
        nodes = mid[:, None] + half[:, None] * gx[None, :]
        total += float(np.sum(_dual_sin(table, nodes) * gw[None, :] * half[:, None]))
    return sign * total


def _psi3_recomputed(red: YachtReduction, pieces: list[_Piece], t: np.ndarray, psi_init: float) -> np.ndarray:
    """psi3 from quadrature of psi3' = u1 sin°(theta~°) along the emitted controls."""
    return _accumulate(pieces, t, lambda pc, a, b: _psi_gain(red, pc, a, b), psi_init)


def _psi_gain(red: YachtReduction, pc: _Piece, tau0: float, tau1: float) -> float:
    if tau1 <= tau0:
        return 0.0
    a = pc.th0 - red.alpha_tilde
    if pc.u2 == 0.0:
        return pc.u1 * (tau1 - tau0) * float(_dual_sin(red.table, a))
    return pc.u1 * _dual_sin_integral(red.table, a + pc.u2 * tau0, a + pc.u2 * tau1) / pc.u2


def _initial_tilde(red: YachtReduction, theta0: float) -> float:
    return float(theta0) - red.alpha_tilde


def _ct_extremal(spec: YachtSpec, red: YachtReduction, H: float, theta0: float, direction: int, T: float,
                 n_samples: int, branch_policy, xy0) -> YachtTrajectory:
    if spec.problem == "elastica":
        pot = Potential.from_quadratic(red.table, np.zeros((2, 2)), (1.0, 0.0), label="elastica")
    else:
        pot = Potential.from_quadratic(red.table, np.diag([1.0, 0.0]), label="sr_se2")
    th_t0 = _initial_tilde(red, theta0)
    gap = H - float(pot.U(th_t0))
    if gap < -pot.energy_tol:
        raise AdmissibilityError(f"H={H} is below the potential {float(pot.U(th_t0))} at the initial angle")
    v0 = (1 if direction >= 0 else -1) * math.sqrt(max(2.0 * gap, 0.0))
    tr = integrate(pot, th_t0, v0, T, branch_policy, n_samples, recover=False)
    theta = tr.theta_polar + red.alpha_tilde
    ctil = red.cos_tilde_from_base(theta)
    if spec.problem == "elastica":
        u1 = np.ones_like(theta)
        Hrec = 0.5 * tr.theta_polar_dot ** 2 + ctil
        xy = _positions_smooth(red.base_table, tr.t, theta, tr.theta_polar_dot, lambda th: np.ones_like(th), xy0)
    else:
        u1 = ctil
        Hrec = 0.5 * (ctil ** 2 + tr.theta_polar_dot ** 2)
        xy = _positions_smooth(red.base_table, tr.t, theta, tr.theta_polar_dot, red.cos_tilde_from_base, xy0)
    u = np.column_stack([u1, tr.theta_polar_dot])
    rep = yacht_classify(spec, H, red)
    events = [{"t": float(e["t"]), "label": str(e["kind"])} for e in tr.events]
    rep["vertical_events"] = events
    return YachtTrajectory(spec.problem, tr.t, xy[:, 0], xy[:, 1], theta, u, tr.theta_polar_dot.copy(), Hrec,
                           H, [], tr, rep)


def _march(red: YachtReduction, crit: CriticalAngles, problem: str, H: float, th_t0: float, direction: int,
           T: float, dwell: float) -> tuple[list[_Piece], list[dict]]:
    """Piecewise-constant controls from angle differences on the rotated table."""
    P = crit.period
    c0 = float(red.table.cos(th_t0))
    rs = problem == "reeds_shepp"
    gap = H - (abs(c0) if rs else c0)
    if gap < -1e-10:
        raise AdmissibilityError(f"H={H} is below the admissible value at the initial angle")
    cands: list[tuple[float, str]] = []   # (position mod P, kind)
    levels = [(H, "psi")] + ([(-H, "psi")] if rs else [])
    for lev, kind in levels:
        if crit.m1 - LEVEL_TOL <= lev <= crit.m2 + LEVEL_TOL:
            touch = _near(lev, crit.m1) or _near(lev, crit.m2)
            dec, inc = level_angles(red, crit, lev)
            if touch and _near(lev, crit.m2):
                cands += [(crit.theta3 % P, "touch_lo"), (crit.theta4 % P, "touch_hi")]
            elif touch:
                cands += [(crit.theta1 % P, "touch_lo"), (crit.theta2 % P, "touch_hi")]
            else:
                cands += [(dec % P, kind), (inc % P, kind)]
    if rs:
        cands += [(crit.theta5 % P, "u1"), (crit.theta6 % P, "u1")]
    s = 1 if direction >= 0 else -1
    th = th_t0
    t = 0.0
    u1 = 1.0
    if rs:
        u1 = _sgn_cos(red.table, th + s * 1e-9 * P)
    pieces: list[_Piece] = []
    sched: list[dict] = []
    psi = s * max(gap, 0.0)
    static = abs(gap) <= 1e-10 and _stuck(crit, H, rs)
    if static:
        pieces.append(_Piece(0.0, math.inf, th + red.alpha_tilde, u1, 0.0, 0.0))
        return pieces, sched
    eps = 1e-12 * P
    for _ in range(100000):
        best, kind = math.inf, ""
        for pos, k in cands:
            d = ((pos - th) * s) % P
            if d <= eps:
                d += P
            if d < best:
                best, kind = d, k
        if rs:
            u1 = _sgn_cos(red.table, th + s * min(0.5 * best, 1e-6 * P))
        dur = best
        pieces.append(_Piece(t, t + dur, th + red.alpha_tilde, u1, float(s), psi))
        t += dur
        th += s * dur
        before = (u1, float(s))
        if t >= T:
            break
        if kind == "u1":
            u1n = -u1
            sched.append({"t": t, "u_before": before, "u_after": (u1n, float(s)), "label": "switch_u1"})
            u1 = u1n
            psi = s * (H - abs(float(red.table.cos(th)))) if rs else psi
        elif kind == "psi":
            sched.append({"t": t, "u_before": before, "u_after": (u1, float(-s)), "label": "switch_u2"})
            s = -s
            psi = 0.0
        else:
            if dwell > 0:
                pieces.append(_Piece(t, t + dwell, th + red.alpha_tilde, u1, 0.0, 0.0))
                sched.append({"t": t, "u_before": before, "u_after": (u1, 0.0), "label": "uncertain"})
                t += dwell
                if t >= T:
                    break
                sched.append({"t": t, "u_before": (u1, 0.0), "u_after": before, "label": "certain"})
            psi = 0.0
    return pieces, sched


def _stuck(crit: CriticalAngles, H: float, rs: bool) -> bool:
    # zero gap at the start on a level where psi3 cannot leave zero
    if rs:
        return _near(H, 0.0)
    return _near(H, crit.m1)


def _sgn_cos(table: TrigTable, th: float) -> float:
    return 1.0 if float(table.cos(th)) >= 0.0 else -1.0


def _degenerate(spec: YachtSpec, H: float, theta0: float, direction: int, T: float, n_samples: int,
                u1: float, xy0) -> YachtTrajectory:
    base = build_trig(spec.body, spec.resolution)
    s = 1.0 if direction >= 0 else -1.0
    if spec.problem in ("elastica", "sr_se2"):
        rate = s * math.sqrt(2.0 * max(H, 0.0))
    else:
        rate = s
    speed = 0.0 if spec.problem == "sr_se2" else (u1 if spec.problem == "reeds_shepp" else 1.0)
    t = np.linspace(0.0, float(T), max(int(n_samples), 2))
    pc = _Piece(0.0, math.inf, float(theta0), speed, rate, 0.0)
    xy, theta = _positions_piecewise(base, [pc], t, xy0)
    u = np.column_stack([np.full(len(t), speed), np.full(len(t), rate)])
    Hval = 0.5 * rate ** 2 if spec.problem in ("elastica", "sr_se2") else abs(rate)
    psi3 = np.full(len(t), rate if spec.problem in ("elastica", "sr_se2") else s * H)
    return YachtTrajectory(spec.problem, t, xy[:, 0], xy[:, 1], theta, u, psi3, np.full(len(t), Hval), Hval,
                           [], None, {"problem": spec.problem, "degenerate": True, "S": base.S})


def yacht_extremal(spec: YachtSpec, H: float, theta0: float = 0.0, direction: int = 1, T: float = 10.0,
                   n_samples: int = 1001, branch_policy="stay", dwell: float = 0.0, u1: float = 1.0,
                   xy0=(0.0, 0.0), red: YachtReduction | None = None) -> YachtTrajectory:
    """Extremal with maximized Hamiltonian H starting at heading theta0 (angle of the original body).

    ``direction`` picks the sign of psi3 (the initial turning direction).
    ``dwell`` is the time spent with u2 = 0 on each uncertain edge piece.
    """
    if spec.degenerate:
        return _degenerate(spec, H, theta0, direction, T, n_samples, u1, xy0)
    red = red or yacht_reduce(spec)
    crit = critical_angles(red)
    if spec.problem in ("elastica", "markov_dubins") and H < crit.m1 and not _near(H, crit.m1):
        raise AdmissibilityError(f"H={H} < m1={crit.m1}: no solutions")
    if spec.problem in ("reeds_shepp", "sr_se2") and H < 0:
        raise AdmissibilityError("H must be non-negative")
    if spec.problem in ("elastica", "sr_se2"):
        return _ct_extremal(spec, red, H, theta0, direction, T, n_samples, branch_policy, xy0)
    th_t0 = _initial_tilde(red, theta0)
    pieces, sched = _march(red, crit, spec.problem, H, th_t0, direction, T, dwell)
    t = np.linspace(0.0, float(T), max(int(n_samples), 2))
    xy, theta = _positions_piecewise(red.base_table, pieces, t, xy0)
    idx = np.clip(np.searchsorted([p.t0 for p in pieces], t, side="right") - 1, 0, len(pieces) - 1)
    u = np.array([[pieces[i].u1, pieces[i].u2] for i in idx])
    psi3 = _psi3_recomputed(red, pieces, t, pieces[0].psi0)
    ctil = red.cos_tilde_from_base(theta)
    Hrec = u[:, 0] * ctil + u[:, 1] * psi3
    rep = yacht_classify(spec, H, red)
    return YachtTrajectory(spec.problem, t, xy[:, 0], xy[:, 1], theta, u, psi3, Hrec, H, sched, None, rep)
