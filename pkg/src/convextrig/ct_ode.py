"""The second-order inclusion  theta_pol'' in -U'(theta_pol).

``U(theta_pol) = f(cos_B theta_pol, sin_B theta_pol)`` where ``B`` is the body
whose trig table drives the equation (the polar of the control set in the
control problems).  ``U'`` is interval valued at corners of ``B``.

Integration is event driven.  The line is cut at the singular angles of the
table; on each piece the right-hand side is single valued.  Linear pieces
with a quadratic ``f`` are solved in closed form; everything else uses an
embedded Dormand-Prince 5(4) stepper with projection onto the energy level.
Stationary points are classified and handled by a branch policy.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize

from .convex_trig import TrigTable

ATOL = 1e-10
RTOL = 1e-10


class BranchingError(RuntimeError):
    """A branch point was reached while the policy forbids choosing a branch."""

    def __init__(self, message: str, t: float = float("nan"), theta_polar: float = float("nan")):
        super().__init__(message)
        self.t = t
        self.theta_polar = theta_polar


class IndeterminatePointError(BranchingError):
    """Stationary point whose neighbourhood could not be classified."""


class IntegrationStallError(RuntimeError):
    """The stepper stopped making progress before the horizon."""


class InadmissibleDirectionError(ValueError):
    """Requested departure side does not admit a finite-time exit."""


class InconsistentTrajectoryError(ValueError):
    """Energy residual of a trajectory is too large to recover controls."""


# ---------------------------------------------------------------------------
# Potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticForm:
    """f(x) = 1/2 x.K.x + g.x + c on the covector plane."""

    K: np.ndarray
    g: np.ndarray = field(default_factory=lambda: np.zeros(2))
    c: float = 0.0

    def __post_init__(self):
        K = np.asarray(self.K, dtype=float).reshape(2, 2)
        object.__setattr__(self, "K", 0.5 * (K + K.T))
        object.__setattr__(self, "g", np.asarray(self.g, dtype=float).reshape(2))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * np.einsum("...i,ij,...j->...", x, self.K, x) + x @ self.g + self.c

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.K + self.g


@dataclass(eq=False)
class Potential:
    """U(theta) = f(point of the table body at theta)."""

    table: TrigTable
    f: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    quadratic: QuadraticForm | None = None
    label: str = ""

    @classmethod
    def from_quadratic(cls, table: TrigTable, K, g=(0.0, 0.0), c: float = 0.0, label: str = "") -> "Potential":
        q = QuadraticForm(np.asarray(K, dtype=float), np.asarray(g, dtype=float), float(c))
        return cls(table, q.value, q.grad, q, label)

    def __post_init__(self):
        self._pieces: dict[int, tuple | None] = {}
        body = self.table.body
        P = self.table.period
        marks = [np.asarray(self.table.singular_angles(), dtype=float)]
        # angles dual to rough points of the polar body: U' is only Hoelder there
        pol = body.polar()
        rough_pol = pol.rough_angles()
        if len(rough_pol):
            lo, _ = pol.dual_lift(rough_pol)
            marks.append(np.mod(lo, P))
        b = np.unique(np.concatenate(marks)) if marks else np.array([])
        if len(b) > 1:
            keep = np.concatenate([[True], np.diff(b) > 1e-13 * P])
            b = b[keep]
            if P - b[-1] + b[0] <= 1e-13 * P:
                b = b[:-1]
        self.boundaries = b
        grid = np.linspace(0.0, P, 513)
        self.scale = float(max(1.0, np.max(np.abs(self.U(grid)))))
        self._corner_exact = set(np.round(self.table.breakpoints, 12).tolist())

    # -- evaluation ---------------------------------------------------------
    @property
    def period(self) -> float:
        return self.table.period

    def U(self, theta):
        return self.f(self.table.body.point_at(theta))

    def Uprime(self, theta):
        """One-sided derivatives (U'(theta - 0), U'(theta + 0))."""
        q, pl, ph = self.table.body.frame(theta)
        g = self.grad(q)
        left = -g[..., 0] * pl[..., 1] + g[..., 1] * pl[..., 0]
        right = -g[..., 0] * ph[..., 1] + g[..., 1] * ph[..., 0]
        if np.ndim(left) == 0:
            return float(left), float(right)
        return left, right

    def Uprime_interval(self, theta) -> tuple[float, float]:
        lo, hi = self.Uprime(theta)
        return min(lo, hi), max(lo, hi)

    def accel(self, theta: float, side: int = 1) -> float:
        q, pl, ph = self.table.body.frame(np.array([theta]))
        p = ph[0] if side > 0 else pl[0]
        g = self.grad(q[0])
        return float(g[0] * p[1] - g[1] * p[0])

    def energy(self, theta, theta_dot):
        return 0.5 * np.asarray(theta_dot) ** 2 + self.U(theta)

    @property
    def deriv_tol(self) -> float:
        return 1e-10 * self.scale

    @property
    def energy_tol(self) -> float:
        return 1e-11 * self.scale

    def is_stationary(self, theta: float) -> bool:
        lo, hi = self.Uprime_interval(theta)
        return lo - self.deriv_tol <= 0.0 <= hi + self.deriv_tol

    # -- pieces -------------------------------------------------------------
    def piece(self, theta: float, direction: int) -> tuple[float, float, int]:
        """Piece (a, b) of the partition containing theta, leaning to ``direction``."""
        b = self.boundaries
        m = len(b)
        if m == 0:
            return -math.inf, math.inf, -1
        P = self.period
        tol = 1e-12 * (P + abs(theta))

        def B(j):
            return b[j % m] + (j // m) * P

        n = math.floor((theta - b[0]) / P)
        r = theta - b[0] - n * P
        j = int(np.searchsorted(b - b[0], r, side="right")) - 1 + n * m
        if direction < 0 and abs(theta - B(j)) <= tol:
            j -= 1
        elif direction >= 0 and abs(B(j + 1) - theta) <= tol:
            j += 1
        return float(B(j)), float(B(j + 1)), j % m

    def linear_coeffs(self, a: float, b: float, idx: int):
        """(u2, u1, u0) with U(a + x) = u2 x^2 + u1 x + u0 on a linear piece, else None."""
        if self.quadratic is None or idx < 0:
            return None
        if idx in self._pieces:
            return self._pieces[idx]
        body = self.table.body
        xs = np.array([0.0, 0.25, 0.5, 0.75, 1.0]) * (b - a) + a
        pts = body.point_at(xs)
        _, _, ph = body.frame(np.array([a + 0.5 * (b - a)]))
        D = np.array([-ph[0, 1], ph[0, 0]])
        lin = pts[0] + (xs - a)[:, None] * D
        result = None
        if np.max(np.abs(lin - pts)) <= 1e-12 * (1.0 + np.max(np.abs(pts))):
            Q = self.quadratic
            u2 = 0.5 * float(D @ Q.K @ D)
            u1 = float(Q.grad(pts[0]) @ D)
            u0 = float(Q.value(pts[0]))
            result = (u2, u1, u0)
        self._pieces[idx] = result
        return result

    def piece_length(self, theta: float, direction: int) -> float:
        a, b, _ = self.piece(theta, direction)
        return b - a


def energy(pot: Potential, theta_polar, theta_polar_dot):
    return pot.energy(theta_polar, theta_polar_dot)


# ---------------------------------------------------------------------------
# Stationary points
# ---------------------------------------------------------------------------


@dataclass
class StationaryInfo:
    theta_polar: float
    kind: str
    dynamics: str
    singular: str
    sides: dict
    convergent: dict
    exponents: dict
    confidence: str
    tau: dict
    control_point: np.ndarray | None = None

    @property
    def admissible_sides(self) -> list[int]:
        return [s for s in (-1, 1) if self.sides[s] == "lower" and self.convergent[s]]

    @property
    def branching(self) -> bool:
        return self.dynamics == "saddle_finite_time"


def _side_scale(pot: Potential, theta: float, side: int) -> float:
    a, b, _ = pot.piece(theta, side)
    span = (b - theta) if side > 0 else (theta - a)
    if not math.isfinite(span):
        span = pot.period / 8.0
    return min(span, pot.period / 8.0)


def _side_shape(pot: Potential, theta: float, side: int, d: float) -> str:
    tol_d = pot.deriv_tol
    if d * side > tol_d:
        return "higher"
    if d * side < -tol_d:
        return "lower"
    h = _side_scale(pot, theta, side)
    deltas = h * np.logspace(-1, -4, 7)
    dU = pot.U(theta + side * deltas) - pot.U(theta)
    tol = 1e-14 * pot.scale
    if np.all(dU < -tol):
        return "lower"
    if np.all(dU > tol):
        return "higher"
    if np.all(np.abs(dU) <= tol):
        return "flat"
    return "mixed"


def _power_fit(pot: Potential, theta: float, side: int) -> float:
    h = _side_scale(pot, theta, side)
    deltas = h * np.logspace(-2, -5, 7)
    drop = pot.U(theta) - pot.U(theta + side * deltas)
    if np.any(drop <= 0.0):
        return math.nan
    slope, _ = np.polyfit(np.log(deltas), np.log(drop), 1)
    return float(slope)


def _near_any(theta: float, angles: np.ndarray, period: float, tol: float) -> bool:
    if len(angles) == 0:
        return False
    r = np.mod(theta - angles + 0.5 * period, period) - 0.5 * period
    return bool(np.min(np.abs(r)) <= tol)


def _side_exponent(pot: Potential, theta: float, side: int, d: float) -> tuple[float, str]:
    """Order of the drop E - U ~ delta^k on a lower side and how it was decided."""
    from .convex_sets import Composite

    if abs(d) > pot.deriv_tol:
        return 1.0, "analytic"
    body = pot.table.body
    P = pot.period
    tol = 1e-9 * P
    composite = isinstance(body, Composite) or isinstance(getattr(body, "base", None), Composite)
    if not composite:
        if _near_any(theta, pot.table.rough_angles(), P, tol):
            q = pot.table.body.point_at(theta)
            if np.linalg.norm(pot.grad(q)) > pot.deriv_tol:
                return float(body.rough_exponent()), "analytic"
        elif pot.quadratic is not None or not _near_any(theta, pot.table.breakpoints, P, tol):
            # twice differentiable from this side
            return 2.0, "analytic"
    k = _power_fit(pot, theta, side)
    return k, "numeric"


def _tau(pot: Potential, theta: float, side: int, E: float) -> float:
    """Lower bound on the departure window: distance to the next level point over max speed."""
    P = pot.period
    xs = theta + side * np.linspace(0.0, 2.0 * P, 8193)[1:]
    U = pot.U(xs)
    above = np.nonzero(U >= E - 1e-14 * pot.scale)[0]
    if len(above) == 0:
        dist = 2.0 * P
        umin = float(np.min(U))
    else:
        k = above[0]
        dist = abs(xs[k] - theta)
        umin = float(np.min(U[: k + 1]))
    M = math.sqrt(2.0 * max(E - umin, 0.0))
    return dist / M if M > 0 else math.inf


def singular_control(pot: Potential, theta: float, bnd_tol: float = 1e-8):
    """Solve Q.u = 1, u x grad f = 0 at a stationary angle.

    Returns ``(kind, u)``: kind is ``general`` with the unique control point,
    ``special`` when grad f vanishes at a corner (free segment), or ``none``.
    """
    Q = pot.table.body.point_at(theta)
    g = pot.grad(Q)
    P = pot.period
    tol = 1e-9 * P
    on_sing = _near_any(theta, pot.table.singular_angles(), P, tol)
    corner = bool(pot.table.is_corner(theta))
    if np.linalg.norm(g) <= pot.deriv_tol:
        if corner or on_sing:
            return "special", None
        return "none", None
    M = np.array([[Q[0], Q[1]], [g[1], -g[0]]])
    det = np.linalg.det(M)
    if abs(det) <= 1e-12 * (1.0 + np.abs(M).max() ** 2):
        return "none", None
    u = np.linalg.solve(M, np.array([1.0, 0.0]))
    omega = pot.table.body.polar()
    if abs(omega.gauge(u) - 1.0) > bnd_tol:
        return "none", u
    if on_sing:
        return "general", u
    return "regular", u


def classify_stationary(pot: Potential, theta_polar: float) -> StationaryInfo:
    th = float(theta_polar)
    if not pot.is_stationary(th):
        return StationaryInfo(th, "not_stationary", "none", "none", {}, {}, {}, "analytic", {})
    dl, dr = pot.Uprime(th)
    sides = {-1: _side_shape(pot, th, -1, dl), 1: _side_shape(pot, th, 1, dr)}
    conv, expo, conf = {}, {}, "analytic"
    E = float(pot.U(th))
    tau = {}
    for s, d in ((-1, dl), (1, dr)):
        if sides[s] == "lower":
            k, how = _side_exponent(pot, th, s, d)
            expo[s] = k
            if how == "numeric":
                conf = "numeric"
                conv[s] = bool(k < 1.9) if math.isfinite(k) else False
                if math.isfinite(k) and abs(k - 2.0) < 0.2:
                    conf = "ambiguous"
            else:
                conv[s] = k < 2.0
            if conv[s]:
                tau[s] = _tau(pot, th, s, E)
        else:
            conv[s] = False
    if "mixed" in sides.values():
        dynamics = "indeterminate"
        conf = "ambiguous"
    elif all(v in ("higher", "flat") for v in sides.values()):
        dynamics = "center"
    elif any(conv.values()):
        dynamics = "saddle_finite_time"
    else:
        dynamics = "saddle_slow"
    sing, u = singular_control(pot, th)
    singular = sing if sing in ("general", "special") else "none"
    if dynamics == "saddle_finite_time":
        kind = "saddle_finite_time"
    elif singular == "special":
        kind = "special_singular"
    elif singular == "general":
        kind = "general_singular"
    else:
        kind = dynamics
    return StationaryInfo(th, kind, dynamics, singular, sides, conv, expo, conf, tau, u)


def stationary_points(pot: Potential, n_scan: int = 4096, start: float = 0.0) -> list[float]:
    """Stationary angles in [start, start + period): corners with 0 in U' and zeros of U'."""
    P = pot.period
    tolP = 1e-9 * P
    tol = pot.deriv_tol
    bnd = start + np.mod(pot.boundaries - start, P)
    xs = np.unique(np.concatenate([start + np.linspace(0.0, P, n_scan + 1), bnd, bnd + P]))
    xs = xs[xs <= start + P]
    dl, dr = pot.Uprime(xs)
    out: list[float] = []
    lo, hi = np.minimum(dl, dr), np.maximum(dl, dr)
    hit = (lo - tol <= 0.0) & (0.0 <= hi + tol)
    out.extend(xs[hit].tolist())
    for k in range(len(xs) - 1):
        a, b = xs[k], xs[k + 1]
        if hit[k] or hit[k + 1]:
            continue
        if dr[k] * dl[k + 1] < 0.0:
            r = optimize.brentq(lambda x: pot.Uprime(x)[1], a, b, xtol=1e-15, rtol=1e-15)
            out.append(float(r))
    out = sorted(x for x in out if x < start + P - tolP)
    merged: list[float] = []
    for x in out:
        if not merged or x - merged[-1] > tolP:
            merged.append(x)
        elif abs(pot.Uprime(x)[1]) < abs(pot.Uprime(merged[-1])[1]):
            merged[-1] = x
    return merged


# ---------------------------------------------------------------------------
# Branch policy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BranchPolicy:
    """What to do at a point where the solution may leave a saddle in finite time.

    ``mode`` is ``stay``, ``depart`` or ``fail``.  ``depart`` waits ``dwell``
    time units and then leaves to ``direction`` (+1 right, -1 left).  The
    policy applies to the first branch point met; later ones use ``later``.
    """

    mode: str = "stay"
    direction: int = 0
    dwell: float = 0.0
    later: str = "stay"

    def __post_init__(self):
        if self.mode not in ("stay", "depart", "fail"):
            raise ValueError(f"unknown branch mode {self.mode!r}")
        if self.mode == "depart" and self.direction not in (-1, 1):
            raise ValueError("departure needs direction +1 or -1")
        if self.dwell < 0:
            raise ValueError("dwell time must be non-negative")

    @classmethod
    def parse(cls, spec: "str | BranchPolicy | None") -> "BranchPolicy":
        if spec is None:
            return cls()
        if isinstance(spec, BranchPolicy):
            return spec
        s = spec.strip().lower().replace("_", "-")
        if s == "stay":
            return cls("stay")
        if s in ("fail-on-branch", "fail"):
            return cls("fail", later="fail")
        if s in ("depart-left", "depart-right"):
            return cls("depart", -1 if s.endswith("left") else 1)
        if s.startswith("dwell:"):
            parts = s.split(":")
            if len(parts) != 3 or parts[2] not in ("left", "right"):
                raise ValueError("dwell policy is 'dwell:<t>:<left|right>'")
            return cls("depart", -1 if parts[2] == "left" else 1, float(parts[1]))
        raise ValueError(f"unknown branch policy {spec!r}")


# ---------------------------------------------------------------------------
# Trajectory container
# ---------------------------------------------------------------------------


@dataclass
class ExtremalTrajectory:
    t: np.ndarray
    theta_polar: np.ndarray
    theta_polar_dot: np.ndarray
    energy: float
    stationary: np.ndarray
    events: list = field(default_factory=list)
    branch: dict = field(default_factory=dict)
    theta: np.ndarray | None = None
    u: np.ndarray | None = None
    arc_label: np.ndarray | None = None
    corner_touch: np.ndarray | None = None
    energy_residual: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.t)

    def columns(self) -> dict:
        return {
            "t": self.t,
            "theta_polar": self.theta_polar,
            "theta_polar_dot": self.theta_polar_dot,
            "theta": self.theta,
            "u1": None if self.u is None else self.u[:, 0],
            "u2": None if self.u is None else self.u[:, 1],
            "arc_label": self.arc_label,
            "energy_residual": self.energy_residual,
        }


# ---------------------------------------------------------------------------
# Closed-form motion on a linear piece:  x'' = -2 u2 x - u1
# ---------------------------------------------------------------------------


class _Quadratic1D:
    def __init__(self, u2: float, u1: float, x0: float, v0: float):
        self.u2, self.u1, self.x0, self.v0 = u2, u1, x0, v0
        k = 2.0 * u2
        self.k = k
        scale = abs(u1) + abs(k) + 1e-300
        if abs(k) <= 1e-14 * scale or k == 0.0:
            self.mode = "par"
        elif k > 0:
            self.mode = "trig"
            self.w = math.sqrt(k)
            self.xs = -u1 / k
            self.A = x0 - self.xs
            self.B = v0 / self.w
        else:
            self.mode = "hyp"
            self.w = math.sqrt(-k)
            self.xs = -u1 / k
            self.A = x0 - self.xs
            self.B = v0 / self.w

    def state(self, t):
        t = np.asarray(t, dtype=float)
        if self.mode == "par":
            return self.x0 + self.v0 * t - 0.5 * self.u1 * t * t, self.v0 - self.u1 * t
        wt = self.w * t
        if self.mode == "trig":
            c, s = np.cos(wt), np.sin(wt)
            return self.xs + self.A * c + self.B * s, self.w * (-self.A * s + self.B * c)
        ch, sh = np.cosh(wt), np.sinh(wt)
        return self.xs + self.A * ch + self.B * sh, self.w * (self.A * sh + self.B * ch)

    def _candidates(self, level: float) -> list[float]:
        if self.mode == "par":
            a, b, c = -0.5 * self.u1, self.v0, self.x0 - level
            if a == 0.0:
                return [] if b == 0.0 else [-c / b]
            disc = b * b - 4 * a * c
            if disc < 0:
                return []
            sq = math.sqrt(disc)
            q = -0.5 * (b + math.copysign(sq, b))
            roots = [q / a]
            if q != 0.0:
                roots.append(c / q)
            return roots
        d = level - self.xs
        if self.mode == "trig":
            R = math.hypot(self.A, self.B)
            if R == 0.0 or abs(d) > R:
                return []
            phi = math.atan2(self.B, self.A)
            psi = math.acos(max(-1.0, min(1.0, d / R)))
            out = []
            for base in (phi + psi, phi - psi):
                tt = math.fmod(base, 2 * math.pi)
                if tt < 0:
                    tt += 2 * math.pi
                out.extend([tt / self.w, (tt + 2 * math.pi) / self.w])
            return out
        A, B = self.A, self.B
        a2, b2, c2 = A + B, -2.0 * d, A - B
        roots = []
        if a2 == 0.0:
            if b2 != 0.0:
                roots = [-c2 / b2]
        else:
            disc = b2 * b2 - 4 * a2 * c2
            if disc >= 0:
                sq = math.sqrt(disc)
                q = -0.5 * (b2 + math.copysign(sq, b2))
                roots = [q / a2] + ([c2 / q] if q != 0.0 else [])
        return [math.log(s) / self.w for s in roots if s > 0]

    def hit(self, level: float, sign: int, tmin: float) -> float:
        """First t > tmin with x(t) = level and sign(v) = sign."""
        best = math.inf
        for t in self._candidates(level):
            if not (t > tmin and math.isfinite(t)):
                continue
            _, v = self.state(t)
            if v * sign > 0 and t < best:
                best = t
        return best

    def turn(self, toward: int, tmin: float) -> float:
        """First t > tmin where v = 0 at a maximum (toward=+1) or minimum (-1) of x."""
        if self.mode == "par":
            if self.u1 == 0.0:
                return math.inf
            t = self.v0 / self.u1
            ok = (self.u1 > 0) == (toward > 0)
            return t if (t > tmin and ok) else math.inf
        if self.mode == "trig":
            phi = math.atan2(self.B, self.A)
            base = phi if toward > 0 else phi + math.pi
            tt = math.fmod(base, 2 * math.pi)
            if tt < 0:
                tt += 2 * math.pi
            t = tt / self.w
            if t <= tmin:
                t += 2 * math.pi / self.w
            return t
        if self.A == 0.0 or abs(self.B) >= abs(self.A):
            return math.inf
        t = math.atanh(-self.B / self.A) / self.w
        is_max = self.A < 0
        return t if (t > tmin and is_max == (toward > 0)) else math.inf


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4)
# ---------------------------------------------------------------------------

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def _dp_step(acc, th: float, v: float, a0: float, h: float):
    """One Dormand-Prince step for th' = v, v' = acc(th). Returns new state, new accel, error norm."""
    kt = [v] + [0.0] * 6
    kv = [a0] + [0.0] * 6
    for i in range(1, 7):
        row = _A[i]
        st = th + h * sum(row[j] * kt[j] for j in range(i))
        sv = v + h * sum(row[j] * kv[j] for j in range(i))
        kt[i] = sv
        kv[i] = acc(st)
    th1 = th + h * sum(_A[6][j] * kt[j] for j in range(6))
    v1 = v + h * sum(_A[6][j] * kv[j] for j in range(6))
    et = h * sum(_E[j] * kt[j] for j in range(7))
    ev = h * sum(_E[j] * kv[j] for j in range(7))
    st = ATOL + RTOL * max(abs(th), abs(th1))
    sv = ATOL + RTOL * max(abs(v), abs(v1))
    err = math.sqrt(0.5 * ((et / st) ** 2 + (ev / sv) ** 2))
    return th1, v1, kv[6], err


# ---------------------------------------------------------------------------
# Motion next to a stationary point on its own energy level
# ---------------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _gauss(a: float, b: float, panels: int = 3):
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    return x, w


class _SingularLeg:
    """Travel time along x = c + side * delta with energy U(c), where U(c) - U ~ delta^kappa.

    The energy gap is built as an integral of U' so no cancellation occurs
    near c, and both integrals use delta = s^m with m = 2 / (2 - kappa),
    which turns the endpoint singularity into a smooth integrand.
    """

    def __init__(self, pot: Potential, c: float, side: int, kappa: float):
        if not kappa < 2.0:
            raise ValueError("leg needs a convergent approach exponent")
        self.pot, self.c, self.side = pot, c, side
        self.m = max(1.0, 2.0 / (2.0 - kappa))
        self.inner = _gauss(0.0, 1.0, 2)

    def gap(self, delta) -> np.ndarray:
        """2 (U(c) - U(c + side * delta)) evaluated without cancellation."""
        d = np.atleast_1d(np.asarray(delta, dtype=float))
        r, w = self.inner
        m = self.m
        y = d[:, None] * r[None, :] ** m
        dU = self.pot.Uprime(self.c + self.side * y)[1 if self.side > 0 else 0]
        jac = d[:, None] * m * r[None, :] ** (m - 1.0)
        return np.maximum(-2.0 * self.side * np.sum(dU * jac * w[None, :], axis=1), 0.0)

    def _resolvable(self) -> float:
        # below this offset c + delta carries a relative position error above ~1e-7
        return 1e-9 * (abs(self.c) + 1.0)

    def time(self, delta: float) -> float:
        if delta <= 0.0:
            return 0.0
        dmin = self._resolvable()
        if delta < 100.0 * dmin:
            # leading-order scaling from the smallest well-resolved leg
            ref = 100.0 * dmin
            return self.time(ref) * (delta / ref) ** (1.0 / self.m)
        m = self.m
        r, w = _gauss(0.0, 1.0, 6)
        d = delta * r**m
        g = self.gap(d)
        jac = delta * m * r ** (m - 1.0)
        ok = (d >= dmin) & (g > 0)
        vals = np.zeros_like(g)
        vals[ok] = jac[ok] / np.sqrt(g[ok])
        if not np.all(ok):
            # the transformed integrand is smooth in r: extrapolate it inward
            r0 = r[ok][0]
            fit = ok & (r <= 4.0 * r0)
            if np.count_nonzero(fit) < 4:
                fit = np.nonzero(ok)[0][:6]
            coef = np.polyfit(r[fit], vals[fit], 3)
            vals[~ok] = np.polyval(coef, r[~ok])
        return float(np.sum(vals * w))

    def invert(self, tau: float, delta_max: float) -> float:
        if tau <= 0.0:
            return 0.0
        if self.time(delta_max) <= tau:
            return delta_max
        return optimize.brentq(lambda d: self.time(d) - tau, 0.0, delta_max, xtol=1e-16, rtol=1e-15)


# ---------------------------------------------------------------------------
# Integrator
# ---------------------------------------------------------------------------


class _Recorder:
    def __init__(self, grid: np.ndarray):
        self.grid = grid
        self.k = 0  # next grid index to fill
        self.t: list[float] = []
        self.th: list[float] = []
        self.v: list[float] = []
        self.rest: list[bool] = []

    def pending(self, t_end: float) -> np.ndarray:
        """Grid times in [current, t_end] still to be filled."""
        j = int(np.searchsorted(self.grid, t_end, side="right"))
        return self.grid[self.k : j]

    def push_grid(self, th, v, rest: bool = False):
        th = np.atleast_1d(th)
        v = np.atleast_1d(v)
        n = len(th)
        ts = self.grid[self.k : self.k + n]
        self.t.extend(ts.tolist())
        self.th.extend(th.tolist())
        self.v.extend(v.tolist())
        self.rest.extend([rest] * n)
        self.k += n

    def push_event(self, t: float, th: float, v: float, rest: bool = False):
        if self.t and abs(self.t[-1] - t) <= 1e-14 * (1 + abs(t)):
            if rest:
                self.rest[-1] = True
                self.v[-1] = v
            return
        self.t.append(t)
        self.th.append(th)
        self.v.append(v)
        self.rest.append(rest)


class _Integrator:
    def __init__(self, pot: Potential, policy: BranchPolicy, n_samples: int):
        self.pot = pot
        self.policy = policy
        self.n_samples = n_samples
        self.branch_used = False
        self.events: list[dict] = []
        self.branch: dict = {}
        self._cls_cache: dict[float, StationaryInfo] = {}

    def classify(self, th: float) -> StationaryInfo:
        key = round(th, 13)
        if key not in self._cls_cache:
            self._cls_cache[key] = classify_stationary(self.pot, th)
        return self._cls_cache[key]

    def run(self, th0: float, v0: float, T: float) -> ExtremalTrajectory:
        if not (T > 0 and math.isfinite(T)):
            raise ValueError("horizon must be positive and finite")
        pot = self.pot
        grid = np.linspace(0.0, T, self.n_samples)
        rec = _Recorder(grid)
        self.E = float(pot.energy(th0, v0))
        t, th, v = 0.0, float(th0), float(v0)
        self.tolE = pot.energy_tol * (1.0 + abs(self.E) / pot.scale)
        self.vtol = math.sqrt(2.0 * self.tolE) * 10.0
        rec.push_grid(th, v) if grid[0] == 0.0 else None
        guard = 0
        while t < T:
            guard += 1
            if guard > 200000:
                raise IntegrationStallError("too many events before the horizon")
            if abs(v) <= self.vtol:
                v = 0.0
                if pot.is_stationary(th):
                    t, th, v, done = self._at_rest(rec, t, th, T)
                    if done:
                        break
                    continue
                dl, dr = pot.Uprime(th)
                direction = 1 if dr < 0 else -1
                if dr < 0 and dl > 0:
                    direction = 1 if abs(dr) >= abs(dl) else -1
            else:
                direction = 1 if v > 0 else -1
            t_new, th, v = self._advance(rec, t, th, v, direction, T)
            if t_new <= t and t_new < T:
                raise IntegrationStallError(f"no progress at t={t}")
            t = t_new
        rec.push_event(T, th, v) if (rec.t and rec.t[-1] < T - 1e-14 * T) else None
        order = np.argsort(np.asarray(rec.t), kind="stable")
        tr = ExtremalTrajectory(
            t=np.asarray(rec.t)[order],
            theta_polar=np.asarray(rec.th)[order],
            theta_polar_dot=np.asarray(rec.v)[order],
            energy=self.E,
            stationary=np.asarray(rec.rest, dtype=bool)[order],
            events=self.events,
            branch=self.branch,
        )
        return tr

    # -- rest handling ------------------------------------------------------
    def _dwell(self, rec: _Recorder, t: float, th: float, t_end: float):
        pend = rec.pending(t_end)
        rec.push_event(t, th, 0.0, rest=True)
        rec.push_grid(np.full(len(pend), th), np.zeros(len(pend)), rest=True)
        if t_end < rec.grid[-1]:
            rec.push_event(t_end, th, 0.0, rest=True)

    def _at_rest(self, rec: _Recorder, t: float, th: float, T: float):
        info = self.classify(th)
        pol = BranchPolicy.parse(self.policy.later) if self.branch_used else self.policy
        if info.dynamics == "indeterminate":
            raise IndeterminatePointError(
                f"stationary point at theta_polar={th:.17g} could not be classified", t, th)
        if info.dynamics != "saddle_finite_time":
            self.events.append({"t": t, "kind": "rest", "theta_polar": th, "type": info.kind})
            self._dwell(rec, t, th, T)
            return T, th, 0.0, True
        if pol.mode == "fail":
            raise BranchingError(f"branch point reached at t={t:.17g}, theta_polar={th:.17g}", t, th)
        if pol.mode == "stay":
            self.events.append({"t": t, "kind": "branch_stay", "theta_polar": th})
            self._dwell(rec, t, th, T)
            return T, th, 0.0, True
        if pol.direction not in info.admissible_sides:
            raise InadmissibleDirectionError(
                f"direction {pol.direction:+d} is not admissible at theta_polar={th:.17g}")
        self.branch_used = True
        t_dep = t + pol.dwell
        self.branch = {"t_arrive": t, "dwell": pol.dwell, "t_depart": min(t_dep, T), "direction": pol.direction,
                       "theta_polar": th, "tau": info.tau.get(pol.direction, math.nan)}
        self.events.append({"t": t, "kind": "branch_depart", "theta_polar": th, "dwell": pol.dwell,
                            "direction": pol.direction})
        if t_dep >= T:
            self._dwell(rec, t, th, T)
            return T, th, 0.0, True
        if pol.dwell > 0:
            self._dwell(rec, t, th, t_dep)
        t2, th2, v2 = self._depart(rec, t_dep, th, pol.direction, T)
        return t2, th2, v2, t2 >= T

    def _depart(self, rec: _Recorder, t: float, th: float, side: int, T: float):
        """Leave a stationary point at rest toward ``side``."""
        pot = self.pot
        a, b, idx = pot.piece(th, side)
        if pot.linear_coeffs(a, b, idx) is not None:
            return self._advance(rec, t, th, 0.0, side, T)
        acc = pot.accel(th, side)
        if acc * side > pot.deriv_tol:
            return self._advance(rec, t, th, 0.0, side, T)
        # zero force: leave along the energy level through a short quadrature window
        info = self.classify(th)
        leg = _SingularLeg(pot, th, side, info.exponents[side])
        end = b if side > 0 else a
        span = min(abs(end - th), pot.period / 8.0)
        xs = th + side * span * np.linspace(0.0, 1.0, 257)[1:]
        bad = np.nonzero(self.E - pot.U(xs) <= 0.0)[0]
        if len(bad):
            span = abs(xs[bad[0]] - th)
        eps = 1e-2 * span
        t_end = t + leg.time(eps)
        pend = rec.pending(min(t_end, T))
        pend = pend[pend > t]
        if len(pend):
            ds = np.array([leg.invert(tt - t, eps) for tt in pend])
            rec.push_grid(th + side * ds, side * np.sqrt(leg.gap(ds)))
        if t_end >= T:
            d = leg.invert(T - t, eps)
            return T, th + side * d, side * float(np.sqrt(leg.gap(d))[0])
        target = th + side * eps
        v = side * float(np.sqrt(leg.gap(eps))[0])
        rec.push_event(t_end, target, v)
        return t_end, target, v

    # -- motion on one piece ------------------------------------------------
    def _advance(self, rec, t, th, v, direction, T):
        pot = self.pot
        a, b, idx = pot.piece(th, direction)
        coeffs = pot.linear_coeffs(a, b, idx)
        if coeffs is not None:
            return self._advance_closed(rec, t, th, v, a, b, coeffs, T)
        return self._advance_rk(rec, t, th, v, a, b, direction, T)

    def _snap_ok(self, c: float) -> bool:
        """Energy sits on the level of the endpoint c."""
        return math.isfinite(c) and abs(self.E - float(self.pot.U(c))) <= self.tolE

    def _advance_closed(self, rec, t, th, v, a, b, coeffs, T):
        u2, u1, u0 = coeffs
        L = b - a
        x0 = th - a
        # keep the energy exactly consistent with the local polynomial
        Uloc = lambda x: u2 * x * x + u1 * x + u0
        gap = 2.0 * (self.E - Uloc(x0))
        if v != 0.0 and gap > 0:
            v = math.copysign(math.sqrt(gap), v)
        sol = _Quadratic1D(u2, u1, x0, v)
        tmin = 1e-15
        cands = []
        t_r = sol.hit(L, 1, tmin)
        t_l = sol.hit(0.0, -1, tmin)
        cands.append((t_r, "exit", 1))
        cands.append((t_l, "exit", -1))
        for c, side in ((L, 1), (0.0, -1)):
            if abs(self.E - Uloc(c)) <= self.tolE:
                slope = 2 * u2 * c + u1
                if slope * side > self.pot.deriv_tol:
                    tt = sol.turn(side, tmin)
                    if math.isfinite(tt):
                        xt, _ = sol.state(tt)
                        if abs(float(xt) - c) <= 1e-6 * (1.0 + L):
                            cands.append((tt, "arrive", side))
        t_ev, kind, side = min(cands, key=lambda z: z[0])
        t_stop = min(t + t_ev, T)
        pend = rec.pending(t_stop)
        pend = pend[pend > t]
        if len(pend):
            xs, vs = sol.state(pend - t)
            xs = np.clip(xs, 0.0, L)
            rec.push_grid(a + xs, vs)
        if t + t_ev > T:
            x_T, v_T = sol.state(T - t)
            return T, a + float(x_T), float(v_T)
        c_th = b if side > 0 else a
        if kind == "arrive":
            self.events.append({"t": t + t_ev, "kind": "arrive", "theta_polar": c_th})
            rec.push_event(t + t_ev, c_th, 0.0)
            return t + t_ev, c_th, 0.0
        _, v_e = sol.state(t_ev)
        v_e = float(v_e)
        self.events.append({"t": t + t_ev, "kind": "corner", "theta_polar": c_th, "theta_polar_dot": v_e})
        rec.push_event(t + t_ev, c_th, v_e)
        return t + t_ev, c_th, v_e

    def _advance_rk(self, rec, t, th, v, a, b, direction, T):
        pot = self.pot
        E = self.E
        mid = 0.5 * (a + b) if math.isfinite(a) and math.isfinite(b) else th
        acc = lambda x: pot.accel(x, 1 if x <= mid else -1)
        span = (b - a) if math.isfinite(b - a) else pot.period
        legs = {1: self._arrival_leg(b, -1), -1: self._arrival_leg(a, 1)}
        window = 1e-2 * min(span, pot.period)
        a0 = acc(th)
        h = min(1e-2, 0.01 * span / (abs(v) + 1.0))
        grid = rec.grid
        while True:
            # arrival window at a stationary end on the energy level
            for sd, c in ((1, b), (-1, a)):
                if legs[sd] is not None and v * sd > 0 and abs(c - th) <= window:
                    return self._arrive(rec, legs[sd], t, abs(c - th), T)
            nxt = grid[rec.k] if rec.k < len(grid) else T
            h_try = min(h, nxt - t, T - t)
            if h_try <= 0:
                if rec.k < len(grid) and nxt <= t:
                    rec.push_grid(th, v)
                    continue
                return T, th, v
            th1, v1, a1, err = _dp_step(acc, th, v, a0, h_try)
            if err > 1.0 or not math.isfinite(err):
                h = h_try * max(0.2, 0.9 * err ** -0.2) if math.isfinite(err) else 0.1 * h_try
                if h < 1e-14 * (1 + t):
                    raise IntegrationStallError(f"step size underflow at t={t}")
                continue
            # piece boundary crossing
            out_r = math.isfinite(b) and th1 > b
            out_l = math.isfinite(a) and th1 < a
            if out_r or out_l:
                c = b if out_r else a
                tau = self._locate(acc, th, v, a0, h_try, c)
                thc, vc, _, _ = _dp_step(acc, th, v, a0, tau)
                gap = max(2.0 * (E - float(pot.U(c))), 0.0)
                vc = math.copysign(math.sqrt(gap), vc)
                tc = t + tau
                pend = rec.pending(tc)
                pend = pend[pend > t]
                for tt in pend:
                    x, vx, _, _ = _dp_step(acc, th, v, a0, tt - t)
                    rec.push_grid(min(max(x, a), b), vx)
                if abs(vc) <= self.vtol:
                    vc = 0.0
                    self.events.append({"t": tc, "kind": "arrive", "theta_polar": c})
                else:
                    self.events.append({"t": tc, "kind": "corner", "theta_polar": c, "theta_polar_dot": vc})
                rec.push_event(tc, c, vc)
                return tc, c, vc
            # energy projection away from turning points
            gap = 2.0 * (E - float(pot.U(th1)))
            if gap > 1e-6 * pot.scale and v1 != 0.0:
                v1 = math.copysign(math.sqrt(gap), v1)
            t_new = t + h_try
            landed = rec.k < len(grid) and abs(t_new - grid[rec.k]) <= 1e-13 * (1 + t_new)
            if landed:
                t_new = float(grid[rec.k])
                rec.push_grid(th1, v1)
            clipped = h_try < h
            t, th, v, a0 = t_new, th1, v1, a1
            fac = min(5.0, max(0.2, 0.9 * err**-0.2)) if err > 0 else 5.0
            h = max(h, h_try * fac) if clipped else h_try * fac
            if t >= T:
                return T, th, v

    def _arrival_leg(self, c: float, side: int):
        """Leg from c outward on ``side`` if the motion reaches c in finite time at rest."""
        if not self._snap_ok(c) or not self.pot.is_stationary(c):
            return None
        info = self.classify(c)
        k = info.exponents.get(side)
        if info.sides.get(side) != "lower" or k is None or not k < 2.0:
            return None
        return _SingularLeg(self.pot, c, side, k)

    def _arrive(self, rec, leg: _SingularLeg, t: float, dist: float, T: float):
        t_rem = leg.time(dist)
        t_arr = t + t_rem
        pend = rec.pending(min(t_arr, T))
        pend = pend[pend > t]
        toward = -leg.side
        if len(pend):
            ds = np.array([leg.invert(t_arr - tt, dist) for tt in pend])
            rec.push_grid(leg.c + leg.side * ds, toward * np.sqrt(leg.gap(ds)))
        if t_arr >= T:
            d = leg.invert(t_arr - T, dist)
            return T, leg.c + leg.side * d, toward * float(np.sqrt(leg.gap(d))[0])
        self.events.append({"t": t_arr, "kind": "arrive", "theta_polar": leg.c})
        rec.push_event(t_arr, leg.c, 0.0)
        return t_arr, leg.c, 0.0

    @staticmethod
    def _locate(acc, th, v, a0, h, c) -> float:
        f = lambda s: _dp_step(acc, th, v, a0, s)[0] - c
        fa, fb = th - c, f(h)
        if fa == 0.0:
            return 0.0
        if fa * fb > 0:
            return h
        return optimize.brentq(f, 0.0, h, xtol=1e-15, rtol=1e-15)


def integrate(
    pot: Potential,
    theta_polar0: float,
    theta_polar1: float,
    T: float,
    branch_policy: "str | BranchPolicy | None" = "stay",
    n_samples: int = 1001,
    recover: bool = True,
    selection: Callable | None = None,
) -> ExtremalTrajectory:
    """Integrate the inclusion from (theta_polar0, theta_polar1) over [0, T]."""
    policy = BranchPolicy.parse(branch_policy)
    tr = _Integrator(pot, policy, max(int(n_samples), 2)).run(float(theta_polar0), float(theta_polar1), float(T))
    if recover:
        recover_control(pot, tr, selection)
    return tr


def branch_enumerate(pot: Potential, theta_polar0: float, dwell: float, direction: int, T: float,
                     n_samples: int = 1001, later: str = "stay") -> ExtremalTrajectory:
    """Solution that rests at a finite-time saddle for ``dwell`` and then departs to ``direction``."""
    info = classify_stationary(pot, theta_polar0)
    if info.dynamics != "saddle_finite_time":
        raise InadmissibleDirectionError(f"theta_polar={theta_polar0} is not a finite-time saddle ({info.kind})")
    if direction not in info.admissible_sides:
        raise InadmissibleDirectionError(f"direction {direction:+d} is not admissible")
    policy = BranchPolicy("depart", direction, float(dwell), later)
    return integrate(pot, theta_polar0, 0.0, T, policy, n_samples)


# ---------------------------------------------------------------------------
# Control recovery
# ---------------------------------------------------------------------------


def recover_control(pot: Potential, traj: ExtremalTrajectory, selection: Callable | None = None,
                    residual_tol: float = 1e-6) -> ExtremalTrajectory:
    """Fill theta, u, arc labels and energy residuals of a trajectory.

    ``selection(t)`` returns fractions in [0, 1] used on special singular
    arcs (0 = lower end of the corner interval); default 1/2.
    """
    table = pot.table
    th_p = traj.theta_polar
    res = np.abs(pot.energy(th_p, traj.theta_polar_dot) - traj.energy)
    traj.energy_residual = res
    if np.max(res, initial=0.0) > residual_tol * (1.0 + abs(traj.energy)):
        raise InconsistentTrajectoryError(f"energy residual {np.max(res):.3e} exceeds tolerance")
    lo, hi = table.body.dual_lift(th_p)
    theta = lo.copy()
    labels = np.full(len(th_p), "bang", dtype=object)
    touch = (hi - lo) > table.corner_tol
    omega = table.body.polar()
    Pw = omega.period
    rest = traj.stationary
    if np.any(rest):
        groups: dict[float, list[int]] = {}
        for i in np.nonzero(rest)[0]:
            groups.setdefault(round(float(th_p[i]), 12), []).append(i)
        for _, idx in groups.items():
            idx = np.asarray(idx)
            th0 = float(th_p[idx[0]])
            kind, u = singular_control(pot, th0)
            l0, h0 = lo[idx[0]], hi[idx[0]]
            if kind == "special":
                if selection is None:
                    frac = np.full(len(idx), 0.5)
                else:
                    frac = np.asarray(selection(traj.t[idx]), dtype=float) * np.ones(len(idx))
                    if np.any((frac < 0) | (frac > 1)):
                        raise ValueError("selection must return fractions in [0, 1]")
                theta[idx] = l0 + frac * (h0 - l0)
                labels[idx] = "special_singular"
            elif kind in ("general", "regular") and u is not None:
                ang = float(omega.angle_of(math.atan2(u[1], u[0])))
                ang += Pw * round((0.5 * (l0 + h0) - ang) / Pw)
                theta[idx] = min(max(ang, l0), h0)
                labels[idx] = "general_singular" if kind == "general" else "bang"
            touch[idx] = False
    traj.theta = theta
    traj.u = omega.point_at(theta)
    traj.arc_label = labels
    traj.corner_touch = touch
    return traj


def quadrature_time(pot: Potential, E: float, a: float, b: float) -> float:
    """Time to move monotonically from a to b on the energy level E: integral of 1/sqrt(2(E-U)).

    Ends that are stationary points on the level E are handled by the
    substitution used for singular legs; the rest goes to adaptive quadrature.
    """
    if a == b:
        return 0.0
    lo, hi = min(a, b), max(a, b)
    total = 0.0
    tol = pot.energy_tol * (1.0 + abs(E) / pot.scale)
    w = 1e-2 * (hi - lo)
    for end, side in ((lo, 1), (hi, -1)):
        if abs(E - float(pot.U(end))) <= tol and pot.is_stationary(end):
            info = classify_stationary(pot, end)
            k = info.exponents.get(side)
            if k is not None and k < 2.0:
                total += _SingularLeg(pot, end, side, k).time(w)
                if side > 0:
                    lo += w
                else:
                    hi -= w

    def g(x):
        gap = 2.0 * (E - float(pot.U(x)))
        return 1.0 / math.sqrt(gap) if gap > 0 else 0.0

    edges = [lo] + _marks_between(pot, lo, hi) + [hi]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for x0, x1 in zip(edges[:-1], edges[1:]):
            val, _ = sp_integrate.quad(g, x0, x1, limit=400, epsabs=1e-14, epsrel=1e-13)
            total += val
    return total


def _marks_between(pot: Potential, lo: float, hi: float) -> list[float]:
    b = pot.boundaries
    if len(b) == 0:
        return []
    P = pot.period
    out = []
    k0 = math.floor((lo - b[-1]) / P)
    k1 = math.floor((hi - b[0]) / P) + 1
    for k in range(k0, k1 + 1):
        for c in b:
            x = c + k * P
            if lo < x < hi:
                out.append(float(x))
    return sorted(out)
