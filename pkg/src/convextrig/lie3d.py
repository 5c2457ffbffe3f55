"""Left-invariant time-optimal problems on three-dimensional unimodular Lie groups.

The algebra is normalized to

    [X1, X2] = X3,   [X3, X1] = a X2,   [X3, X2] = b X1

and the control ``u = u1 X1 + u2 X2`` ranges over a planar convex body.  With
``h1 = H cos_pol(th), h2 = H sin_pol(th), h3 = H th'`` the vertical system is
the inclusion ``th'' in -U'(th)`` for ``U = (a sin_pol^2 - b cos_pol^2) / 2``
driven by the polar body.  The Casimir ``C = (h3^2 - b h1^2 + a h2^2) / 2``
gives ``C / H = H * E`` where ``E`` is the energy of that inclusion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .convex_sets import Composite, ConvexBody, Disc, Ellipse, LpBall, Polygon, Transformed
from .convex_trig import TrigTable, build_trig
from .ct_ode import (
    ExtremalTrajectory,
    Potential,
    classify_stationary,
    integrate,
    recover_control,
    stationary_points,
)

ALGEBRAS = {
    (-1, 1): "sl2",
    (0, 1): "sh2",
    (1, 1): "sl2",
    (1, 0): "se2",
    (1, -1): "su2",
    (0, 0): "h3",
}

BOUNDARY_TOL = 1e-8
RANK_TOL = 1e-12


def _sign(x: float, tol: float = 1e-12) -> int:
    return 0 if abs(x) <= tol else (1 if x > 0 else -1)


def reduce_chi_kappa(chi: float, kappa: float) -> tuple[int, int, str]:
    """Normalized structure pair (a, b) and algebra tag for parameters (chi, kappa)."""
    if chi == 0.0 and kappa == 0.0:
        return 0, 0, "h3"
    if abs(chi * chi + kappa * kappa - 1.0) > 1e-9 or chi < 0.0:
        raise ValueError("expected chi^2 + kappa^2 = 1 with chi >= 0, or chi = kappa = 0")
    a, b = _sign(chi + kappa), _sign(chi - kappa)
    return a, b, ALGEBRAS[(a, b)]


@dataclass(eq=False)
class LieSpec:
    a: int
    b: int
    body: ConvexBody
    H: float = 1.0
    resolution: int = 1024

    def __post_init__(self):
        self.a, self.b = int(self.a), int(self.b)
        if (self.a, self.b) not in ALGEBRAS:
            raise ValueError(f"structure pair {(self.a, self.b)} is not a normalized unimodular case")
        if not (self.H > 0 and math.isfinite(self.H)):
            raise ValueError("Hamiltonian level H must be positive")

    @property
    def algebra(self) -> str:
        return ALGEBRAS[(self.a, self.b)]

    @cached_property
    def control_table(self) -> TrigTable:
        return build_trig(self.body, self.resolution)

    @cached_property
    def polar_table(self) -> TrigTable:
        """Table of the polar body; its angle is the vertical coordinate."""
        return self.control_table.polar_table

    @cached_property
    def potential(self) -> Potential:
        K = [[-float(self.b), 0.0], [0.0, float(self.a)]]
        return Potential.from_quadratic(self.polar_table, K, label=f"lie3d a={self.a} b={self.b}")


def vertical_potential(spec: LieSpec) -> Potential:
    """Potential of the vertical inclusion, normalized to H = 1.

    The group-level potential is ``H * U``; time is the same for every H.
    """
    return spec.potential


def lie_potential(spec: LieSpec, theta_polar):
    """Potential in Hamiltonian units, (H/2)(a sin^2 - b cos^2)."""
    return spec.H * np.asarray(spec.potential.U(theta_polar))


def covector(spec: LieSpec, theta_polar, theta_polar_dot) -> np.ndarray:
    """(h1, h2, h3) along a vertical trajectory."""
    q = spec.polar_table.cos_sin(np.asarray(theta_polar, dtype=float))
    h3 = spec.H * np.asarray(theta_polar_dot, dtype=float)
    return np.concatenate([spec.H * q, h3[..., None]], axis=-1)


def casimir(spec: LieSpec, h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    return 0.5 * (h[..., 2] ** 2 - spec.b * h[..., 0] ** 2 + spec.a * h[..., 1] ** 2)


# ---------------------------------------------------------------------------
# Singular extremals
# ---------------------------------------------------------------------------


@dataclass
class SingularInfo:
    kind: str  # none, general, special
    u: np.ndarray | None = None
    segment: tuple | None = None
    rank: int = 2


def _in_sing2(spec: LieSpec, theta_polar: float) -> bool:
    tab = spec.polar_table
    P = tab.period
    sing = tab.singular_angles()
    if len(sing) == 0:
        return False
    r = np.mod(theta_polar - sing + 0.5 * P, P) - 0.5 * P
    return bool(np.min(np.abs(r)) <= 1e-9 * P)


def singular_classify(spec: LieSpec, theta_polar: float) -> SingularInfo:
    """Solve A u = (1, 0) with A = [[c, s], [a s, b c]] and decide the singular type."""
    th = float(theta_polar)
    c, s = spec.polar_table.cos_sin(th)
    a, b = spec.a, spec.b
    A = np.array([[c, s], [a * s, b * c]])
    sing2 = _in_sing2(spec, th)
    if abs(np.linalg.det(A)) > RANK_TOL:
        u = np.linalg.solve(A, np.array([1.0, 0.0]))
        on_boundary = abs(float(spec.body.gauge(u)) - 1.0) <= BOUNDARY_TOL
        if on_boundary and sing2:
            return SingularInfo("general", u, rank=2)
        return SingularInfo("none", u if on_boundary else None, rank=2)
    if abs(a * s) <= RANK_TOL and abs(b * c) <= RANK_TOL and sing2:
        lo, hi = spec.polar_table.corresponding_angles(th)
        omega = spec.polar_table.polar_table.body
        ul, ur = omega.point_at(lo), omega.point_at(hi)
        return SingularInfo("special", None, (ul, ur), rank=1)
    return SingularInfo("none", None, rank=1)


# ---------------------------------------------------------------------------
# Phase portraits
# ---------------------------------------------------------------------------


@dataclass
class PhasePortrait:
    equilibria: list
    continua: list
    levels: dict
    branching: list
    profile: np.ndarray


def _equilibrium_record(spec: LieSpec, th: float) -> dict:
    info = classify_stationary(spec.potential, th)
    sing = singular_classify(spec, th)
    rec = {
        "theta_polar": th,
        "h3": 0.0,
        "type": info.kind,
        "dynamics": info.dynamics,
        "singular": sing.kind,
        "energy": spec.H * float(spec.potential.U(th)),
    }
    if info.dynamics == "saddle_finite_time":
        rec["admissible_sides"] = info.admissible_sides
        rec["tau"] = {int(k): float(v) for k, v in info.tau.items()}
    if sing.kind == "special":
        rec["type"] = "special_singular" if info.dynamics != "saddle_finite_time" else rec["type"]
        rec["segment"] = [np.asarray(x).tolist() for x in sing.segment]
    elif sing.kind == "general" and info.dynamics != "saddle_finite_time":
        rec["type"] = "general_singular"
    return rec


def equilibria(spec: LieSpec, n_scan: int = 4096) -> tuple[list, list]:
    """Isolated equilibria in one period and flat runs of equilibria (continua)."""
    pot = spec.potential
    P = pot.period
    pts = stationary_points(pot, n_scan=n_scan)
    step = P / n_scan
    runs: list[list[float]] = []
    for x in pts:
        if runs and x - runs[-1][-1] <= 1.01 * step:
            runs[-1].append(x)
        else:
            runs.append([x])
    if len(runs) > 1 and runs[0][0] + P - runs[-1][-1] <= 1.01 * step:
        runs[0] = runs.pop() + [x + P for x in runs[0]]
    isolated, continua = [], []
    for run in runs:
        if len(run) < 3:
            isolated.extend(run)
            continue
        # the ends of a flat run are the boundary points; the interior is a continuum
        isolated.extend([run[0], run[-1]])
        continua.append({"theta_polar_start": run[0], "theta_polar_end": run[-1], "type": "continuum"})
    isolated = sorted(set(float(np.mod(x, P)) for x in isolated))
    return [_equilibrium_record(spec, th) for th in isolated], continua


def level_curve(spec: LieSpec, energy: float, n: int = 2049) -> np.ndarray:
    """Points (theta_pol, h3) of the level C/H = energy over one period (both branches).

    Rows where the level does not reach are dropped.
    """
    pot = spec.potential
    th = np.linspace(0.0, pot.period, n)
    gap = 2.0 * (energy / spec.H - pot.U(th))
    ok = gap >= 0.0
    h3 = spec.H * np.sqrt(np.where(ok, gap, 0.0))
    upper = np.column_stack([th[ok], h3[ok]])
    lower = np.column_stack([th[ok][::-1], -h3[ok][::-1]])
    return np.vstack([upper, lower])


def phase_portrait(spec: LieSpec, energies=(), n_scan: int = 4096, n_profile: int = 513) -> PhasePortrait:
    eq, cont = equilibria(spec, n_scan)
    levels = {float(E): level_curve(spec, float(E)) for E in energies}
    branching = [
        {"theta_polar": r["theta_polar"], "mixed": r["singular"] != "none", "tau": r.get("tau", {}),
         "admissible_sides": r.get("admissible_sides", [])}
        for r in eq if r["dynamics"] == "saddle_finite_time"
    ]
    th = np.linspace(0.0, spec.potential.period, n_profile)
    profile = np.column_stack([th, lie_potential(spec, th)])
    return PhasePortrait(eq, cont, levels, branching, profile)


# ---------------------------------------------------------------------------
# Theorem-level taxonomy
# ---------------------------------------------------------------------------


def _family(body: ConvexBody) -> tuple[str, float | None]:
    while isinstance(body, Transformed):
        body = body.base
    if isinstance(body, Polygon):
        return "polygon", None
    if isinstance(body, LpBall):
        if body.is_polygon:
            return "polygon", None
        if body.p == 2.0:
            return "strictly_convex", None
        return "lp", body.p
    if isinstance(body, (Disc, Ellipse)):
        return "strictly_convex", None
    return "none", None


def predicted_taxonomy(spec: LieSpec) -> dict | None:
    fam, p = _family(spec.body)
    if fam == "polygon":
        return {"family": fam, "allowed": {"bang_bang", "singular", "mixed"}, "singular": None,
                "mixed": None, "nonuniqueness": None}
    if fam == "strictly_convex" or (fam == "lp" and p < 2.0):
        return {"family": fam, "allowed": {"bang"}, "singular": False, "mixed": False, "nonuniqueness": False}
    if fam == "lp":
        hit = spec.a == 1
        allowed = {"bang", "singular"} | ({"mixed"} if hit else set())
        return {"family": fam, "allowed": allowed, "singular": True, "mixed": hit, "nonuniqueness": hit}
    return None


def observed_taxonomy(spec: LieSpec, n_scan: int = 4096) -> dict:
    eq, _ = equilibria(spec, n_scan)
    cornered = len(spec.polar_table.breakpoints) > 0
    types = {"bang_bang" if cornered else "bang"}
    singular = any(r["singular"] != "none" for r in eq)
    finite = [r for r in eq if r["dynamics"] == "saddle_finite_time"]
    mixed = any(r["singular"] != "none" for r in finite)
    if singular:
        types.add("singular")
    if mixed:
        types.add("mixed")
    return {"types": types, "singular": singular, "mixed": mixed, "nonuniqueness": bool(finite),
            "equilibria": eq}


def extremal_type_report(spec: LieSpec, n_scan: int = 4096) -> dict:
    """Predicted taxonomy for the body family next to the one observed by a scan."""
    pred = predicted_taxonomy(spec)
    obs = observed_taxonomy(spec, n_scan)
    report = {"a": spec.a, "b": spec.b, "algebra": spec.algebra, "observed": obs}
    if pred is None:
        report.update(predicted=None, theorem="no theorem applies", agree=None)
        return report
    agree = obs["types"] <= pred["allowed"]
    for key in ("singular", "mixed", "nonuniqueness"):
        if pred[key] is not None:
            agree = agree and obs[key] == pred[key]
    report.update(predicted=pred, theorem=pred["family"], agree=bool(agree))
    return report


# ---------------------------------------------------------------------------
# Horizontal (group) motion
# ---------------------------------------------------------------------------


def representation(algebra: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Matrices X1, X2, X3 with the normalized commutators of the algebra."""
    if algebra == "su2":
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
        sz = np.array([[1, 0], [0, -1]], dtype=complex)
        return -0.5j * sx, -0.5j * sy, -0.5j * sz
    A = 0.5 * np.array([[1.0, 0.0], [0.0, -1.0]])
    B = 0.5 * np.array([[0.0, 1.0], [1.0, 0.0]])
    C = 0.5 * np.array([[0.0, 1.0], [-1.0, 0.0]])
    if algebra == "sl2-":
        return A, B, C
    if algebra == "sl2+":
        return C, A, -B
    E = lambda i, j: np.eye(3)[:, [i]] @ np.eye(3)[[j], :]
    if algebra == "se2":
        R = E(1, 0) - E(0, 1)
        return R, E(0, 2), E(1, 2)
    if algebra == "sh2":
        boost = E(0, 1) + E(1, 0)
        return E(0, 2), boost, -E(1, 2)
    if algebra == "h3":
        return E(0, 1), E(1, 2), E(0, 2)
    raise ValueError(f"unknown algebra tag {algebra!r}")


def _rep_key(spec: LieSpec) -> str:
    if spec.algebra == "sl2":
        return "sl2+" if spec.a == 1 else "sl2-"
    return spec.algebra


def project_group(key: str, M: np.ndarray) -> np.ndarray:
    """Pull a matrix back onto the group after round-off drift."""
    if key == "su2":
        W, _, Vh = np.linalg.svd(M)
        U = W @ Vh
        return U / np.sqrt(np.linalg.det(U))
    if key.startswith("sl2"):
        return M / math.sqrt(np.linalg.det(M))
    out = M.copy()
    out[2] = (0.0, 0.0, 1.0)
    if key == "se2":
        W, _, Vh = np.linalg.svd(M[:2, :2])
        out[:2, :2] = W @ Vh
    elif key == "sh2":
        c = 0.5 * (M[0, 0] + M[1, 1])
        s = 0.5 * (M[0, 1] + M[1, 0])
        r = math.sqrt(c * c - s * s)
        out[:2, :2] = np.array([[c, s], [s, c]]) / r
    elif key == "h3":
        out[0, 0] = out[1, 1] = 1.0
        out[1, 0] = 0.0
    return out


def group_constraint(key: str, M: np.ndarray) -> float:
    """Size of the violation of the group equations by M."""
    if key == "su2":
        return float(max(np.abs(M @ M.conj().T - np.eye(2)).max(), abs(np.linalg.det(M) - 1.0)))
    if key.startswith("sl2"):
        return float(abs(np.linalg.det(M) - 1.0))
    return float(np.abs(M[2] - np.array([0.0, 0.0, 1.0])).max())


@dataclass
class GroupTrajectory:
    t: np.ndarray
    q: np.ndarray
    algebra: str
    key: str

    def flat(self) -> np.ndarray:
        """Row-major flattened matrices; complex entries as (re, im) pairs."""
        n = len(self.t)
        if np.iscomplexobj(self.q):
            z = self.q.reshape(n, -1)
            return np.stack([z.real, z.imag], axis=-1).reshape(n, -1)
        return self.q.reshape(n, -1)


def integrate_group(spec: LieSpec, t, u, midpoint_u=None) -> GroupTrajectory:
    """Solve q' = q (u1 X1 + u2 X2) from the identity with u frozen on each step.

    ``midpoint_u`` gives the control used on each interval; by default the
    average of the end values.
    """
    key = _rep_key(spec)
    X1, X2, _ = representation(key)
    t = np.asarray(t, dtype=float)
    u = np.asarray(u, dtype=float)
    if midpoint_u is None:
        midpoint_u = 0.5 * (u[:-1] + u[1:]) if len(u) > 1 else np.zeros((0, 2))
    dim = X1.shape[0]
    q = np.empty((len(t), dim, dim), dtype=X1.dtype)
    q[0] = np.eye(dim, dtype=X1.dtype)
    for k in range(len(t) - 1):
        dt = t[k + 1] - t[k]
        m = midpoint_u[k]
        step = expm(dt * (m[0] * X1 + m[1] * X2)) if dt > 0 else np.eye(dim, dtype=X1.dtype)
        q[k + 1] = project_group(key, q[k] @ step)
    return GroupTrajectory(t, q, spec.algebra, key)


def interval_controls(spec: LieSpec, traj: ExtremalTrajectory) -> np.ndarray:
    """Control on each sampling interval, from a Hermite midpoint of theta_pol.

    Intervals spent at rest keep the recorded singular control.
    """
    th, v, t = traj.theta_polar, traj.theta_polar_dot, traj.t
    dt = np.diff(t)
    mid = 0.5 * (th[:-1] + th[1:]) + (v[:-1] - v[1:]) * dt / 8.0
    omega = spec.polar_table.polar_table.body
    lo, hi = spec.polar_table.body.dual_lift(mid)
    u = omega.point_at(0.5 * (lo + hi))
    rest = traj.stationary[:-1] & traj.stationary[1:]
    if np.any(rest) and traj.u is not None:
        u[rest] = traj.u[:-1][rest]
    return u


@dataclass
class LieExtremal:
    spec: LieSpec
    vertical: ExtremalTrajectory
    h: np.ndarray
    group: GroupTrajectory

    @property
    def casimir_energy(self) -> np.ndarray:
        return casimir(self.spec, self.h) / self.spec.H


def extremal(spec: LieSpec, theta_polar0: float, h3_0: float, T: float, branch_policy="stay",
             n_samples: int = 1001, selection: Callable | None = None) -> LieExtremal:
    """Normal extremal from (theta_pol(0), h3(0)) with the group started at the identity."""
    pot = spec.potential
    tr = integrate(pot, theta_polar0, h3_0 / spec.H, T, branch_policy, n_samples, recover=True,
                   selection=selection)
    h = covector(spec, tr.theta_polar, tr.theta_polar_dot)
    g = integrate_group(spec, tr.t, tr.u, interval_controls(spec, tr))
    return LieExtremal(spec, tr, h, g)
