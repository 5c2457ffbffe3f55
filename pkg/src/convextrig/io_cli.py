"""Command-line entry point and the CSV / JSON / SVG emitters.

Every command writes into ``--outdir`` using ``--name`` as the file stem.
Outputs are byte-stable for a fixed configuration: numbers are written with
17 significant digits and every CSV starts with a ``# config-hash`` line.

Exit codes: 0 success, 2 bad arguments, 3 invalid body, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import contextlib
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import convex_trig, ct_ode, lie3d
from .convex_sets import BodyError, ConvexBody, body_from_json
from .convex_trig import MIN_RESOLUTION, build_trig

EXIT_OK = 0
EXIT_ARGS = 2
EXIT_BODY = 3
EXIT_NUMERIC = 4

EMITTERS = ("csv", "svg", "json")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    body: str | None = None
    resolution: int = 1024
    atol: float = ct_ode.ATOL
    rtol: float = ct_ode.RTOL
    corner_tol: float = convex_trig.CORNER_REL_TOL
    boundary_tol: float = lie3d.BOUNDARY_TOL
    outdir: str = "."
    name: str | None = None
    emit: tuple = ("csv", "json")
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.resolution < MIN_RESOLUTION:
            raise CliError(f"resolution must be >= {MIN_RESOLUTION}", EXIT_ARGS)
        for key in ("atol", "rtol", "corner_tol", "boundary_tol"):
            v = getattr(self, key)
            if not (v > 0 and math.isfinite(v)):
                raise CliError(f"{key.replace('_', '-')} must be positive", EXIT_ARGS)
        bad = [e for e in self.emit if e not in EMITTERS]
        if bad:
            raise CliError(f"unknown emitter(s) {bad}; choose from {EMITTERS}", EXIT_ARGS)

    @property
    def stem(self) -> str:
        return self.name or self.command.replace(" ", "_")

    def body_text(self) -> str | None:
        """Body literal with file sources resolved, so the hash tracks content, not paths."""
        if self.body is None:
            return None
        src = self.body.strip()
        if src.startswith("{"):
            return src
        try:
            return Path(src).read_text()
        except OSError as exc:
            raise CliError(f"cannot read body file {src!r}: {exc.strerror}", EXIT_BODY) from exc

    def hash(self) -> str:
        data = asdict(self)
        data.pop("outdir")
        data.pop("name")
        text = self.body_text()
        data["body"] = None if text is None else json.loads(text) if _is_json(text) else text
        blob = json.dumps(data, sort_keys=True, default=_jsonable, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def load_body(self) -> ConvexBody:
        text = self.body_text()
        if text is None:
            raise CliError("this command needs --body", EXIT_ARGS)
        return body_from_json(text)


def _is_json(text: str) -> bool:
    try:
        json.loads(text)
    except ValueError:
        return False
    return True


def thread_cap() -> int:
    """Worker count from CONVEXTRIG_THREADS (default 1)."""
    raw = os.environ.get("CONVEXTRIG_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise CliError(f"CONVEXTRIG_THREADS must be an integer, got {raw!r}", EXIT_ARGS) from None
    return max(n, 1)


def parallel_map(fn, items: Sequence) -> list:
    n = min(thread_cap(), max(len(items), 1))
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@contextlib.contextmanager
def tolerances(cfg: RunConfig):
    """Install the configured tolerances in the numeric modules for the duration of a run."""
    saved = (ct_ode.ATOL, ct_ode.RTOL, convex_trig.CORNER_REL_TOL, lie3d.BOUNDARY_TOL)
    ct_ode.ATOL, ct_ode.RTOL = cfg.atol, cfg.rtol
    convex_trig.CORNER_REL_TOL = cfg.corner_tol
    lie3d.BOUNDARY_TOL = cfg.boundary_tol
    try:
        yield
    finally:
        ct_ode.ATOL, ct_ode.RTOL, convex_trig.CORNER_REL_TOL, lie3d.BOUNDARY_TOL = saved


# ---------------------------------------------------------------------------
# Emitters
# ---------------------------------------------------------------------------


def fmt(x) -> str:
    if isinstance(x, (str, np.str_)):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    v = float(x)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == 0.0:
        return "0"
    return format(v, ".17g")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _clean(obj):
    """Recursively turn numpy values, tuples, sets and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_clean(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def csv_text(columns: dict, config_hash: str) -> str:
    cols = {k: v for k, v in columns.items() if v is not None}
    n = max((len(np.atleast_1d(v)) for v in cols.values()), default=0)
    lines = [f"# config-hash {config_hash}", ",".join(cols)]
    data = [np.broadcast_to(np.asarray(v, dtype=object), (n,)) for v in cols.values()]
    for i in range(n):
        lines.append(",".join(fmt(col[i]) for col in data))
    return "\n".join(lines) + "\n"


def json_text(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _num(v: float) -> str:
    return format(float(v), ".6g")


def svg_text(series: Iterable[tuple[str, np.ndarray, np.ndarray]], width: int = 640, height: int = 480,
             points: Iterable[tuple[float, float]] = ()) -> str:
    """Polylines in data coordinates with axes; the view box is the data bounds plus a 5% margin."""
    series = [(lab, np.asarray(x, float), np.asarray(y, float)) for lab, x, y in series]
    pts = list(points)
    xs = np.concatenate([s[1][np.isfinite(s[1])] for s in series] + [np.array([p[0] for p in pts], float)])
    ys = np.concatenate([s[2][np.isfinite(s[2])] for s in series] + [np.array([p[1] for p in pts], float)])
    if xs.size == 0:
        xs, ys = np.array([0.0, 1.0]), np.array([0.0, 1.0])
    x0, x1, y0, y1 = xs.min(), xs.max(), ys.min(), ys.max()
    wx = (x1 - x0) or 1.0
    wy = (y1 - y0) or 1.0
    x0, x1 = x0 - 0.05 * wx, x1 + 0.05 * wx
    y0, y1 = y0 - 0.05 * wy, y1 + 0.05 * wy
    stroke = _num(0.004 * max(x1 - x0, y1 - y0))
    palette = ("#1f4e9c", "#b2331d", "#2c7a3f", "#7b3fa0", "#b07800", "#3a8a99")
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{_num(x0)} {_num(-y1)} {_num(x1 - x0)} {_num(y1 - y0)}" preserveAspectRatio="none">',
        f'<g transform="scale(1,-1)" fill="none" stroke-width="{stroke}" vector-effect="non-scaling-stroke">',
    ]
    ax = min(max(0.0, x0), x1)
    ay = min(max(0.0, y0), y1)
    out.append(f'<line x1="{_num(x0)}" y1="{_num(ay)}" x2="{_num(x1)}" y2="{_num(ay)}" stroke="#888888"/>')
    out.append(f'<line x1="{_num(ax)}" y1="{_num(y0)}" x2="{_num(ax)}" y2="{_num(y1)}" stroke="#888888"/>')
    for k, (label, x, y) in enumerate(series):
        ok = np.isfinite(x) & np.isfinite(y)
        if not np.any(ok):
            continue
        coords = " ".join(f"{_num(a)},{_num(b)}" for a, b in zip(x[ok], y[ok]))
        out.append(f'<polyline stroke="{palette[k % len(palette)]}" points="{coords}"><title>{label}</title></polyline>')
    for px, py in pts:
        out.append(f'<circle cx="{_num(px)}" cy="{_num(py)}" r="{stroke}" fill="#000000"/>')
    out += ["</g>", "</svg>"]
    return "\n".join(out) + "\n"


class Writer:
    """Collects artifacts for one run and writes them under the configured stem."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.hash = cfg.hash()
        self.written: list[Path] = []

    def _path(self, suffix: str, ext: str) -> Path:
        d = Path(self.cfg.outdir)
        d.mkdir(parents=True, exist_ok=True)
        return d / f"{self.cfg.stem}{suffix}.{ext}"

    def _put(self, path: Path, text: str):
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
        self.written.append(path)

    def csv(self, columns: dict, suffix: str = ""):
        if "csv" in self.cfg.emit:
            self._put(self._path(suffix, "csv"), csv_text(columns, self.hash))

    def json(self, obj, suffix: str = ""):
        if "json" in self.cfg.emit:
            self._put(self._path(suffix, "json"), json_text(obj))

    def svg(self, series, suffix: str = "", points=()):
        if "svg" in self.cfg.emit:
            self._put(self._path(suffix, "svg"), svg_text(series, points=points))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}") from None
    return a, b


def _int_pair(text: str) -> tuple[int, int]:
    a, b = _pair(text)
    if a != int(a) or b != int(b):
        raise argparse.ArgumentTypeError(f"expected two integers, got {text!r}")
    return int(a), int(b)


def _float_list(text: str) -> list[float]:
    if not text.strip():
        return []
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _emit_list(text: str) -> tuple:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def cmd_trig_table(cfg: RunConfig, args, w: Writer):
    table = build_trig(cfg.load_body(), cfg.resolution)
    rows = table.rows(args.n)
    names = ("theta", "cos", "sin", "theta_polar_lo", "theta_polar_hi", "is_corner")
    cols = {k: rows[:, i] for i, k in enumerate(names)}
    cols["is_corner"] = rows[:, 5].astype(bool)
    w.csv(cols)
    w.json({"period": table.period, "area": table.S, "breakpoints": table.breakpoints})
    w.svg([("boundary", rows[:, 1], rows[:, 2])])


def cmd_polar(cfg: RunConfig, args, w: Writer):
    body = cfg.load_body()
    pol = body.polar()
    phi = np.linspace(0.0, 2.0 * math.pi, args.n, endpoint=False)
    pts = pol.boundary_point(phi)
    w.csv({"phi": phi, "x": pts[:, 0], "y": pts[:, 1]})
    w.json({"body": body.describe(), "polar": pol.describe(), "area": body.area, "polar_area": pol.area})
    b = body.boundary_point(phi)
    w.svg([("body", b[:, 0], b[:, 1]), ("polar", pts[:, 0], pts[:, 1])])


def _lie_spec(cfg: RunConfig, args) -> lie3d.LieSpec:
    a, b = args.ab
    if (a, b) not in lie3d.ALGEBRAS:
        raise CliError(f"--ab {a},{b} is not one of {sorted(lie3d.ALGEBRAS)}", EXIT_ARGS)
    if not args.H > 0:
        raise CliError("--H must be positive", EXIT_ARGS)
    return lie3d.LieSpec(a, b, cfg.load_body(), args.H, cfg.resolution)


def cmd_lie3d_portrait(cfg: RunConfig, args, w: Writer):
    spec = _lie_spec(cfg, args)
    portrait = lie3d.phase_portrait(spec, (), n_scan=args.n_scan)
    levels = parallel_map(lambda E: lie3d.level_curve(spec, E), args.energies)
    eq = portrait.equilibria
    w.csv({"theta_polar": [r["theta_polar"] for r in eq], "h3": [r["h3"] for r in eq],
           "type": [r["type"] for r in eq], "dynamics": [r["dynamics"] for r in eq],
           "singular": [r["singular"] for r in eq], "energy": [r["energy"] for r in eq]})
    if levels:
        w.csv({"energy": np.concatenate([np.full(len(c), E) for E, c in zip(args.energies, levels)]),
               "theta_polar": np.concatenate([c[:, 0] for c in levels]),
               "h3": np.concatenate([c[:, 1] for c in levels])}, "_levels")
    w.json({"algebra": spec.algebra, "a": spec.a, "b": spec.b, "H": spec.H, "equilibria": eq,
            "continua": portrait.continua, "branching": portrait.branching})
    series = [("U", portrait.profile[:, 0], portrait.profile[:, 1] * spec.H)]
    series += [(f"E={E:g}", c[:, 0], c[:, 1]) for E, c in zip(args.energies, levels)]
    w.svg(series, points=[(r["theta_polar"], 0.0) for r in eq])


def cmd_lie3d_extremal(cfg: RunConfig, args, w: Writer):
    spec = _lie_spec(cfg, args)
    ex = lie3d.extremal(spec, args.theta0, args.h30, args.T, args.branch_policy, args.n_samples)
    cols = ex.vertical.columns()
    cols.update({"h1": ex.h[:, 0], "h2": ex.h[:, 1], "h3": ex.h[:, 2], "casimir_energy": ex.casimir_energy})
    flat = ex.group.flat()
    for j in range(flat.shape[1]):
        cols[f"g{j}"] = flat[:, j]
    w.csv(cols)
    w.json({"algebra": spec.algebra, "energy": spec.H * ex.vertical.energy, "events": ex.vertical.events,
            "branch": ex.vertical.branch, "group_layout": "row-major" + (" (re, im)" if np.iscomplexobj(ex.group.q) else "")})
    w.svg([("theta_polar", ex.vertical.theta_polar, ex.vertical.theta_polar_dot * spec.H)])


def cmd_lie3d_report(cfg: RunConfig, args, w: Writer):
    spec = _lie_spec(cfg, args)
    rep = lie3d.extremal_type_report(spec, n_scan=args.n_scan)
    w.json(rep)
    if "json" not in cfg.emit:
        print(json_text({k: rep[k] for k in ("algebra", "theorem", "agree")}), end="")


def cmd_lobachevsky(cfg: RunConfig, args, w: Writer):
    from .applications.lobachevsky import lobachevsky_geodesic

    geo = lobachevsky_geodesic(cfg.load_body(), args.x0, args.y0, args.p, args.q, args.T, args.n_samples,
                               cfg.resolution)
    w.csv(geo.columns())
    w.json({"kind": geo.kind, "fixed": geo.fixed, "params": geo.params})
    w.svg([("geodesic", geo.x, geo.y)])


def cmd_ball(cfg: RunConfig, args, w: Writer):
    from .applications.rolling_ball import ball_integrate

    st = ball_integrate(cfg.load_body(), args.p, args.q, args.H, args.theta0, args.h30, args.T,
                        args.branch_policy, args.n_samples, cfg.resolution)
    w.csv(st.columns())
    w.json({"energy": st.energy, "norm_drift": st.norm_drift(), **st.info})
    w.svg([("contact", st.xy[:, 0], st.xy[:, 1])])


_PROBLEM_ALIASES = {"md": "markov_dubins", "dubins": "markov_dubins", "rs": "reeds_shepp",
                    "se2": "sr_se2", "sr-se2": "sr_se2", "markov-dubins": "markov_dubins",
                    "reeds-shepp": "reeds_shepp"}


def cmd_yacht(cfg: RunConfig, args, w: Writer):
    from .applications.yachts import PROBLEMS, YachtSpec, yacht_extremal

    problem = _PROBLEM_ALIASES.get(args.problem, args.problem)
    if problem not in PROBLEMS:
        raise CliError(f"--problem must be one of {PROBLEMS}", EXIT_ARGS)
    spec = YachtSpec(problem, cfg.load_body(), args.psi1, args.psi2, cfg.resolution, args.non_factorized)
    tr = yacht_extremal(spec, args.H, args.theta0, args.direction, args.T, args.n_samples,
                        args.branch_policy, args.dwell, args.u1)
    w.csv(tr.columns())
    w.json([{"t": e["t"], "u_before": e["u_before"], "u_after": e["u_after"], "label": e["label"]}
            for e in tr.schedule], "_schedule")
    w.json({"problem": problem, "H": tr.H, "report": tr.report}, "_report")
    w.svg([("path", tr.x, tr.y)])


def cmd_planedyn(cfg: RunConfig, args, w: Writer):
    from .applications.plane_dynamics import plane_dyn_extremal

    st = plane_dyn_extremal(cfg.load_body(), args.p, args.q0, args.T, args.x0, args.y0, args.n_samples,
                            cfg.resolution)
    w.csv(st.columns())
    w.json({"E": st.E, **st.info})
    w.svg([("position", st.x[:, 0], st.x[:, 1])])


def _selftest_checks() -> list[tuple[str, bool, str]]:
    from .convex_sets import Disc, Polygon, all_vertices_match, square

    out = []
    disc = build_trig(Disc(1.0), 256)
    th = np.linspace(0.0, 2.0 * math.pi, 97)
    err = float(np.max(np.abs(disc.cos_sin(th) - np.column_stack([np.cos(th), np.sin(th)]))))
    out.append(("disc trig equals classic trig", err < 1e-12, f"max error {err:.3g}"))
    sq = square()
    ok = all_vertices_match(Polygon(sq.polar().vertices).polar().vertices, sq.vertices)
    out.append(("square polar involution", bool(ok), ""))
    spec = lie3d.LieSpec(1, 0, Disc(1.0), 1.0, 256)
    ex = lie3d.extremal(spec, 0.3, 0.5, 5.0, n_samples=201)
    drift = float(np.max(np.abs(ex.casimir_energy - spec.H * ex.vertical.energy)))
    out.append(("casimir matches energy on a disc extremal", drift < 1e-8, f"drift {drift:.3g}"))
    return out


def cmd_selftest(cfg: RunConfig, args, w: Writer):
    checks = _selftest_checks()
    for name, ok, note in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}" + (f" ({note})" if note else ""))
    if not all(ok for _, ok, _ in checks):
        raise CliError("selftest failed", EXIT_NUMERIC)


# ---------------------------------------------------------------------------
# Parser and dispatch
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--body", help="body as inline JSON or a path to a JSON file")
    p.add_argument("--resolution", type=int, default=1024)
    p.add_argument("--atol", type=float, default=ct_ode.ATOL)
    p.add_argument("--rtol", type=float, default=ct_ode.RTOL)
    p.add_argument("--corner-tol", type=float, default=convex_trig.CORNER_REL_TOL)
    p.add_argument("--boundary-tol", type=float, default=lie3d.BOUNDARY_TOL)
    p.add_argument("--outdir", default=".")
    p.add_argument("--name", help="file stem for outputs (default: the command name)")
    p.add_argument("--emit", type=_emit_list, default=("csv", "json"), help="comma list from csv,svg,json")
    p.add_argument("--seed", type=int, default=0)
    return p


def _trajectory_opts() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--n-samples", type=int, default=1001)
    return p


def build_parser() -> argparse.ArgumentParser:
    common, traj = _common(), _trajectory_opts()
    parser = _Parser(prog="convextrig", description="Convex trigonometry and extremals of control problems.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("trig-table", parents=[common], help="dump cos/sin and the angle correspondence")
    p.add_argument("--n", type=int, default=360)
    p.set_defaults(func=cmd_trig_table)

    p = sub.add_parser("polar", parents=[common], help="sample the polar body")
    p.add_argument("--n", type=int, default=360)
    p.set_defaults(func=cmd_polar)

    lie = sub.add_parser("lie3d", help="left-invariant problems on 3D unimodular groups")
    lsub = lie.add_subparsers(dest="lie_command", required=True, parser_class=_Parser)
    lie_opts = argparse.ArgumentParser(add_help=False)
    lie_opts.add_argument("--ab", type=_int_pair, required=True, help="structure constants a,b")
    lie_opts.add_argument("--H", type=float, default=1.0)
    p = lsub.add_parser("portrait", parents=[common, lie_opts])
    p.add_argument("--energies", type=_float_list, default=[])
    p.add_argument("--n-scan", type=int, default=4096)
    p.set_defaults(func=cmd_lie3d_portrait)
    p = lsub.add_parser("extremal", parents=[common, lie_opts, traj])
    p.add_argument("--theta0", type=float, required=True)
    p.add_argument("--h30", type=float, required=True)
    p.add_argument("--branch-policy", default="stay")
    p.set_defaults(func=cmd_lie3d_extremal)
    p = lsub.add_parser("report", parents=[common, lie_opts])
    p.add_argument("--n-scan", type=int, default=4096)
    p.set_defaults(func=cmd_lie3d_report)

    p = sub.add_parser("lobachevsky", parents=[common, traj], help="Finsler geodesics on the half-plane")
    for k, d in (("--x0", 0.0), ("--y0", 1.0), ("--p", 1.0), ("--q", 0.0)):
        p.add_argument(k, type=float, default=d)
    p.set_defaults(func=cmd_lobachevsky)

    p = sub.add_parser("ball", parents=[common, traj], help="ball rolling on a plane")
    for k, d in (("--p", 1.0), ("--q", 0.0), ("--H", 1.0), ("--theta0", 0.0), ("--h30", 0.0)):
        p.add_argument(k, type=float, default=d)
    p.add_argument("--branch-policy", default="stay")
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("yacht", parents=[common, traj], help="yacht problems")
    p.add_argument("--problem", required=True)
    for k, d in (("--psi1", 1.0), ("--psi2", 0.0), ("--H", 1.0), ("--theta0", 0.0), ("--dwell", 0.0),
                 ("--u1", 1.0)):
        p.add_argument(k, type=float, default=d)
    p.add_argument("--direction", type=int, choices=(-1, 1), default=1)
    p.add_argument("--branch-policy", default="stay")
    p.add_argument("--non-factorized", action="store_true")
    p.set_defaults(func=cmd_yacht)

    p = sub.add_parser("planedyn", parents=[common, traj], help="plane dynamics with a control set")
    p.add_argument("--p", type=_pair, default=(1.0, 0.0))
    p.add_argument("--q0", type=_pair, default=(0.0, 1.0))
    p.add_argument("--x0", type=_pair, default=(0.0, 0.0))
    p.add_argument("--y0", type=_pair, default=(0.0, 0.0))
    p.set_defaults(func=cmd_planedyn)

    p = sub.add_parser("selftest", parents=[common], help="quick numeric sanity checks")
    p.set_defaults(func=cmd_selftest)
    return parser


_SHARED = ("command", "lie_command", "func", "body", "resolution", "atol", "rtol", "corner_tol",
           "boundary_tol", "outdir", "name", "emit", "seed")


def config_from_args(args) -> RunConfig:
    command = args.command + (f" {args.lie_command}" if getattr(args, "lie_command", None) else "")
    params = {k: v for k, v in vars(args).items() if k not in _SHARED}
    return RunConfig(command, args.body, args.resolution, args.atol, args.rtol, args.corner_tol,
                     args.boundary_tol, args.outdir, args.name, tuple(args.emit), args.seed, params)


def _numeric_errors() -> tuple:
    from .applications.lobachevsky import HalfPlaneError
    from .applications.yachts import AdmissibilityError

    return (ct_ode.BranchingError, ct_ode.IntegrationStallError, ct_ode.InadmissibleDirectionError,
            ct_ode.InconsistentTrajectoryError, convex_trig.NonSmoothPointError, AdmissibilityError,
            HalfPlaneError, FloatingPointError, ArithmeticError)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        np.random.seed(cfg.seed)
        w = Writer(cfg)
        with tolerances(cfg):
            args.func(cfg, args, w)
    except CliError as exc:
        print(f"convextrig: error: {exc}", file=sys.stderr)
        return exc.code
    except BodyError as exc:
        print(f"convextrig: invalid body: {exc}", file=sys.stderr)
        return EXIT_BODY
    except _numeric_errors() as exc:
        print(f"convextrig: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"convextrig: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    for path in w.written:
        print(path)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))
