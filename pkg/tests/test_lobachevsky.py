import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from convextrig import Disc, Ellipse, LpBall, Polygon, TrigTable, build_trig, square
from convextrig.applications import (
    HalfPlaneError,
    fixed_points,
    lobachevsky_geodesic,
    lobachevsky_horizontal,
    lobachevsky_vertical,
    support_set,
)


def test_disc_geodesics_are_half_circles():
    g = lobachevsky_geodesic(Disc(1.0), 0.5, 1.0, 0.7, 0.3, 5.0, n_samples=401)
    assert np.all(g.y > 0)
    # centre on the x-axis from the perpendicular bisector of the end points
    xc = (g.x[0] ** 2 + g.y[0] ** 2 - g.x[-1] ** 2 - g.y[-1] ** 2) / (2 * (g.x[0] - g.x[-1]))
    r = np.hypot(g.x - xc, g.y)
    assert np.ptp(r) < 1e-10
    assert g.x[0] == pytest.approx(0.5) and g.y[0] == pytest.approx(1.0)


@pytest.mark.parametrize("body", [Disc(1.0), Ellipse(2.0, 1.0, (0.2, 0.1)), LpBall(3.0)])
def test_horizontal_geodesic_solves_control_system(body):
    g = lobachevsky_geodesic(body, 0.0, 1.0, 0.8, -0.4, 3.0, n_samples=3001)
    dt = g.t[1] - g.t[0]
    dx = np.gradient(g.x, dt)[1:-1]
    dy = np.gradient(g.y, dt)[1:-1]
    np.testing.assert_allclose(dx, (g.y * g.u[:, 0])[1:-1], atol=1e-5)
    np.testing.assert_allclose(dy, (g.y * g.u[:, 1])[1:-1], atol=1e-5)
    np.testing.assert_allclose(body.gauge(g.u), 1.0, atol=1e-10)


@pytest.mark.parametrize(
    "body", [square(), LpBall(3.0), Ellipse(2.0, 1.0, (0.2, 0.1)), Polygon([(1, 0), (0, 1.5), (-1, 0.2), (0, -1)])]
)
def test_horizontal_curve_is_similar_to_polar_boundary(body):
    pt = build_trig(body).polar_table
    g = lobachevsky_horizontal(pt, 2.0, -1, 0.4, float(pt.angle_of_direction(3.0)), 6.0, 301)
    assert np.all(g.y > 0)
    np.testing.assert_allclose(pt.body.gauge(g.to_polar_boundary()), 1.0, atol=1e-8)


@pytest.mark.parametrize("body", [square(), Disc(1.0), LpBall(1.5), Ellipse(1.0, 2.0, (0.1, -0.3))])
def test_fixed_points_lie_on_vertical_axis(body):
    pt = build_trig(body).polar_table
    fp = fixed_points(pt)
    assert len(fp) == 2
    np.testing.assert_allclose(pt.cos(fp), 0.0, atol=1e-12)
    assert pt.sin(fp[0]) > 0 > pt.sin(fp[1])


def test_geodesic_approaches_fixed_point():
    pt = build_trig(Disc(1.0)).polar_table
    g = lobachevsky_horizontal(pt, 1.0, 1, 0.0, 0.1, 40.0, 401)
    # y -> 0 as the polar angle runs to the top of the disc
    assert g.y[-1] < 1e-12 or g.theta_polar[-1] == pytest.approx(math.pi / 2, abs=1e-9)


@pytest.mark.parametrize("centre", [(0.0, 0.0), (0.3, 0.2), (-0.2, 0.25)])
def test_ellipse_parameter_equation(centre):
    a, b = 1.5, 0.8
    x0, y0 = centre
    E = Ellipse(a, b, centre)
    pt = TrigTable(E)
    th0 = float(E.angle_of(-0.2))
    g = lobachevsky_horizontal(pt, 1.0, 1, 0.0, th0, 8.0, 401)
    Q = pt.cos_sin(g.theta_polar)
    s = np.unwrap(np.arctan2((Q[:, 1] - y0) / b, (Q[:, 0] - x0) / a))

    def rate(_, v):
        return [(-a * math.cos(v[0]) - x0) / (a * b + y0 * a * math.sin(v[0]) + x0 * b * math.cos(v[0]))]

    ref = solve_ivp(rate, (0, g.t[-1]), [s[0]], t_eval=g.t, rtol=1e-13, atol=1e-14, method="DOP853")
    np.testing.assert_allclose(s, ref.y[0], atol=1e-7)


def test_horizontal_rejects_lower_half():
    pt = build_trig(Disc(1.0)).polar_table
    with pytest.raises(HalfPlaneError):
        lobachevsky_horizontal(pt, 1.0, 1, 0.0, math.pi, 1.0)
    with pytest.raises(ValueError):
        lobachevsky_horizontal(pt, -1.0, 1, 0.0, 0.0, 1.0)


def test_square_constant_selection_is_ray_of_slope_one():
    v = lobachevsky_vertical(square(), 1, 0.0, 1.0, 2.0,
                             lambda s: np.column_stack([np.ones_like(s), np.ones_like(s)]), 101)
    np.testing.assert_allclose(v.y, np.exp(v.t), rtol=1e-14)
    np.testing.assert_allclose(v.x, np.exp(v.t) - 1, atol=1e-12)
    np.testing.assert_allclose((v.y[1:] - 1.0) / v.x[1:], 1.0, rtol=1e-10)


def test_disc_vertical_geodesic():
    v = lobachevsky_vertical(Disc(1.0), 1, 0.7, 2.0, 3.0)
    np.testing.assert_allclose(v.x, 0.7, atol=1e-15)
    np.testing.assert_allclose(v.y, 2.0 * np.exp(v.t), rtol=1e-14)
    down = lobachevsky_geodesic(Disc(1.0), 0.7, 2.0, 0.0, -1.0, 3.0)
    np.testing.assert_allclose(down.y, 2.0 * np.exp(-down.t), rtol=1e-14)


def test_vertical_stays_in_edge_cone():
    A, B = support_set(square(), 1)
    np.testing.assert_allclose(sorted([A[0], B[0]]), [-1.0, 1.0])
    rng = np.random.default_rng(3)
    knots = rng.uniform(-1, 1, 20)

    def wiggle(s):
        u1 = np.interp(s, np.linspace(0, 2, 20), knots)
        return np.column_stack([u1, np.ones_like(u1)])

    x0, y0 = 0.2, 1.0
    v = lobachevsky_vertical(square(), 1, x0, y0, 2.0, wiggle, 401)
    dx, dy = v.x - x0, v.y - y0
    # between the lines through (x0, y0) with slopes +-1
    assert np.all(np.abs(dx) <= dy + 1e-12)


def test_vertical_rejects_bad_selection():
    with pytest.raises(ValueError):
        lobachevsky_vertical(square(), 1, 0.0, 1.0, 1.0, lambda s: np.column_stack([2 * np.ones_like(s), np.ones_like(s)]))
    with pytest.raises(HalfPlaneError):
        lobachevsky_vertical(square(), 1, 0.0, -1.0, 1.0)


def test_geodesic_input_checks():
    with pytest.raises(ValueError):
        lobachevsky_geodesic(square(), 0.0, 1.0, 0.0, 0.0, 1.0)
    with pytest.raises(HalfPlaneError):
        lobachevsky_geodesic(square(), 0.0, 0.0, 1.0, 0.0, 1.0)
