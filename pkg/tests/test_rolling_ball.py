import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from convextrig import Disc, Ellipse, LpBall, Polygon, build_trig, square
from convextrig.applications import (
    ball_energy,
    ball_integrate,
    ball_vertical_potential,
    edge_singular_controls,
    quat_exp_pure,
    quat_mul,
)


def test_quaternion_helpers():
    i = np.array([0.0, 1.0, 0.0, 0.0])
    j = np.array([0.0, 0.0, 1.0, 0.0])
    k = np.array([0.0, 0.0, 0.0, 1.0])
    np.testing.assert_array_equal(quat_mul(i, j), k)
    np.testing.assert_array_equal(quat_mul(j, i), -k)
    np.testing.assert_array_equal(quat_mul(i, i), [-1.0, 0, 0, 0])
    np.testing.assert_allclose(quat_exp_pure([0.0, 0.0, math.pi / 2]), k, atol=1e-16)
    np.testing.assert_array_equal(quat_exp_pure([0.0, 0.0, 0.0]), [1.0, 0, 0, 0])


def test_disc_reduces_to_pendulum():
    p, q, H = 0.6, 0.8, 2.0
    st = ball_integrate(Disc(1.0), p, q, H, 0.3, 0.4, 12.0, n_samples=601)
    # U = 1/2 - (p cos + q sin)/H: a pendulum of strength |(p, q)|/H about atan2(q, p)
    w = math.hypot(p, q) / H
    c = math.atan2(q, p)
    ref = solve_ivp(lambda t, y: [y[1], -w * math.sin(y[0] - c)], (0, 12), [0.3, 0.4 / H],
                    t_eval=st.t, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(st.theta_polar, ref.y[0], atol=1e-7)
    np.testing.assert_allclose(st.u, np.column_stack([np.cos(st.theta_polar), np.sin(st.theta_polar)]), atol=1e-12)


def test_potential_is_distance_to_adjoint_point():
    pt = build_trig(LpBall(3.0)).polar_table
    p, q, H = 0.4, -0.7, 1.3
    pot = ball_vertical_potential(pt, p, q, H)
    th = np.linspace(0, pt.period, 50)
    Q = pt.cos_sin(th)
    dist2 = np.sum((Q - np.array([p, q]) / H) ** 2, axis=1)
    np.testing.assert_allclose(pot.U(th), 0.5 * dist2 - 0.5 * (p * p + q * q) / H**2, atol=1e-14)
    with pytest.raises(ValueError):
        ball_vertical_potential(pt, p, q, 0.0)


def test_ellipse_parameter_equation():
    a, b = 2.0, 1.0
    p, q, H = 0.3, -0.2, 1.7
    body = Ellipse(a, b)
    st = ball_integrate(body, p, q, H, 0.4, 0.9, 10.0, n_samples=2001)
    pt = build_trig(body).polar_table
    E = ball_energy(pt, p, q, H, st.theta_polar, st.h3 / H)
    # the polar ellipse is (cos s / a, sin s / b) with s = ab theta_pol
    s = a * b * st.theta_polar
    s_dot = a * b * st.h3 / H
    pt_, qt = a * p / H, b * q / H
    E_tilde = (a * b) ** 2 * (2 * E[0] * H + p * p + q * q) / H**2
    resid = s_dot**2 - (E_tilde - b * b * (np.cos(s) - pt_) ** 2 - a * a * (np.sin(s) - qt) ** 2)
    assert np.max(np.abs(resid)) < 1e-8

    def rhs(_, y):
        return [y[1], b * b * (math.cos(y[0]) - pt_) * math.sin(y[0]) - a * a * (math.sin(y[0]) - qt) * math.cos(y[0])]

    ref = solve_ivp(rhs, (0, 10), [s[0], s_dot[0]], t_eval=st.t, rtol=1e-13, atol=1e-13, method="DOP853")
    np.testing.assert_allclose(s, ref.y[0], atol=1e-7)


@pytest.mark.parametrize("body", [square(), Ellipse(2.0, 1.0, (0.1, 0.2)), LpBall(3.0)])
def test_energy_and_quaternion_norm(body):
    p, q, H = 0.3, 0.1, 1.0
    st = ball_integrate(body, p, q, H, 0.3, 0.5, 20.0, n_samples=10001)
    pt = build_trig(body).polar_table
    E = ball_energy(pt, p, q, H, st.theta_polar, st.h3 / H)
    assert np.max(np.abs(E - st.energy)) < 1e-8
    assert st.norm_drift() < 1e-10


def test_rolling_kinematics():
    st = ball_integrate(Ellipse(1.5, 1.0), 0.2, 0.5, 1.0, 0.1, 0.3, 4.0, n_samples=4001)
    dt = st.t[1] - st.t[0]
    # contact point moves with velocity u
    np.testing.assert_allclose(np.diff(st.xy, axis=0) / dt, 0.5 * (st.u[1:] + st.u[:-1]), atol=1e-4)
    # z' = 1/2 z (u2 i - u1 j)
    dz = np.gradient(st.z, dt, axis=0)[1:-1]
    u = st.u[1:-1]
    gen = np.column_stack([np.zeros(len(u)), u[:, 1], -u[:, 0], np.zeros(len(u))])
    np.testing.assert_allclose(dz, 0.5 * quat_mul(st.z[1:-1], gen), atol=1e-5)


@pytest.mark.parametrize(
    "body, adj",
    [
        (square(), (0.3, 0.1, 1.0)),
        (square(), (0.9, -0.4, 0.5)),
        (Polygon([(1, 0), (0.3, 1.2), (-1, 0.5), (-0.6, -1), (0.5, -0.9)]), (0.2, 0.3, 1.0)),
    ],
)
def test_polygon_singular_controls_point_at_adjoint(body, adj):
    p, q, H = adj
    pt = build_trig(body).polar_table
    found = edge_singular_controls(pt, p, q, H)
    assert found
    for rec in found:
        if rec["u"] is None:
            continue
        Q = pt.cos_sin(rec["theta_polar"])
        u = rec["u"]
        assert body.gauge(u) == pytest.approx(1.0, abs=1e-8) or rec["kind"] == "none"
        assert u[0] * (Q[1] - q / H) - u[1] * (Q[0] - p / H) == pytest.approx(0.0, abs=1e-12)


def test_polygon_controls_are_piecewise_constant():
    st = ball_integrate(square(), 0.3, 0.1, 1.0, 0.3, 0.5, 10.0, n_samples=2001)
    bang = st.vertical.arc_label == "bang"
    distinct = {tuple(np.round(u, 9)) for u in st.u[bang]}
    # bang arcs of a polygon only use its vertices
    assert distinct <= {(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)}


def test_abnormal_mode_moves_straight():
    st = ball_integrate(square(), 1.0, 2.0, 0.0, 0.0, 0.0, 3.0, n_samples=31)
    np.testing.assert_allclose(st.u[0], (0.5, 1.0))
    np.testing.assert_allclose(st.xy[-1], 3.0 * np.array([0.5, 1.0]), atol=1e-14)
    assert st.info["mode"] == "abnormal"
    with pytest.raises(ValueError):
        ball_integrate(square(), 0.0, 0.0, 0.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        ball_integrate(square(), 1.0, 0.0, -1.0, 0.0, 0.0, 1.0)
