import numpy as np
import pytest
from scipy.integrate import solve_ivp

from convextrig import Disc, Ellipse, LpBall, TrigTable, build_trig, cut_disc, square
from convextrig.applications import plane_dyn_extremal, plane_theta_flow

BODIES = [square(), Ellipse(2.0, 1.0, (0.2, -0.1)), LpBall(3.0), LpBall(1.5), cut_disc(0.5)]


@pytest.mark.parametrize("body", BODIES, ids=lambda b: type(b).__name__)
def test_angle_tracks_adjoint_direction(body):
    pt = build_trig(body).polar_table
    p, q0 = np.array([0.7, -0.4]), np.array([0.5, 1.2])
    st = plane_dyn_extremal(body, p, q0, 6.0, n_samples=601, polar_table=pt)
    _, th = pt.polar_decompose(st.q)
    P = pt.period
    gap = (st.theta_polar - th + P / 2) % P - P / 2
    assert np.max(np.abs(gap)) < 1e-9
    E = p[0] * st.q[:, 1] - p[1] * st.q[:, 0]
    assert np.ptp(E) < 1e-12 and E[0] == pytest.approx(st.E)
    assert np.all(np.diff(st.theta_polar) * np.sign(st.E) >= -1e-15)


@pytest.mark.parametrize("body", BODIES, ids=lambda b: type(b).__name__)
def test_control_maximizes_adjoint_product(body):
    st = plane_dyn_extremal(body, [0.3, 0.5], [-1.0, 0.4], 5.0, n_samples=201)
    np.testing.assert_allclose(np.sum(st.q * st.u, axis=1), body.support(st.q), atol=1e-8)
    np.testing.assert_allclose(body.gauge(st.u), 1.0, atol=1e-8)


def test_flow_direction_follows_sign_of_e():
    pt = build_trig(LpBall(3.0)).polar_table
    t = np.linspace(0, 2, 21)
    up = plane_theta_flow(pt, [1.0, 0.0], [0.0, 1.0], t).theta
    down = plane_theta_flow(pt, [1.0, 0.0], [0.0, -1.0], t).theta
    assert np.all(np.diff(up) > 0) and np.all(np.diff(down) < 0)
    with pytest.raises(ValueError):
        plane_theta_flow(pt, [1.0, 2.0], [2.0, 4.0], t)


def test_disc_flow_against_ode():
    pt = build_trig(Disc(1.0)).polar_table
    p, q0 = np.array([0.4, 0.9]), np.array([1.0, 0.2])
    E = p[0] * q0[1] - p[1] * q0[0]
    t = np.linspace(0, 4, 41)
    th = plane_theta_flow(pt, p, q0, t).theta
    ref = solve_ivp(lambda _, y: [(p[1] * np.cos(y[0]) - p[0] * np.sin(y[0])) ** 2 / E], (0, 4),
                    [np.arctan2(q0[1], q0[0])], t_eval=t, rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(th, ref.y[0], atol=1e-8)


def test_ellipse_control_formula():
    a, b, x1, x2 = 1.3, 0.7, 0.2, -0.15
    pt = TrigTable(Ellipse(a, b, (x1, x2)))
    st = plane_dyn_extremal(None, [0.3, 0.5], [1.0, -0.2], 5.0, n_samples=301, polar_table=pt)
    Q = pt.cos_sin(st.theta_polar)
    s = np.arctan2((Q[:, 1] - x2) / b, (Q[:, 0] - x1) / a)
    den = a * b + a * x2 * np.sin(s) + b * x1 * np.cos(s)
    np.testing.assert_allclose(st.u[:, 0], b * np.cos(s) / den, atol=1e-12)
    np.testing.assert_allclose(st.u[:, 1], a * np.sin(s) / den, atol=1e-12)


def test_zero_drift_gives_constant_control():
    st = plane_dyn_extremal(square(), [0.0, 0.0], [2.0, 1.0], 3.0, n_samples=4)
    assert st.info["mode"] == "constant"
    np.testing.assert_array_equal(st.u, np.tile([1.0, 1.0], (4, 1)))
    # y = t u, x = t^2 u / 2
    np.testing.assert_allclose(st.y[-1], [3.0, 3.0])
    np.testing.assert_allclose(st.x[-1], [4.5, 4.5])


def test_parallel_adjoints_switch_once():
    st = plane_dyn_extremal(square(), [1.0, 2.0], [2.0, 4.0], 3.0, n_samples=7)
    assert st.info["mode"] == "two_valued" and st.info["t0"] == pytest.approx(2.0)
    np.testing.assert_array_equal(st.u[:4], np.tile([1.0, 1.0], (4, 1)))
    np.testing.assert_array_equal(st.u[4:], np.tile([-1.0, -1.0], (3, 1)))
    # y peaks at the switch: 2 - (3 - 2) = 1
    np.testing.assert_allclose(st.y[-1], [1.0, 1.0], atol=1e-12)


def test_zero_adjoint_is_undetermined():
    st = plane_dyn_extremal(square(), [0.0, 0.0], [0.0, 0.0], 1.0, n_samples=5)
    assert st.info["mode"] == "undetermined"
    assert np.all(np.isnan(st.theta_polar))
    np.testing.assert_array_equal(st.x, 0.0)


def test_disc_motion_against_quadrature():
    p, q0 = np.array([0.5, -0.2]), np.array([0.3, 1.0])
    st = plane_dyn_extremal(Disc(1.0), p, q0, 4.0, x0=(1.0, 2.0), y0=(0.5, 0.0), n_samples=41)

    # on the disc u = q / |q|, so y and x follow by plain quadrature
    def rhs(t, z):
        q = q0 - p * t
        return [*z[2:], *(q / np.linalg.norm(q))]

    ref = solve_ivp(rhs, (0, 4), [1.0, 2.0, 0.5, 0.0], t_eval=st.t, rtol=1e-12, atol=1e-13, method="DOP853")
    np.testing.assert_allclose(st.x, ref.y[:2].T, atol=1e-8)
    np.testing.assert_allclose(st.y, ref.y[2:].T, atol=1e-8)
    assert set(st.columns()) >= {"t", "x1", "x2", "u1", "u2", "theta_polar"}
