import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from convextrig import (
    BranchingError,
    BranchPolicy,
    Disc,
    Ellipse,
    LpBall,
    Potential,
    branch_enumerate,
    build_trig,
    classify_stationary,
    diamond,
    integrate,
    quadrature_time,
    square,
)
from convextrig.ct_ode import (
    InadmissibleDirectionError,
    InconsistentTrajectoryError,
    energy,
    recover_control,
    stationary_points,
)


def lie_potential(body, a, b):
    """U = 1/2 (a q^2 - b p^2) on the polar body of ``body``."""
    return Potential.from_quadratic(build_trig(body.polar()), [[-b, 0.0], [0.0, a]])


def pendulum():
    return Potential.from_quadratic(build_trig(Disc(1.0)), np.zeros((2, 2)), g=(-1.0, 0.0))


def test_energy_at_rest_is_potential():
    pot = lie_potential(square(), 1, 1)
    for th in (0.0, 0.4, 1.0, 2.7):
        assert energy(pot, th, 0.0) == pytest.approx(float(pot.U(th)))


def test_pendulum_energy_and_motion():
    pot = pendulum()
    th = np.linspace(-3, 3, 11)
    np.testing.assert_allclose(pot.U(th), -np.cos(th), atol=1e-14)
    tr = integrate(pot, 0.5, 1.2, 15.0, n_samples=301)
    assert tr.energy == pytest.approx(0.5 * 1.2**2 - math.cos(0.5))
    ref = solve_ivp(lambda t, y: [y[1], -math.sin(y[0])], (0, 15), [0.5, 1.2], t_eval=tr.t, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(tr.theta_polar, ref.y[0], atol=1e-7)
    np.testing.assert_allclose(tr.theta_polar_dot, ref.y[1], atol=1e-7)


def test_potential_derivative_one_sided_limits():
    pot = lie_potential(square(), 1, 1)
    h = 1e-7
    for th in (0.3, 1.0, 2.0, 2.5):
        left, right = pot.Uprime(th)
        assert (pot.U(th) - pot.U(th - h)) / h == pytest.approx(left, abs=1e-6)
        assert (pot.U(th + h) - pot.U(th)) / h == pytest.approx(right, abs=1e-6)


@pytest.mark.parametrize(
    "body, ab",
    [(Disc(1.0), (1, 1)), (Ellipse(2.0, 1.0), (1, 0)), (LpBall(3.0), (-1, 1)), (square(), (1, 0)), (diamond(), (1, 1))],
)
def test_energy_is_conserved(body, ab):
    pot = lie_potential(body, *ab)
    rng = np.random.default_rng(11)
    for _ in range(3):
        tr = integrate(pot, rng.uniform(0, pot.period), rng.normal(), 10.0, n_samples=201)
        E = pot.energy(tr.theta_polar, tr.theta_polar_dot)
        assert np.max(np.abs(E - tr.energy)) < 1e-8 * (1 + abs(tr.energy))


def test_hyperbolic_closed_form_on_first_strip():
    pot = lie_potential(square(), -1, 1)
    th0, v0 = 0.3, 0.2
    tr = integrate(pot, th0, v0, 0.6, n_samples=401)
    s2 = math.sqrt(2.0)
    exact = (th0 - 0.5) * np.cosh(s2 * tr.t) + v0 / s2 * np.sinh(s2 * tr.t) + 0.5
    inside = (tr.theta_polar > 0) & (tr.theta_polar < 1)
    assert inside.sum() > 50
    np.testing.assert_allclose(tr.theta_polar[inside], exact[inside], atol=1e-8)


def test_circular_closed_form_on_first_strip():
    pot = lie_potential(diamond(), 1, -1)
    th0, v0 = 0.1, 0.3
    tr = integrate(pot, th0, v0, 2 * math.pi, n_samples=401)
    exact = th0 * np.cos(tr.t) + v0 * np.sin(tr.t)
    assert np.all((tr.theta_polar > -1) & (tr.theta_polar < 1))
    np.testing.assert_allclose(tr.theta_polar, exact, atol=1e-8)


def test_stationary_start_at_centre_is_constant():
    pot = pendulum()
    assert classify_stationary(pot, 0.0).kind == "center"
    tr = integrate(pot, 0.0, 0.0, 5.0, n_samples=51)
    np.testing.assert_array_equal(tr.theta_polar, 0.0)
    np.testing.assert_array_equal(tr.theta_polar_dot, 0.0)


def test_finite_time_saddle_on_square():
    pot = lie_potential(square(), 1, 1)
    info = classify_stationary(pot, 1.0)
    assert info.kind == "saddle_finite_time" and info.branching
    assert set(info.admissible_sides) == {-1, 1}
    assert all(tau > 0 for tau in info.tau.values())
    assert classify_stationary(pot, 0.5).kind == "not_stationary"


@pytest.mark.parametrize("p", [1.2, 1.5, 2.0])
def test_lp_with_large_polar_exponent_has_no_branching(p):
    pot = lie_potential(LpBall(p), 1, 1)
    kinds = {classify_stationary(pot, th).kind for th in stationary_points(pot, 1024)}
    assert "saddle_finite_time" not in kinds
    assert "saddle_slow" in kinds


@pytest.mark.parametrize("body", [Disc(1.0), Ellipse(2.0, 1.0), Ellipse(1.3, 0.8, (0.2, -0.1))])
@pytest.mark.parametrize("ab", [(1, 1), (-1, 1), (1, 0), (1, -1)])
def test_smooth_polar_never_branches(body, ab):
    pot = lie_potential(body, *ab)
    for th in stationary_points(pot, 1024):
        assert classify_stationary(pot, th).dynamics in ("center", "saddle_slow")


def test_fail_policy_raises_at_branch_point():
    pot = lie_potential(square(), 1, 1)
    with pytest.raises(BranchingError):
        integrate(pot, 1.0, 0.0, 3.0, "fail")


def test_fail_policy_is_quiet_when_moving():
    pot = lie_potential(Ellipse(2.0, 1.0), 1, 1)
    integrate(pot, 0.4, 0.7, 10.0, "fail", n_samples=101)


def test_zero_dwell_matches_direct_departure():
    pot = lie_potential(square(), 1, 0)
    a = branch_enumerate(pot, 1.0, 0.0, 1, 4.0, n_samples=401)
    b = integrate(pot, 1.0, 0.0, 4.0, "depart-right", n_samples=401)
    np.testing.assert_array_equal(a.t, b.t)
    np.testing.assert_allclose(a.theta_polar, b.theta_polar, atol=1e-14)


def test_dwell_is_a_time_shift():
    pot = lie_potential(square(), 1, 0)
    a = branch_enumerate(pot, 1.0, 0.0, 1, 5.0, n_samples=2001)
    b = branch_enumerate(pot, 1.0, 1.0, 1, 5.0, n_samples=2001)
    assert np.all(b.theta_polar[b.t <= 1.0] == 1.0)
    later = b.t >= 1.0
    shifted = np.interp(b.t[later] - 1.0, a.t, a.theta_polar)
    np.testing.assert_allclose(b.theta_polar[later], shifted, atol=1e-5)


def test_departure_joins_bang_and_singular_arcs():
    pot = lie_potential(square(), 1, 0)
    tr = branch_enumerate(pot, 1.0, 0.5, 1, 6.0, n_samples=601)
    labels = set(tr.arc_label)
    assert "bang" in labels and "general_singular" in labels


def test_inadmissible_departure():
    pot = pendulum()
    with pytest.raises(InadmissibleDirectionError):
        branch_enumerate(pot, 0.0, 0.0, 1, 1.0)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("stay", BranchPolicy("stay")),
        ("fail_on_branch", BranchPolicy("fail", later="fail")),
        ("depart-left", BranchPolicy("depart", -1)),
        ("dwell:0.5:right", BranchPolicy("depart", 1, 0.5)),
    ],
)
def test_branch_policy_parse(text, expected):
    assert BranchPolicy.parse(text) == expected


@pytest.mark.parametrize("text", ["jump", "dwell:1", "dwell:-1:left", "dwell:1:up"])
def test_branch_policy_rejects(text):
    with pytest.raises(ValueError):
        BranchPolicy.parse(text)


def test_disc_control_equals_polar_angle():
    pot = lie_potential(Disc(1.0), 1, 1)
    tr = integrate(pot, 0.2, 0.9, 5.0, n_samples=201)
    np.testing.assert_allclose(tr.theta, tr.theta_polar, atol=1e-12)


def test_acceleration_is_minus_potential_slope():
    pot = lie_potential(Ellipse(1.5, 0.8), 1, -1)
    T, n = 3.0, 30001
    tr = integrate(pot, 0.2, 0.5, T, n_samples=n)
    h = tr.t[1] - tr.t[0]
    acc = (tr.theta_polar[2:] - 2 * tr.theta_polar[1:-1] + tr.theta_polar[:-2]) / h**2
    Q = pot.table.body.point_at(tr.theta_polar[1:-1])
    g = pot.grad(Q)
    u = tr.u[1:-1]
    # theta_polar'' = f_p sin(theta) - f_q cos(theta)
    rhs = g[:, 0] * u[:, 1] - g[:, 1] * u[:, 0]
    np.testing.assert_allclose(acc, rhs, atol=1e-6)


def test_quadrature_time_matches_monotone_leg():
    pot = lie_potential(LpBall(3.0), 1, -1)
    tr = integrate(pot, 0.1, 2.0, 0.5, n_samples=501)
    assert np.all(tr.theta_polar_dot > 0)
    dt = quadrature_time(pot, tr.energy, tr.theta_polar[0], tr.theta_polar[-1])
    assert dt == pytest.approx(tr.t[-1] - tr.t[0], abs=1e-7)


def test_recover_control_rejects_off_shell_trajectory():
    pot = pendulum()
    tr = integrate(pot, 0.5, 1.0, 2.0, n_samples=21)
    tr.energy += 1.0
    with pytest.raises(InconsistentTrajectoryError):
        recover_control(pot, tr)


def test_special_singular_selection():
    # f = 1/2 |x - (1, 0)|^2 has its minimum at the diamond's vertex (1, 0)
    pot = Potential.from_quadratic(build_trig(diamond()), np.eye(2), g=(-1.0, 0.0), c=0.5)
    info = classify_stationary(pot, 0.0)
    assert info.singular == "special" and info.kind == "special_singular"
    tr = integrate(pot, 0.0, 0.0, 1.0, n_samples=11, recover=False)
    lo, hi = pot.table.body.dual_lift(0.0)
    assert hi - lo == pytest.approx(2.0)
    recover_control(pot, tr)
    np.testing.assert_allclose(tr.theta, 0.5 * (lo + hi), atol=1e-14)
    recover_control(pot, tr, selection=lambda t: t)
    np.testing.assert_allclose(tr.theta, lo + tr.t * (hi - lo), atol=1e-14)
    assert set(tr.arc_label) == {"special_singular"}
    with pytest.raises(ValueError):
        recover_control(pot, tr, selection=lambda t: 2 + t)
