import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from convextrig import Disc, Ellipse, LpBall, build_trig, cut_disc, square
from convextrig.applications import (
    PROBLEMS,
    AdmissibilityError,
    YachtSpec,
    critical_angles,
    level_angles,
    rotation_identity_residual,
    yacht_classify,
    yacht_extremal,
    yacht_reduce,
)
from convextrig.applications.yachts import _dual_sin

BODIES = {
    "ellipse": Ellipse(2.0, 1.0, (0.3, 0.1)),
    "cut_disc": cut_disc(0.5),
    "square": square(),
    "l3": LpBall(3.0),
}


def test_unknown_problem():
    with pytest.raises(ValueError):
        YachtSpec("rowing", square())


def test_zero_rotation_is_identity():
    red = yacht_reduce(YachtSpec("elastica", BODIES["ellipse"], 1.0, 0.0))
    assert red.alpha == 0.0 and red.alpha_tilde == 0.0 and red.alpha_tilde_polar == 0.0
    th = np.linspace(0, red.table.period, 50)
    np.testing.assert_array_equal(red.table.cos_sin(th), build_trig(BODIES["ellipse"]).cos_sin(th))
    with pytest.raises(ValueError):
        yacht_reduce(YachtSpec("elastica", square(), 0.0, 0.0))


def test_rotation_identity_on_square():
    rng = np.random.default_rng(5)
    theta = rng.uniform(0, 8, 10_000)
    alpha = np.repeat(rng.uniform(0, 2 * np.pi, 10), 1000)
    assert rotation_identity_residual(square(), theta, alpha) < 1e-9


def test_rotation_identity_on_disc_is_angle_difference():
    th, a = 1.1, 0.4
    assert rotation_identity_residual(Disc(1.0), [th], [a]) < 1e-14
    red = yacht_reduce(YachtSpec("elastica", Disc(1.0), math.cos(a), math.sin(a)))
    assert red.alpha_tilde == pytest.approx(a)
    assert float(red.table.cos(th - a)) == pytest.approx(math.cos(th - a))


@pytest.mark.parametrize("name", list(BODIES))
def test_critical_angles(name):
    red = yacht_reduce(YachtSpec("markov_dubins", BODIES[name], 0.6, 0.8))
    c = critical_angles(red)
    P = c.period
    assert c.theta3 <= c.theta4 < c.theta5 < c.theta1 <= c.theta2 < c.theta6 < c.theta3 + P
    tab = red.table
    assert float(tab.cos(c.theta3)) == pytest.approx(c.m2) and float(tab.cos(c.theta4)) == pytest.approx(c.m2)
    assert float(tab.cos(c.theta1)) == pytest.approx(c.m1) and float(tab.cos(c.theta2)) == pytest.approx(c.m1)
    assert float(tab.cos(c.theta5)) == pytest.approx(0.0, abs=1e-12)
    assert float(tab.cos(c.theta6)) == pytest.approx(0.0, abs=1e-12)
    for level in (0.5 * c.m1, 0.0, 0.5 * c.m2):
        dec, inc = level_angles(red, c, level)
        np.testing.assert_allclose(tab.cos([dec, inc]), level, atol=1e-9)
    with pytest.raises(AdmissibilityError):
        level_angles(red, c, c.m2 + 1.0)


@pytest.mark.parametrize("problem", ["markov_dubins", "reeds_shepp"])
@pytest.mark.parametrize("body", [Disc(1.0), BODIES["ellipse"], square(), cut_disc(0.5)])
def test_full_rate_loops_meet_after_2S(problem, body):
    spec = YachtSpec(problem, body, 0.0, 0.0)
    left = yacht_extremal(spec, 1.0, 0.3, 1, 2 * body.area, 201)
    right = yacht_extremal(spec, 1.0, 0.3, -1, 2 * body.area, 201)
    assert abs(left.x[-1] - right.x[-1]) < 1e-8 and abs(left.y[-1] - right.y[-1]) < 1e-8
    # the heading has made one full turn in opposite senses
    assert left.theta[-1] - right.theta[-1] == pytest.approx(4 * body.area)


def test_degenerate_elastica_is_a_constant_turn():
    spec = YachtSpec("elastica", Disc(1.0), 0.0, 0.0)
    tr = yacht_extremal(spec, 0.5, 0.0, 1, 2 * math.pi, 101)
    # u2 = 1: a unit circle through the origin
    np.testing.assert_allclose(np.hypot(tr.x, tr.y - 1.0), 1.0, atol=1e-10)


@pytest.mark.parametrize("name", list(BODIES))
def test_dubins_switches_at_equal_intervals(name):
    spec = YachtSpec("markov_dubins", BODIES[name], 0.6, 0.8)
    red = yacht_reduce(spec)
    rep = yacht_classify(spec, 0.0, red)
    assert rep["case"] == 3
    T1 = rep["times"]["T1"]
    assert 0 < T1 <= 2 * red.S
    assert T1 == pytest.approx(rep["theta_H_plus"] - rep["theta_H_minus"])
    np.testing.assert_allclose(red.table.cos([rep["theta_H_minus"], rep["theta_H_plus"]]), 0.0, atol=1e-9)
    tr = yacht_extremal(spec, 0.0, rep["theta1"] + red.alpha_tilde, 1, 20.0, 201, red=red)
    gaps = np.diff(tr.switch_times())
    assert len(gaps) >= 2
    np.testing.assert_allclose(gaps, T1, atol=1e-9)


def test_dubins_rejects_low_hamiltonian():
    spec = YachtSpec("markov_dubins", square(), 1.0, 0.0)
    c = critical_angles(yacht_reduce(spec))
    assert yacht_classify(spec, c.m1 - 0.5)["case"] == 1
    with pytest.raises(AdmissibilityError):
        yacht_extremal(spec, c.m1 - 0.5, 0.0)


def _reeds_shepp_events(tab, theta, H, n):
    """Switch times from event detection on theta' = u2, psi3' = u1 sin°."""

    def rhs(_, y, u1, u2):
        return [u2, u1 * float(_dual_sin(tab, y[0]))]

    y, u1, u2, t, times = [theta, H], -1.0, 1.0, 0.0, []
    for _ in range(n):
        def hit_psi(_, y, u1, u2):
            return y[1]

        def hit_cos(_, y, u1, u2):
            return float(tab.cos(y[0]))

        hit_psi.terminal = hit_cos.terminal = True
        hit_psi.direction = -u2
        hit_cos.direction = -np.sign(float(tab.cos(y[0] + u2 * 1e-6)))
        r = solve_ivp(rhs, (t, t + 20), y, args=(u1, u2), events=[hit_psi, hit_cos], rtol=1e-12, atol=1e-13,
                      method="DOP853")
        te = [(e[0] if len(e) else np.inf) for e in r.t_events]
        i = int(np.argmin(te))
        t, y = te[i], r.y_events[i][0]
        times.append(t)
        if i == 0:
            u2, y[1] = -u2, 0.0
        else:
            u1 = -u1
    return np.array(times)


@pytest.mark.parametrize("name", list(BODIES))
def test_reeds_shepp_case_two(name):
    spec = YachtSpec("reeds_shepp", BODIES[name], 0.6, 0.8)
    red = yacht_reduce(spec)
    c = critical_angles(red)
    H = 0.5 * min(-c.m1, c.m2)
    rep = yacht_classify(spec, H, red)
    assert rep["case"] == 2
    times = rep["times"]
    assert times["T(1,1)"] == times["T(1,-1)"]
    assert times["T(1,1)"] == pytest.approx(c.theta5 - rep["theta_pH_plus"])
    tr = yacht_extremal(spec, H, c.theta5 + red.alpha_tilde, 1, 12.0, 201, red=red)
    ours = np.array([e["t"] for e in tr.schedule][:6])
    ref = _reeds_shepp_events(red.table, c.theta5, H, 6)
    np.testing.assert_allclose(ours, ref, atol=1e-8)


def _hamiltonian_levels(problem, c):
    m1, m2 = c.m1, c.m2
    if problem in ("elastica", "markov_dubins"):
        return [0.5 * (m1 + m2), m2 + 0.3]
    if problem == "reeds_shepp":
        return [0.5 * min(-m1, m2), m2 + 0.2]
    return [0.5 * min(m1 * m1, m2 * m2), m2 * m2 + 0.2]


@pytest.mark.parametrize("problem", PROBLEMS)
@pytest.mark.parametrize("name", list(BODIES))
def test_hamiltonian_is_constant(problem, name):
    spec = YachtSpec(problem, BODIES[name], 0.6, 0.8)
    red = yacht_reduce(spec)
    c = critical_angles(red)
    for H in _hamiltonian_levels(problem, c):
        th0 = (c.theta5 if problem in ("reeds_shepp", "sr_se2") else 0.5 * (c.theta1 + c.theta2)) + red.alpha_tilde
        tr = yacht_extremal(spec, H, th0, 1, 10.0, 401, red=red)
        assert np.max(np.abs(tr.hamiltonian - H)) < 1e-8


@pytest.mark.parametrize("problem", ["markov_dubins", "reeds_shepp", "elastica"])
def test_yacht_kinematics(problem):
    body = BODIES["ellipse"]
    spec = YachtSpec(problem, body, 0.6, 0.8)
    red = yacht_reduce(spec)
    c = critical_angles(red)
    H = _hamiltonian_levels(problem, c)[0]
    th0 = (c.theta5 if problem == "reeds_shepp" else 0.5 * (c.theta1 + c.theta2)) + red.alpha_tilde
    tr = yacht_extremal(spec, H, th0, 1, 6.0, 6001, red=red)
    dt = tr.t[1] - tr.t[0]
    P = build_trig(body).cos_sin(tr.theta)
    mid_u1 = tr.u[:-1, 0]
    vel = np.diff(np.column_stack([tr.x, tr.y]), axis=0) / dt
    smooth = np.all(tr.u[:-1] == tr.u[1:], axis=1)
    expected = mid_u1[:, None] * 0.5 * (P[:-1] + P[1:])
    np.testing.assert_allclose(vel[smooth], expected[smooth], atol=1e-4)


@pytest.mark.parametrize("name", list(BODIES))
def test_sr_se2_energy(name):
    spec = YachtSpec("sr_se2", BODIES[name], 0.6, 0.8)
    red = yacht_reduce(spec)
    th0 = 0.7
    H = 0.5 * float(red.cos_tilde_from_base(th0)) ** 2 + 0.4
    tr = yacht_extremal(spec, H, th0, 1, 15.0, 301, red=red)
    tt = tr.vertical.theta_polar
    val = 0.5 * (red.table.cos(tt) ** 2 + tr.vertical.theta_polar_dot**2)
    assert np.ptp(val) < 1e-8
    assert val[0] == pytest.approx(H)


def test_reeds_shepp_needs_nonnegative_h():
    spec = YachtSpec("reeds_shepp", square(), 1.0, 0.0)
    with pytest.raises(AdmissibilityError):
        yacht_extremal(spec, -0.1, 0.0)


def test_schedule_entries_are_well_formed():
    spec = YachtSpec("reeds_shepp", BODIES["l3"], 0.6, 0.8)
    red = yacht_reduce(spec)
    c = critical_angles(red)
    tr = yacht_extremal(spec, 0.5 * min(-c.m1, c.m2), c.theta5 + red.alpha_tilde, 1, 5.0, 101, red=red)
    assert tr.schedule
    for e in tr.schedule:
        assert set(e) >= {"t", "label"}
    t = [e["t"] for e in tr.schedule]
    assert t == sorted(t)
