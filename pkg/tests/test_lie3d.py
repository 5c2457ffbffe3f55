import math

import numpy as np
import pytest
from scipy.linalg import expm

from convextrig import Disc, Ellipse, LpBall, cut_disc, diamond, square
from convextrig.lie3d import (
    LieSpec,
    casimir,
    equilibria,
    extremal,
    extremal_type_report,
    group_constraint,
    integrate_group,
    level_curve,
    phase_portrait,
    reduce_chi_kappa,
    representation,
    singular_classify,
    vertical_potential,
)

CASES = [(-1, 1), (0, 1), (1, 1), (1, 0), (1, -1)]
KEYS = {"h3": (0, 0), "se2": (1, 0), "sh2": (0, 1), "su2": (1, -1), "sl2-": (-1, 1), "sl2+": (1, 1)}


def bracket(A, B):
    return A @ B - B @ A


@pytest.mark.parametrize(
    "chi, kappa, expected",
    [
        (0.0, 0.0, (0, 0, "h3")),
        (2**-0.5, 2**-0.5, (1, 0, "se2")),
        (2**-0.5, -(2**-0.5), (0, 1, "sh2")),
        (0.0, -1.0, (-1, 1, "sl2")),
        (0.0, 1.0, (1, -1, "su2")),
        (1.0, 0.0, (1, 1, "sl2")),
    ],
)
def test_reduce_chi_kappa(chi, kappa, expected):
    assert reduce_chi_kappa(chi, kappa) == expected


@pytest.mark.parametrize("chi, kappa", [(0.5, 0.5), (-1.0, 0.0)])
def test_reduce_rejects_unnormalized(chi, kappa):
    with pytest.raises(ValueError):
        reduce_chi_kappa(chi, kappa)


def test_spec_validation():
    with pytest.raises(ValueError):
        LieSpec(1, 2, square())
    with pytest.raises(ValueError):
        LieSpec(1, 0, square(), H=0.0)


@pytest.mark.parametrize("key", list(KEYS))
def test_representation_commutators(key):
    X1, X2, X3 = representation(key)
    a, b = KEYS[key]
    np.testing.assert_allclose(bracket(X1, X2), X3, atol=1e-14)
    np.testing.assert_allclose(bracket(X3, X1), a * X2, atol=1e-14)
    np.testing.assert_allclose(bracket(X3, X2), b * X1, atol=1e-14)


def test_square_potential_with_a0_b1():
    U = vertical_potential(LieSpec(0, 1, square())).U
    th = np.linspace(0, 2, 41)
    for k in (0, 1, -2):
        np.testing.assert_allclose(U(th + 2 * k), -((th - 1) ** 2) / 2, atol=1e-14)


def test_diamond_potential_with_am1_b1():
    U = vertical_potential(LieSpec(-1, 1, diamond())).U
    th = np.linspace(-1, 1, 41)
    np.testing.assert_allclose(U(th), -(1 + th**2) / 2, atol=1e-14)


def test_disc_potential_is_half_sine_square():
    U = vertical_potential(LieSpec(1, 0, Disc(1.0))).U
    th = np.linspace(0, 7, 50)
    np.testing.assert_allclose(U(th), 0.5 * np.sin(th) ** 2, atol=1e-14)


def test_diamond_potential_symmetries():
    U = vertical_potential(LieSpec(1, 1, diamond())).U
    x = np.linspace(0, 1, 21)
    # on the polar square: odd about the vertex theta_pol = 1, even about 0
    np.testing.assert_allclose(U(1 + x), -U(1 - x), atol=1e-14)
    np.testing.assert_allclose(U(-x), U(x), atol=1e-14)


def test_special_singulars_on_square():
    spec = LieSpec(0, 1, square())
    for th in (1.0, 3.0, -1.0):
        info = singular_classify(spec, th)
        assert info.kind == "special" and info.rank == 1
        ul, ur = info.segment
        # the supporting segment is a horizontal edge of the square
        assert ul[1] == pytest.approx(ur[1]) and abs(ul[1]) == pytest.approx(1.0)
    assert singular_classify(spec, 0.5).kind == "none"


@pytest.mark.parametrize("n", range(4))
def test_general_singulars_on_square(n):
    info = singular_classify(LieSpec(-1, 1, square()), float(n))
    assert info.kind == "general"
    assert square().gauge(info.u) == pytest.approx(1.0)


@pytest.mark.parametrize("ab", CASES)
def test_diamond_has_no_special_singulars(ab):
    spec = LieSpec(*ab, diamond())
    th = np.concatenate([np.linspace(0, 8, 33), spec.polar_table.breakpoints])
    assert all(singular_classify(spec, x).kind != "special" for x in th)


def test_square_portrait_for_se2():
    pp = phase_portrait(LieSpec(1, 0, square()), energies=[0.25])
    by_theta = {round(r["theta_polar"], 9): r for r in pp.equilibria}
    assert sorted(by_theta) == [0.0, 1.0, 2.0, 3.0]
    for th in (0.0, 2.0):
        assert by_theta[th]["dynamics"] == "center"
    for th in (1.0, 3.0):
        assert by_theta[th]["dynamics"] == "saddle_finite_time"
        assert by_theta[th]["singular"] == "general"
    assert [b["theta_polar"] for b in pp.branching] == pytest.approx([1.0, 3.0])
    assert all(b["mixed"] for b in pp.branching)


def test_lp_portrait_with_large_polar_exponent():
    spec = LieSpec(-1, 1, LpBall(1.5))
    Sp = spec.polar_table.S
    eq, _ = equilibria(spec, 1024)
    got = {round(r["theta_polar"] / Sp, 6): r["dynamics"] for r in eq}
    assert got[0.0] == "saddle_slow"
    assert got[0.5] == "saddle_slow"
    assert got[0.25] == "center"


@pytest.mark.parametrize("ab", [(1, 0), (1, 1)])
def test_disc_portrait_matches_pendulum(ab):
    spec = LieSpec(*ab, Disc(1.0))
    eq, cont = equilibria(spec, 2048)
    assert cont == []
    th = np.array([r["theta_polar"] for r in eq])
    # U is pi-periodic: two equilibria per period of U, at multiples of pi/2
    assert len(th) == 4
    np.testing.assert_allclose(th, np.arange(4) * math.pi / 2, atol=1e-9)
    U = spec.potential.U
    for r in eq:
        x = r["theta_polar"]
        expected = "center" if U(x) < U(x + 0.1) else "saddle_slow"
        assert r["dynamics"] == expected


def test_flat_disc_potential_is_one_continuum():
    eq, cont = equilibria(LieSpec(-1, 1, Disc(1.0)), 512)
    assert len(cont) == 1
    assert cont[0]["theta_polar_end"] - cont[0]["theta_polar_start"] > 2 * math.pi * 0.99


def test_level_curve_lies_on_energy_level():
    spec = LieSpec(1, 1, LpBall(3.0), H=2.0)
    E = 0.3 * spec.H
    pts = level_curve(spec, E, 257)
    val = casimir(spec, np.column_stack([spec.H * spec.polar_table.cos_sin(pts[:, 0]), pts[:, 1]])) / spec.H
    np.testing.assert_allclose(val, E, atol=1e-12)


def test_portrait_equilibria_are_stationary():
    spec = LieSpec(1, 1, Ellipse(2.0, 1.0, (0.2, 0.1)))
    pp = phase_portrait(spec)
    for r in pp.equilibria:
        assert spec.potential.is_stationary(r["theta_polar"])


@pytest.mark.parametrize(
    "body, ab, types, nonunique",
    [
        (LpBall(3.0), (1, 1), {"bang", "singular", "mixed"}, True),
        (LpBall(3.0), (1, 0), {"bang", "singular", "mixed"}, True),
        (LpBall(3.0), (-1, 1), {"bang", "singular"}, False),
        (LpBall(1.5), (1, 1), {"bang"}, False),
        (Disc(1.0), (1, -1), {"bang"}, False),
    ],
)
def test_taxonomy_report(body, ab, types, nonunique):
    r = extremal_type_report(LieSpec(*ab, body), n_scan=1024)
    assert r["agree"]
    assert r["observed"]["types"] == types
    assert r["observed"]["nonuniqueness"] == nonunique


@pytest.mark.parametrize("ab", CASES)
def test_polygon_taxonomy(ab):
    r = extremal_type_report(LieSpec(*ab, square()), n_scan=1024)
    assert r["agree"] and r["observed"]["types"] <= {"bang_bang", "singular", "mixed"}


def test_no_theorem_for_cut_disc():
    r = extremal_type_report(LieSpec(1, 1, cut_disc(0.5)), n_scan=512)
    assert r["theorem"] == "no theorem applies" and r["agree"] is None


def test_zero_control_stays_at_identity():
    spec = LieSpec(1, 1, Disc(1.0))
    t = np.linspace(0, 3, 31)
    g = integrate_group(spec, t, np.zeros((31, 2)))
    np.testing.assert_allclose(g.q, np.broadcast_to(np.eye(2), g.q.shape), atol=1e-15)


def test_se2_constant_control_translates():
    spec = LieSpec(1, 0, Disc(1.0))
    X1, X2, _ = representation("se2")
    t = np.linspace(0, 2, 11)
    # X2 is the translation generator in this representation
    g = integrate_group(spec, t, np.tile([0.0, 1.0], (11, 1)))
    for k, tk in enumerate(t):
        np.testing.assert_allclose(g.q[k], expm(tk * X2), atol=1e-13)
        np.testing.assert_allclose(g.q[k][:2, :2], np.eye(2), atol=1e-13)
    np.testing.assert_allclose(np.linalg.norm(g.q[:, :2, 2], axis=1), t, atol=1e-13)


def test_sl2_determinant_is_preserved():
    spec = LieSpec(-1, 1, Disc(1.0))
    t = np.linspace(0, 50, 10001)
    u = np.column_stack([np.cos(t), np.sin(t)])
    g = integrate_group(spec, t, u)
    assert np.max(np.abs(np.linalg.det(g.q) - 1)) < 1e-9
    assert max(group_constraint(g.key, M) for M in g.q) < 1e-9


@pytest.mark.parametrize(
    "ab, body",
    [((-1, 1), Disc(1.0)), ((1, 1), square()), ((1, -1), LpBall(3.0)), ((1, 0), Ellipse(2, 1)), ((0, 1), diamond())],
)
def test_extremal_invariants(ab, body):
    spec = LieSpec(*ab, body, H=2.0)
    ex = extremal(spec, 0.3, 0.7, 8.0, n_samples=801)
    E = ex.vertical.energy
    assert np.max(np.abs(ex.casimir_energy - spec.H * E)) < 1e-8
    assert np.max(np.abs(body.support(ex.h[:, :2]) - spec.H)) < 1e-8
    assert max(group_constraint(ex.group.key, M) for M in ex.group.q) < 1e-9
    assert ex.group.flat().shape[0] == len(ex.vertical.t)


def test_su2_flat_layout_splits_complex_entries():
    ex = extremal(LieSpec(1, -1, Disc(1.0)), 0.1, 0.2, 1.0, n_samples=11)
    assert ex.group.flat().shape == (len(ex.vertical.t), 8)
