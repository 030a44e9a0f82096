import numpy as np
import pytest

from wavecrit.radial_linear import (
    QuadratureError,
    RadialProfile,
    SpaceTimeField,
    algebraic_profile,
    bump_profile,
    dr_ru_linear,
    h_of,
    jbracket,
    linear_field,
    linear_solution,
    quad,
    radial_wave_residual,
    smooth_profile,
    xkappa_norm,
    zero_profile,
)


def simpson(f, a, b, n=20000):
    x = np.linspace(a, b, n + 1)
    y = f(x)
    return (b - a) / (3 * n) * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())


def oracle_u(g, t, r):
    H = h_of(g)
    return simpson(lambda s: H(t + r * s), -1.0, 1.0)


def test_h_examples():
    assert np.all(h_of(zero_profile())(np.linspace(-3, 3, 7)) == 0)
    g = algebraic_profile(1.0, 1.5)
    assert h_of(g)(0.0) == 0.0
    assert h_of(g)(1.0) == pytest.approx(2 ** -2.5 / 2, abs=1e-12)
    x = np.linspace(-20, 20, 401)
    assert np.allclose(h_of(g)(-x), -h_of(g)(x))


@pytest.mark.parametrize("make", [lambda: algebraic_profile(0.3, 1.5), lambda: smooth_profile(0.3, 2.0),
                                  lambda: bump_profile(0.3, 2.0)])
def test_profile_even_and_h_bounds(make):
    g = make()
    r = np.linspace(0, 60, 2401)
    assert np.max(np.abs(g(r) - g(-r))) <= 1e-14
    H = h_of(g)
    assert np.all(np.abs(H(r)) <= g.epsilon * jbracket(r) ** (-g.kappa) + 1e-15)


def test_profile_decay_constants():
    r = np.linspace(0, 200, 20001)
    assert 0 < smooth_profile(1.0, 1.5).decay_constant(r) < 10
    # the algebraic shape meets the derivative bound with constant kappa + 1
    assert algebraic_profile(1.0, 1.5).decay_constant(r) == pytest.approx(2.5)


def test_linear_zero_and_initial_time():
    assert linear_solution(zero_profile(), 3.0, 2.0) == 0.0
    g = algebraic_profile(1.0, 1.5)
    for r in (0.0, 0.5, 3.0, 40.0):
        assert abs(linear_solution(g, 0.0, r)) <= 1e-12


@pytest.mark.parametrize("t", [0.0, 0.7, 5.0, 31.0])
def test_linear_origin_branch(t):
    g = smooth_profile(1.0, 1.5)
    assert linear_solution(g, t, 0.0) == pytest.approx(t * g(t), abs=1e-12)
    assert linear_solution(g, t, 1e-9) == pytest.approx(t * g(t), abs=1e-8)


@pytest.mark.parametrize("t, r", [(2.0, 1.0), (1.0, 3.0), (10.0, 9.5), (0.3, 0.1)])
def test_linear_simpson_oracle(t, r):
    g = smooth_profile(1.0, 1.5)
    assert linear_solution(g, t, r) == pytest.approx(oracle_u(g, t, r), abs=1e-10)


def test_linear_initial_velocity():
    g = smooth_profile(1.0, 2.0)
    h = 1e-5
    for r in (0.0, 0.5, 2.0, 7.0):
        ut = (linear_solution(g, h, r) - linear_solution(g, 0.0, r)) / h
        assert ut == pytest.approx(float(g(r)), abs=1e-4)


def test_linearity():
    a, b = smooth_profile(1.0, 1.5), bump_profile(1.0, 3.0)
    c = a.combine(2.0, b, -0.5)
    for t, r in [(1.0, 0.5), (4.0, 6.0), (9.0, 2.0)]:
        lhs = linear_solution(c, t, r)
        rhs = 2.0 * linear_solution(a, t, r) - 0.5 * linear_solution(b, t, r)
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_dr_ru_at_zero_time():
    g = algebraic_profile(1.0, 1.5)
    assert np.allclose(dr_ru_linear(g, 0.0, np.linspace(0, 5, 11)), 0.0)


@pytest.mark.parametrize("t, r", [(2.0, 1.0), (5.0, 7.0), (12.0, 11.0)])
def test_dr_ru_finite_difference(t, r):
    g = smooth_profile(1.0, 1.5)
    errs = []
    for h in (1e-2, 5e-3):
        fd = ((r + h) * linear_solution(g, t, r + h) - (r - h) * linear_solution(g, t, r - h)) / (2 * h)
        errs.append(abs(fd - dr_ru_linear(g, t, r)))
    assert errs[1] < 1e-6
    assert errs[1] < errs[0] / 3 or errs[1] < 1e-9


def test_dr_ru_decay_bound():
    g = algebraic_profile(0.1, 1.5)
    t = np.linspace(0, 50, 101)
    r = np.linspace(0, 70, 141)
    T, R = np.meshgrid(t, r, indexing="ij")
    assert np.all(np.abs(dr_ru_linear(g, T, R)) <= 2 * 0.1 * jbracket(T - R) ** (-1.5) + 1e-15)


def test_vt_identity():
    g = smooth_profile(1.0, 1.5)
    H = h_of(g)
    for t, r in [(3.0, 1.0), (2.0, 5.0), (8.0, 7.9)]:
        h = 1e-4
        ut = (linear_solution(g, t + h, r) - linear_solution(g, t - h, r)) / (2 * h)
        assert ut * r == pytest.approx(float(H(t + r) - H(t - r)), abs=1e-6)


def test_linear_field_matches_pointwise():
    g = smooth_profile(0.5, 1.5)
    t = np.linspace(0, 6, 13)
    r = np.linspace(0, 8, 17)
    fld = linear_field(g, t, r)
    for i in (0, 3, 12):
        for j in (0, 1, 9, 16):
            assert fld.u[i, j] == pytest.approx(linear_solution(g, t[i], r[j]), abs=1e-10)


def test_linear_field_zero_data():
    fld = linear_field(zero_profile(), np.linspace(0, 4, 5), np.linspace(0, 4, 5))
    assert not fld.u.any() and not fld.dr_ru.any()
    assert xkappa_norm(fld, 1.5).total == 0


def test_xkappa_synthetic():
    kappa = 1.7
    t = np.linspace(0, 30, 61)
    r = np.linspace(0, 40, 81)
    T, R = np.meshgrid(t, r, indexing="ij")
    u = jbracket(T + R) ** -1 * jbracket(T - R) ** (-(kappa - 1))
    rep = xkappa_norm(SpaceTimeField(t, r, u, np.zeros_like(u)), kappa)
    assert rep.norm_u == pytest.approx(1.0) and rep.total == pytest.approx(1.0)
    assert rep.total >= max(rep.norm_u, rep.norm_dru) >= 0


def test_xkappa_proportional_to_epsilon():
    t = np.linspace(0, 30, 61)
    r = np.linspace(0, 50, 101)
    a = xkappa_norm(linear_field(algebraic_profile(1e-2, 1.5), t, r), 1.5).total
    b = xkappa_norm(linear_field(algebraic_profile(1e-1, 1.5), t, r), 1.5).total
    assert b / a == pytest.approx(10.0, rel=1e-10)


def test_xkappa_rejects_small_kappa():
    fld = linear_field(zero_profile(), [0.0, 1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        xkappa_norm(fld, 1.0)


def test_residual_second_order():
    g = smooth_profile(1.0, 2.0)
    out = []
    for h in (0.2, 0.1):
        # a dt = dr lattice is exact for travelling waves, so refine t more finely
        t = np.arange(0, 6 + 1e-9, h / 2)
        r = np.arange(0, 6 + 1e-9, h)
        res = radial_wave_residual(linear_field(g, t, r))
        ti, rj = np.searchsorted(t, 3.0), np.searchsorted(r, 2.0)
        out.append(abs(res[ti - 1, rj - 1]))
    assert 3.5 <= out[0] / out[1] <= 4.5


def test_field_validation_and_csv(tmp_path):
    with pytest.raises(ValueError):
        SpaceTimeField(np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        SpaceTimeField(np.array([0.0, 1.0]), np.array([0.0, 1.0]), np.full((2, 2), np.nan))
    fld = linear_field(bump_profile(1.0), np.linspace(0, 1, 3), np.linspace(0, 2, 3))
    fld.to_csv(tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0] == "t,r,u,dr_ru" and len(lines) == 10


@pytest.mark.filterwarnings("ignore")
def test_quadrature_failure_is_reported():
    with pytest.raises(QuadratureError):
        quad(lambda x: 1.0 / np.sqrt(abs(x - 0.3)) * np.sin(1e4 * x), 0.0, 1.0, tol=1e-14)
