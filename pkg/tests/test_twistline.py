import cmath
import math
from fractions import Fraction as F

import numpy as np
import pytest
from scipy import integrate

from loopmaps import critline
from loopmaps.critline import OutOfRangeError, PoleError, laurent_coefficients
from loopmaps.ringgen import Twisting, UnsupportedModelError, involution_of
from loopmaps.twistline import (
    BipartiteReduction,
    EmptyLineError,
    TwistSolution,
    b_twist,
    n_twist,
    nzero_line_residual,
    twist_critical_line,
    twist_cut_residual,
    twist_density,
    twist_density_weight,
    twist_dilute_point,
    twist_dx_of_v,
    twist_involution,
    twist_kappa,
    twist_omega,
    twist_parabola,
    twist_particular,
    twist_positivity_bound,
    twist_principal_part,
    twist_resolvent,
    twist_solution,
    twist_x_of_v,
)

rng = np.random.default_rng(11)
N03 = n_twist(0.3)


@pytest.fixture(scope="module")
def line03():
    return twist_critical_line(N03)


@pytest.fixture(scope="module")
def dilute03(line03):
    return line03[0]


@pytest.fixture(scope="module")
def dense03(line03):
    return line03[len(line03) // 2]


def _rand_v(k):
    return rng.uniform(0.1, 2.0, k) + 1j * rng.uniform(-0.4, 0.4, k)


def test_b_convention():
    assert b_twist(0.5) == pytest.approx(1 / 3, rel=1e-15)
    assert b_twist(N03) == pytest.approx(0.3, rel=1e-14)
    for n in np.linspace(0.01, 0.99, 9):
        assert 0 < b_twist(n) < 0.5
    # the bending model uses arccos(n/2); the two must never be confused
    assert critline.b_of_n(0.5) != pytest.approx(b_twist(0.5), rel=1e-3)
    sol = twist_solution(0.5, 0.08)
    assert sol.b == pytest.approx(1 / 3)


def test_x_of_v():
    h = 0.09
    assert abs(twist_x_of_v(h, 1j * math.pi)) <= 1e-15
    assert twist_x_of_v(h, 40.0).real == pytest.approx(1 / (2 * h), rel=1e-15)
    for v in _rand_v(6):
        assert abs(twist_x_of_v(h, v + 1j * math.pi) - (1 / h - twist_x_of_v(h, v))) <= 1e-12
        d = (twist_x_of_v(h, v + 1e-6) - twist_x_of_v(h, v - 1e-6)) / 2e-6
        assert abs(d - twist_dx_of_v(h, v)) <= 1e-7
    with pytest.raises(PoleError):
        twist_x_of_v(h, 1j * math.pi / 2)


def test_involution_and_fixed_point():
    h = 0.07
    s = twist_involution(h)
    for X in rng.uniform(-3, 10, 5):
        assert s(X) == pytest.approx(1 / h - X, rel=1e-14)
        assert s(s(X)) == pytest.approx(X, rel=1e-12, abs=1e-12)
    assert s.pole is None  # infinity is mapped to itself
    assert s(BipartiteReduction(h).fixed_point) == pytest.approx(1 / (2 * h))
    assert twist_solution(0.3, 0.1).Gamma == 1 / (2 * 0.1)
    with pytest.raises(UnsupportedModelError):
        involution_of(Twisting(h))


def test_reduced_kernel_matches_ring_family():
    red = BipartiteReduction(F(1, 7))
    series = red.kernel_series(8)
    assert len(series) == 36
    for (k, kp), c in series.items():
        assert red.ring_coeff(k, kp) == c
    # numeric kernel against the truncated double series, deep inside convergence
    num = BipartiteReduction(1 / 7)
    X, Y = 0.05, 0.04
    tail = sum(float(c) * X**k * Y**kp for (k, kp), c in BipartiteReduction(F(1, 7)).kernel_series(30).items())
    assert num.ring_kernel(X, Y) == pytest.approx(tail, rel=1e-14)


def test_lift_and_reduce():
    Wt = lambda X: 1 / (X - 0.3)
    W = lambda x: BipartiteReduction.lift(Wt, x)
    for x in (1.7, -2.1, 0.4 + 0.9j):
        assert W(-x) == pytest.approx(-W(x))
        assert BipartiteReduction.reduce(W, x * x) == pytest.approx(Wt(x * x), rel=1e-14)


def test_particular_solution():
    n, g, h = 0.35, 0.04, 0.08
    for X in rng.uniform(-5, 20, 20):
        lhs = 2 * twist_particular(n, g, h, X) + 2 * n * twist_particular(n, g, h, 1 / h - X)
        assert lhs == pytest.approx(1 - g * X, abs=1e-12)


def test_omega_symmetry_and_functional_equation():
    n, g, h = 0.4, 0.05, 0.11
    for v in _rand_v(8):
        w = twist_omega(n, g, h, v)
        assert abs(twist_omega(n, g, h, -v) + w) <= 1e-12
        res = twist_omega(n, g, h, v + 1j * math.pi) + twist_omega(n, g, h, v - 1j * math.pi) - 2 * n * w
        assert abs(res) <= 1e-10


@pytest.mark.parametrize("n,g,h", [(0.4, 0.05, 0.11), (0.8, 0.02, 0.2), (0.05, 0.07, 0.09)])
def test_laurent_at_pole(n, g, h):
    c = 1j * math.pi / 2
    want = np.array([0.0, *twist_principal_part(n, g, h)])
    got = laurent_coefficients(lambda v: twist_omega(n, g, h, v), c)
    assert np.max(np.abs(got - want)) <= 1e-9
    # and the required principal part really is that of X'(-Wt_part + 1/X)
    target = lambda v: twist_dx_of_v(h, v) * (
        -twist_particular(n, g, h, twist_x_of_v(h, v)) + 1 / twist_x_of_v(h, v)
    )
    assert np.max(np.abs(laurent_coefficients(target, c) - want)) <= 1e-9


def _fit_rates(n, g, h):
    b = b_twist(n)
    vs = np.linspace(10, 14, 9)
    rates = (b, 2 - b, 2 + b, 4 - b)
    M = np.array([[math.exp(-r * v) for r in rates] for v in vs])
    y = np.array([twist_omega(n, g, h, v).real for v in vs])
    return np.linalg.lstsq(M, y, rcond=None)[0][:2]


@pytest.mark.parametrize("n,g,h", [(0.4, 0.05, 0.11), (N03, 0.03, 0.07)])
def test_kappa_from_decay_fit(n, g, h):
    b = b_twist(n)
    kb, k2 = _fit_rates(n, g, h)
    assert kb == pytest.approx(twist_kappa(n, g, h, b), abs=1e-6)
    assert k2 == pytest.approx(twist_kappa(n, g, h, 2 - b), abs=1e-6 * max(1, abs(k2)))
    assert abs(twist_omega(n, g, h, 12.0).imag) <= 1e-15


def test_kappa_fit_on_line(dense03):
    s = dense03
    kb, k2 = _fit_rates(s.n, s.g, s.h2)
    assert abs(kb) <= 1e-6
    assert k2 == pytest.approx(s.kappa_2mb, rel=1e-6)


def test_parabola_zeroes_kappa_b():
    for n in (0.1, 0.5, 0.9):
        b = b_twist(n)
        for h in np.linspace(0.01, 0.3, 7):
            g = twist_parabola(n, h)
            assert abs(twist_kappa(n, g, h, b)) <= 1e-12 * max(1, g / h**2)


def test_parabola_at_n_zero():
    for h in np.linspace(0.0, 0.125, 11):
        assert twist_parabola(0.0, h) == pytest.approx((8 / 3) * (h - 8 * h * h), abs=1e-12)
    assert b_twist(0.0) == 0.5


def test_dilute_limit_n_zero():
    g, h = twist_dilute_point(0.0)
    assert g == pytest.approx(1 / 12, abs=1e-15) and h == pytest.approx(1 / 16, abs=1e-15)
    g, h = twist_critical_line(1e-13)[0].g, twist_critical_line(1e-13)[0].h2
    assert abs(g - 1 / 12) <= 1e-10 and abs(h - 1 / 16) <= 1e-10


def test_dilute_point_b03(line03, dilute03):
    b, n = 0.3, N03
    g_ref = b * (2 - b) / (4 * (math.sqrt(1 - n) + (1 - b) * math.sqrt(1 + n)) ** 2)
    h_ref = b * (2 - b) / (8 * (1 - n + (1 - b) * math.sqrt(1 - n * n)))
    assert dilute03.phase == "dilute"
    assert abs(dilute03.g - g_ref) <= 1e-10 and abs(dilute03.h2 - h_ref) <= 1e-10
    assert abs(twist_kappa(n, g_ref, h_ref, 2 - b)) <= 1e-10
    # both boundaries of the admissible region meet there
    assert twist_positivity_bound(n, h_ref) == pytest.approx(twist_parabola(n, h_ref), rel=1e-12)
    assert sum(s.phase == "dilute" for s in line03) == 1


def test_line_structure(line03):
    hs = [s.h2 for s in line03]
    assert hs == sorted(hs)
    for s in line03:
        assert s.g >= 0 and s.kappa_2mb >= -1e-12 and abs(s.kappa_b) <= 1e-12
        g_max = twist_positivity_bound(s.n, s.h2)
        assert s.g <= g_max * (1 + 1e-12)
    assert line03[-1].g == pytest.approx(0.0, abs=1e-14)
    assert all(s.phase == "dense" for s in line03[1:])
    # g decreases from the dilute end to zero
    gs = [s.g for s in line03]
    assert gs == sorted(gs, reverse=True)


def test_line_grid_filtering():
    g_d, h_d = twist_dilute_point(N03)
    grid = np.linspace(0.5 * h_d, 1.5 * h_d, 21)
    line = twist_critical_line(N03, grid)
    assert line[0].phase == "dilute" and line[0].h2 == pytest.approx(h_d, rel=1e-14)
    assert all(s.h2 >= h_d for s in line)
    with pytest.raises(EmptyLineError):
        twist_critical_line(N03, [0.1 * h_d, 0.2 * h_d])
    with pytest.raises(OutOfRangeError):
        twist_solution(N03, 0.9 * h_d)
    for bad in (0.0, 1.0, 1.3):
        with pytest.raises(OutOfRangeError):
            twist_critical_line(bad)


def test_single_condition_suffices(dense03, dilute03):
    # s(infinity) = infinity: no condition at X = 0, and omega(i pi) need not vanish
    for s in (dense03, dilute03):
        assert abs(s.omega(1j * math.pi)) > 1e-3
        prev = None
        for X in (40.0, 80.0, 160.0):
            dev = abs(X * twist_resolvent(s, X) - 1)
            if prev is not None:
                assert dev == pytest.approx(prev / 2, rel=0.05)
            prev = dev


@pytest.mark.parametrize("which", ["dense", "dilute"])
def test_cut_residual(which, dense03, dilute03):
    s = dense03 if which == "dense" else dilute03
    for X in np.linspace(0, s.Gamma, 14)[1:-1]:
        assert twist_cut_residual(s, X) <= 1e-8


@pytest.mark.parametrize("which", ["dense", "dilute"])
def test_density_even_and_from_resolvent(which, dense03, dilute03):
    s = dense03 if which == "dense" else dilute03
    for v in (0.2, 1.0, 3.0):
        x, rho = twist_density(s, v)
        assert rho > 0
        for sx in (x, -x):
            X = sx * sx + 1j * 1e-12 * np.sign(sx)
            W = sx * twist_resolvent(s, X)
            assert -W.imag / math.pi == pytest.approx(rho, rel=1e-6)


@pytest.mark.parametrize("which", ["dense", "dilute"])
def test_density_normalized_and_vanishing(which, dense03, dilute03):
    s = dense03 if which == "dense" else dilute03
    total = 2 * integrate.quad(lambda v: twist_density_weight(s, v), 0, 40, limit=400)[0]
    assert total == pytest.approx(1.0, abs=1e-8)
    assert twist_density(s, 1e-6)[1] > 0.05  # rho(0) does not vanish
    tail = [twist_density(s, v)[1] for v in (8.0, 12.0, 16.0)]
    assert tail == sorted(tail, reverse=True) and tail[-1] < 1e-3


def _edge_exponent(s):
    vs = np.linspace(8, 11, 7)
    pts = [twist_density(s, v) for v in vs]
    d = np.log([math.sqrt(s.Gamma) - x for x, _ in pts])
    r = np.log([rho for _, rho in pts])
    return np.polyfit(d, r, 1)[0]


def test_edge_exponents(dense03, dilute03):
    b = 0.3
    assert _edge_exponent(dense03) == pytest.approx(1 - b, abs=0.05)
    assert _edge_exponent(dilute03) == pytest.approx(1 + b, abs=0.05)


def test_nzero_matches_quadrangulations():
    for h in np.linspace(1 / 16, 1 / 8, 12)[1:-1]:
        assert nzero_line_residual(h) <= 1e-12
    # the dilute end is the pure-quadrangulation critical point, a double root of the (R, S) system
    assert nzero_line_residual(1 / 16) <= 1e-9


def test_solution_type_fields(dense03):
    assert isinstance(dense03, TwistSolution)
    assert dense03.x(1j * math.pi) == pytest.approx(0, abs=1e-15)
    assert cmath.isclose(dense03.omega(0.7), twist_omega(dense03.n, dense03.g, dense03.h2, 0.7))
