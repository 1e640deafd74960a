import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from loopmaps.qseries import TruncatedSeries
from loopmaps.ringgen import (
    Bending,
    Homography,
    InadmissibleGeometryError,
    Quadrangular,
    Rigid,
    Triangular,
    Twisting,
    UnsupportedModelError,
    classify_configuration,
    exponentiation_check,
    h_series,
    involution_of,
    ring_bruteforce,
    ring_coeff,
    ring_gf,
    ring_matrix,
    ring_series,
)

h = F(1, 10)
FAMILIES = [
    Triangular(h),
    Bending(F(2), h),
    Bending(F(1, 3), F(1, 7)),
    Bending(F(0), h),
    Rigid(F(1, 5)),
    Twisting(F(1, 6)),
    Quadrangular(F(1, 5), F(1, 6)),
]


def test_named_coefficients():
    assert ring_coeff(Triangular(h), 2, 1) == 2 * h**3
    assert ring_coeff(Rigid(h), 3, 3) == h**3
    assert ring_coeff(Rigid(h), 3, 2) == 0
    assert ring_coeff(Twisting(h), 2, 2) == 2 * h**2
    assert ring_coeff(Twisting(h), 3, 1) == 0
    a = F(2)
    assert ring_coeff(Bending(a, h), 1, 0) == a * h
    assert ring_coeff(Bending(a, h), 1, 1) == h**2
    assert ring_coeff(Bending(a, h), 2, 0) == (a * h) ** 2


def test_float_parameters_give_floats():
    v = ring_coeff(Triangular(0.1), 2, 1)
    assert isinstance(v, float)
    assert v == pytest.approx(0.002, rel=1e-15)


@pytest.mark.parametrize("family", FAMILIES, ids=repr)
def test_bruteforce_agrees_up_to_ten(family):
    for k in range(1, 11):
        for kp in range(0, 11 - k):
            assert ring_coeff(family, k, kp) == ring_bruteforce(family, k, kp), (k, kp)


def test_bruteforce_bound():
    with pytest.raises(ValueError):
        ring_bruteforce(Triangular(h), 10, 10, bound=14)


@pytest.mark.parametrize("family", FAMILIES, ids=repr)
def test_rooted_is_log_derivative_of_unrooted(family):
    order = 9
    H = h_series(family, order)
    assert H == H.__class__(
        {(j, i): c for (i, j), c in H.items()}, ("x", "y"), order
    ), "H must be symmetric"
    lhs = H.log().euler("x")
    assert lhs == ring_series(family, order)


@pytest.mark.parametrize("family", FAMILIES, ids=repr)
def test_series_matches_rational_function(family):
    x, y = 0.3, 0.2
    A = ring_series(family, 40)
    approx = sum(float(c) * x**i * y**j for (i, j), c in A.items())
    assert approx == pytest.approx(ring_gf(family, x, y), rel=1e-12)


def test_quad_printed_even_indexing():
    # reference formula for A[2K, 2K'] of the quadrangular model (half-length indexing)
    h1, h2 = F(1, 5), F(1, 6)
    q = Quadrangular(h1, h2)
    for K in range(1, 5):
        for Kp in range(0, 5):
            ref = F(0)
            for j in range(0, min(K, Kp) + 1):
                co, ci = K - j, Kp - j
                n = 2 * j + co + ci
                if n == 0:
                    continue
                ref += (
                    F(2 * K, n)
                    * math.factorial(n)
                    / (math.factorial(2 * j) * math.factorial(co) * math.factorial(ci))
                    * h1 ** (2 * j)
                    * h2 ** (co + ci)
                )
            assert ring_coeff(q, 2 * K, 2 * Kp) == ref


ONE_POLE = [Triangular(0.1), Bending(2.0, 0.1), Bending(0.5, 0.1), Rigid(0.2)]


@pytest.mark.parametrize("family", ONE_POLE, ids=repr)
def test_closed_forms_of_rooted_function(family):
    s = involution_of(family)
    for x, y in [(0.3, 0.2), (0.1, 0.7), (0.5, 0.05)]:
        A = ring_gf(family, x, y)
        assert A == pytest.approx(x / (s(y) - x), rel=1e-12)
        alt = x * s.deriv(x) / (y - s(x)) + x * s.deriv2(x) / (2 * s.deriv(x))
        assert A == pytest.approx(alt, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    st.floats(0.0, 3.0),
    st.floats(0.01, 0.5),
    st.floats(-3, 3),
)
def test_involution_property(a, hh, x):
    s = involution_of(Bending(a, hh))
    if abs(s.beta - s.delta * x) < 1e-6:
        return
    sx = s(x)
    if abs(s.beta - s.delta * sx) < 1e-6:
        return
    assert s(sx) == pytest.approx(x, rel=1e-7, abs=1e-7)


def test_bending_fixed_points_and_discriminant():
    a, hh = 2.0, 0.1
    s = involution_of(Bending(a, hh))
    assert s.discriminant == pytest.approx(hh**2)
    assert s.decreasing
    fps = s.fixed_points()
    assert fps == pytest.approx(sorted([1 / ((a - 1) * hh), 1 / ((a + 1) * hh)]))
    for p in fps:
        assert s(p) == pytest.approx(p)


def test_twist_and_mixed_quad_are_deferred():
    with pytest.raises(UnsupportedModelError):
        involution_of(Twisting(0.1))
    with pytest.raises(UnsupportedModelError):
        involution_of(Quadrangular(0.1, 0.1))
    assert involution_of(Quadrangular(0.1, 0)) == involution_of(Rigid(0.1))


def test_exponentiation_example():
    out = exponentiation_check(Bending(2, 0.1), 3, 0.5, 60)
    assert out.error < 1e-12
    assert out.within_bound


@pytest.mark.parametrize("a", [0.5, 2.0, 3.0])
def test_exponentiation_bound_holds(a):
    fam = Bending(a, 0.1)
    y0 = involution_of(fam).zero
    for k in (1, 4, 8):
        out = exponentiation_check(fam, k, y0 / 2, 130)
        assert out.within_bound
        assert out.error < 1e-10


def test_exponentiation_outside_disk():
    with pytest.raises(InadmissibleGeometryError):
        exponentiation_check(Triangular(0.1), 2, 11.0, 10)


def test_classification_examples():
    tri = involution_of(Triangular(0.1))  # s(x) = 10 - x
    assert classify_configuration(tri, (-1.0, 1.0)).label == "1-"
    assert classify_configuration(tri, (11.0, 12.0)).label == "2-"
    rigid = involution_of(Rigid(0.1))  # s(x) = 10/x, pole at 0
    assert rigid.decreasing
    assert classify_configuration(rigid, (-1.0, 1.0)).label == "3-"
    assert classify_configuration(rigid, (20.0, 30.0)).label == "2-"
    inc = Homography(1.0, 0.0, 1.0)  # s(x) = -1/x
    assert not inc.decreasing
    assert classify_configuration(inc, (0.5, 1.0)).label == "2+"
    assert classify_configuration(inc, (-1.0, -0.5)).label == "1+"
    assert classify_configuration(inc, (-1.0, 2.0)).label == "3+"
    with pytest.raises(InadmissibleGeometryError):
        classify_configuration(tri, (4.0, 6.0))


def test_classification_invariant_under_scaling():
    s = involution_of(Bending(2.0, 0.1))
    for cut in [(-3.0, 2.0), (-1.0, 1.0), (4.0, 4.5)]:
        base = classify_configuration(s, cut).label
        for lam in (0.5, 3.0, 10.0):
            assert classify_configuration(s.scaled(lam), cut).label == base


def test_ring_matrix_shape_and_values():
    M = ring_matrix(Bending(2.0, 0.1), 4, 5)
    assert M.shape == (4, 6)
    assert M[1, 3] == pytest.approx(float(ring_coeff(Bending(2.0, 0.1), 2, 3)))


def test_bending_expansion_matches_explicit_sum():
    from loopmaps.ringgen import bending_series_table

    for a, hh in [(F(2), F(1, 10)), (F(1, 2), F(1, 3)), (F(0), F(1, 4))]:
        table = bending_series_table(a, hh, 12, 12)
        for k in range(1, 13):
            for kp in range(0, 13):
                assert table[k][kp] == ring_coeff(Bending(a, hh), k, kp)
