import math
from fractions import Fraction as F

import numpy as np
import pytest

from loopmaps import mapcount
from loopmaps.gasket import (
    BeyondCriticalError,
    LoopModel,
    fixed_point_weights,
    loop_disk_series,
    loop_potential,
    one_pole_residual,
    picard_step,
)
from loopmaps.mapcount import WeightProfile, cut_endpoints, disk_series, disk_values
from loopmaps.qseries import TruncatedSeries
from loopmaps.ringgen import Bending, Rigid, Triangular, involution_of, ring_coeff

G3 = WeightProfile.numeric({3: 0.05})
TRI = LoopModel(1.0, G3, Triangular(0.05))
BEND = LoopModel(1.0, G3, Bending(2.0, 0.05))


@pytest.fixture(scope="module")
def tri_weights():
    return fixed_point_weights(TRI)


@pytest.fixture(scope="module")
def bend_weights():
    return fixed_point_weights(BEND)


def test_zero_fugacity_is_bare():
    ew = fixed_point_weights(LoopModel(0.0, G3, Triangular(0.05)))
    assert ew.iterations == 1
    assert list(ew.g[:3]) == [0.0, 0.0, 0.05] and not any(ew.g[3:])
    formal = fixed_point_weights(
        LoopModel(0, WeightProfile.formal({3: 1}), Triangular(F(1))), mode="formal", order=4
    )
    assert formal.g[2] == TruncatedSeries({(1,): 1}, ("t",), 4)
    assert all(gk.is_zero() for k, gk in enumerate(formal.g, 1) if k != 3)


def test_vanishing_ring_weight_is_bare():
    ew = fixed_point_weights(LoopModel(1.0, G3, Bending(2.0, 0.0)))
    assert ew.g[2] == 0.05 and sum(ew.g) == 0.05


def test_rigid_first_correction():
    g, h1, n = 0.04, 0.1, 1.5
    m = LoopModel(n, WeightProfile.numeric({4: g}), Rigid(h1))
    step = picard_step(m, [0, 0, 0, g], K=12)
    Fk = disk_values(WeightProfile.numeric({4: g}), 12)
    for k in range(1, 13):
        expected = (g if k == 4 else 0.0) + n * h1**k * Fk[k]
        assert step[k - 1] == pytest.approx(expected, rel=1e-14, abs=1e-300)
    # cross-check F_6 against the exact series, well inside its disk of convergence
    small = 0.01
    ser = disk_series(WeightProfile.formal({4: 1}), 6, 14)
    F6 = disk_values(WeightProfile.numeric({4: small}), 6)[6]
    assert F6 == pytest.approx(sum(float(c) * small ** e[0] for e, c in ser.items()), rel=1e-12)


def test_numeric_fixed_point_quality(tri_weights, bend_weights):
    for ew in (tri_weights, bend_weights):
        assert ew.residual <= 1e-10
        assert ew.tail < 1e-8


def test_truncation_stability(tri_weights):
    more = fixed_point_weights(TRI, K=45)
    diff = max(abs(a - b) for a, b in zip(tri_weights.g, more.g))
    assert diff <= max(tri_weights.tail, 1e-10) + 1e-10


def test_beyond_critical():
    with pytest.raises(BeyondCriticalError):
        fixed_point_weights(LoopModel(1.0, WeightProfile.numeric({3: 0.2}), Triangular(0.2)))


def test_formal_fixed_point_and_positivity():
    m = LoopModel(F(3, 2), WeightProfile.formal({3: 1}), Bending(F(2), F(1)))
    ew = fixed_point_weights(m, mode="formal", order=6)
    for gk in ew.g:
        assert all(c >= 0 for _, c in gk.items())
    for p in range(7):
        assert all(c >= 0 for _, c in loop_disk_series(m, p, 6).items())


def test_loop_disk_series_basics():
    m = LoopModel(1, WeightProfile.formal({3: 1}), Triangular(F(1)))
    assert loop_disk_series(m, 0, 5) == TruncatedSeries.constant(1, ("t",), 5)
    m0 = LoopModel(0, WeightProfile.formal({3: 1}), Triangular(F(1)))
    for p in range(6):
        assert loop_disk_series(m0, p, 6) == disk_series(WeightProfile.formal({3: 1}), p, 6)


def _lagrange_linear(values):
    """Coefficient of x^1 in the polynomial through (j, values[j]), j = 0..N."""
    N = len(values) - 1
    pts = list(range(N + 1))
    total = None
    for j, vj in enumerate(values):
        others = [x for x in pts if x != j]
        denom = math.prod(F(j - x) for x in others)
        # x^1 coefficient of prod (x - x_i) over others
        lin = sum(math.prod(F(-x) for x in others if x != skip) for skip in others)
        term = vj * (lin / denom)
        total = term if total is None else total + term
    return total


def test_lowest_loop_contribution():
    # one level of the gasket relation, written out directly
    N = 5
    g0 = WeightProfile.formal({3: 1})
    rings = Triangular(F(1))
    Fg0 = mapcount.disk_series_all(g0, N, N)
    zero = TruncatedSeries({}, ("t",), N)
    # delta_k: one ring of outer length k around a disk with the bare weights
    delta = []
    for k in range(1, N + 1):
        acc = zero
        for kp in range(0, N + 1 - k):
            ring = TruncatedSeries({(k + kp,): ring_coeff(rings, k, kp)}, ("t",), N)
            acc = acc + ring * Fg0[kp]
        delta.append(acc)
    bare = [TruncatedSeries({(1,): 1}, ("t",), N) if k == 3 else zero for k in range(1, N + 1)]

    def perturbed(p, eps):
        w = WeightProfile(tuple(b + d * eps for b, d in zip(bare, delta)), "formal")
        return disk_series(w, p, N, "tutte")

    for p in range(1, 6):
        oracle = _lagrange_linear([perturbed(p, e) for e in range(N + 1)])
        model = _lagrange_linear(
            [loop_disk_series(LoopModel(nn, g0, rings), p, N) for nn in range(N + 1)]
        )
        assert model == oracle


def test_bare_potential_and_zero_fugacity(tri_weights):
    for x in (-1.0, 0.3, 1.7):
        pot = loop_potential(TRI, tri_weights, x)
        assert pot.bare == pytest.approx(x - 0.05 * x * x, rel=1e-15)
    m0 = LoopModel(0.0, G3, Triangular(0.05))
    ew0 = fixed_point_weights(m0)
    for x in (-1.0, 0.3, 1.7):
        pot = loop_potential(m0, ew0, x)
        assert pot.effective == pot.bare


@pytest.mark.parametrize("which", ["tri", "bend"])
def test_contour_integral_matches_residue(which, tri_weights, bend_weights):
    from loopmaps.ringgen import ring_gf

    m, ew = (TRI, tri_weights) if which == "tri" else (BEND, bend_weights)
    prof = ew.profile
    cut = cut_endpoints(prof)
    mid = (cut.gamma_plus + cut.gamma_minus) / 2
    rad = 0.75 * (cut.gamma_plus - cut.gamma_minus)
    x = 0.4
    s = involution_of(m.rings)
    assert abs(s(x) - mid) > rad * 1.5
    M = 96
    th = 2 * np.pi * (np.arange(M) + 0.5) / M
    ys = mid + rad * np.exp(1j * th)
    vals = [ring_gf(m.rings, x, y) * mapcount.resolvent(prof, y) * (y - mid) for y in ys]
    numeric = np.mean(vals)  # (1/2 pi i) contour integral, dy = i (y - mid) dtheta
    pot = loop_potential(m, ew, x)
    assert abs(numeric - pot.contour) <= 1e-8
    # and the effective potential picks up exactly that term
    assert pot.effective == pytest.approx(pot.bare - m.n * pot.contour / x, abs=1e-9)


def test_one_pole_residual_zero_fugacity():
    m0 = LoopModel(0.0, G3, Triangular(0.05))
    ew0 = fixed_point_weights(m0)
    cut = cut_endpoints(ew0.profile)
    for x in np.linspace(cut.gamma_minus, cut.gamma_plus, 7)[1:-1]:
        assert one_pole_residual(m0, ew0, x) <= 1e-6


@pytest.mark.parametrize("which", ["tri", "bend"])
def test_one_pole_residual(which, tri_weights, bend_weights):
    m, ew = (TRI, tri_weights) if which == "tri" else (BEND, bend_weights)
    cut = cut_endpoints(ew.profile)
    for x in np.linspace(cut.gamma_minus, cut.gamma_plus, 12)[1:-1]:
        assert one_pole_residual(m, ew, x) <= 1e-5


@pytest.mark.parametrize("which", ["tri", "bend"])
def test_cut_disjoint_from_image(which, tri_weights, bend_weights):
    m, ew = (TRI, tri_weights) if which == "tri" else (BEND, bend_weights)
    cut = cut_endpoints(ew.profile)
    s = involution_of(m.rings)
    img = sorted((s(cut.gamma_minus), s(cut.gamma_plus)))
    assert img[0] > cut.gamma_plus or img[1] < cut.gamma_minus


def test_numeric_agrees_with_formal_series():
    g, h = 0.02, 0.02
    m = LoopModel(1.0, WeightProfile.numeric({3: g}), Triangular(h))
    ew = fixed_point_weights(m)
    # with g = c t, h = c t the formal series evaluated at t = 1 reproduces the numbers
    mf = LoopModel(1, WeightProfile.formal({3: F(g)}), Triangular(F(h)))
    ser = fixed_point_weights(mf, mode="formal", order=9)
    for k in (1, 2, 3, 4):
        approx = sum(float(c) for _, c in ser.g[k - 1].items())
        assert ew.g[k - 1] == pytest.approx(approx, rel=1e-9)
